#include "cavsim/observables.hpp"

#include <cmath>
#include <complex>

#include "cavsim/error.hpp"

namespace cavsim {

namespace {

double window_slack(double t_end) { return 1e-9 * std::max(1.0, std::abs(t_end)); }

}  // namespace

double order_parameter(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || x.size() != y.size()) throw Error("order_parameter needs N >= 1 positions");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += std::cos(kWavenumber * x[i]) * std::cos(kWavenumber * y[i]);
  }
  return sum / static_cast<double>(x.size());
}

double kinetic_energy(std::span<const double> px, std::span<const double> py) {
  if (px.empty() || px.size() != py.size()) throw Error("kinetic_energy needs N >= 1 momenta");
  double sum = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) sum += px[i] * px[i] + py[i] * py[i];
  return sum / static_cast<double>(px.size());
}

double mean_inversion(std::span<const double> pop) {
  if (pop.empty()) return 0.0;
  double sum = 0.0;
  for (double p : pop) sum += 2.0 * p - 1.0;
  return sum / static_cast<double>(pop.size());
}

double photon_number(const StateLayout& layout, std::span<const double> s) {
  const ConstStateRef st(layout, s);
  return layout.second_order() ? st.n_phot() : std::norm(st.a());
}

std::optional<double> filter_photon_number(const StateLayout& layout,
                                           std::span<const double> s) {
  if (!layout.two_mode) return std::nullopt;
  const ConstStateRef st(layout, s);
  return layout.second_order() ? st.n_phot_b() : std::norm(st.b());
}

ObservableRecord observe(const StateLayout& layout, std::span<const double> s) {
  const ConstStateRef st(layout, s);
  ObservableRecord r;
  r.theta = order_parameter(st.x(), st.y());
  r.abs_theta = std::abs(r.theta);
  r.e_kin = kinetic_energy(st.px(), st.py());
  r.n_phot = photon_number(layout, s);
  r.inversion = mean_inversion(st.pop());
  r.n_phot_b = filter_photon_number(layout, s);
  return r;
}

WindowAverager::WindowAverager(double t_end, double window)
    : t_start_(t_end - window - window_slack(t_end)), t_end_(t_end + window_slack(t_end)) {
  if (!(window > 0.0)) throw Error("averaging window must be > 0");
}

void WindowAverager::add(double t, const ObservableRecord& r) {
  if (t < t_start_ || t > t_end_) return;
  ++count_;
  sum_.theta += r.theta;
  sum_.abs_theta += r.abs_theta;
  sum_.e_kin += r.e_kin;
  sum_.n_phot += r.n_phot;
  sum_.inversion += r.inversion;
  if (r.n_phot_b) sum_.n_phot_b = sum_.n_phot_b.value_or(0.0) + *r.n_phot_b;
}

ObservableRecord WindowAverager::mean() const {
  if (count_ == 0) throw Error("no samples inside the averaging window");
  const double inv = 1.0 / static_cast<double>(count_);
  ObservableRecord m;
  m.theta = sum_.theta * inv;
  m.abs_theta = sum_.abs_theta * inv;
  m.e_kin = sum_.e_kin * inv;
  m.n_phot = sum_.n_phot * inv;
  m.inversion = sum_.inversion * inv;
  if (sum_.n_phot_b) m.n_phot_b = *sum_.n_phot_b * inv;
  return m;
}

TimeSeries observe_trajectory(const StateLayout& layout, const std::vector<double>& times,
                              const std::vector<std::vector<double>>& samples) {
  TimeSeries ts;
  ts.times = times;
  ts.records.reserve(samples.size());
  for (const auto& s : samples) ts.records.push_back(observe(layout, s));
  return ts;
}

ObservableRecord time_average(const TimeSeries& series, double window) {
  if (series.times.empty()) throw Error("cannot average an empty time series");
  const double t_last = series.times.back();
  const double span = t_last - series.times.front();
  if (window > span + window_slack(t_last)) {
    throw Error("averaging window exceeds the trajectory span");
  }
  WindowAverager avg(t_last, window);
  for (std::size_t i = 0; i < series.times.size(); ++i) avg.add(series.times[i], series.records[i]);
  return avg.mean();
}

PositionsSnapshot average_positions(const StateLayout& layout, const std::vector<double>& times,
                                    const std::vector<std::vector<double>>& samples,
                                    double window) {
  if (times.empty()) throw Error("cannot average an empty trajectory");
  const double t_last = times.back();
  const double t_start = t_last - window - window_slack(t_last);
  const auto n = static_cast<std::size_t>(layout.n_atoms);
  PositionsSnapshot pos{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  std::size_t count = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_start) continue;
    const ConstStateRef st(layout, samples[i]);
    for (std::size_t m = 0; m < n; ++m) {
      pos.x[m] += st.x()[m];
      pos.y[m] += st.y()[m];
    }
    ++count;
  }
  if (count == 0) throw Error("no samples inside the averaging window");
  for (std::size_t m = 0; m < n; ++m) {
    pos.x[m] /= static_cast<double>(count);
    pos.y[m] /= static_cast<double>(count);
  }
  return pos;
}

}  // namespace cavsim
