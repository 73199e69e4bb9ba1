#include "cavsim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "cavsim/error.hpp"
#include "cavsim/model.hpp"

namespace cavsim {

namespace {

constexpr cplx kI{0.0, 1.0};

// fftw planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct RegressionLayout {
  std::size_t base = 0;  // single-time state occupies [0, base)
  std::size_t ca = 0;    // <a+(tau) c>
  std::size_t cb = 0;    // <b+(tau) c>, two-mode only
  std::size_t cm = 0;    // <sigma+_m(tau) c>
  std::size_t size = 0;

  explicit RegressionLayout(const StateLayout& l) : base(l.size) {
    ca = base;
    cb = base + 2;
    cm = base + (l.two_mode ? 4 : 2);
    size = cm + 2 * static_cast<std::size_t>(l.n_atoms);
  }
};

cplx& at(std::span<double> v, std::size_t off) { return *reinterpret_cast<cplx*>(v.data() + off); }
const cplx& at(std::span<const double> v, std::size_t off) {
  return *reinterpret_cast<const cplx*>(v.data() + off);
}
cplx& at(std::vector<double>& v, std::size_t off) { return at(std::span<double>(v), off); }

// Regression part of the augmented derivative. `source` is <c(t0)> for the
// tagged mode c, multiplying the inhomogeneous drive term.
void regression_rhs(const SystemParams& p, const StateLayout& l, const RegressionLayout& r,
                    cplx source, std::span<const double> s, std::span<double> ds) {
  const ConstStateRef st(l, s.first(l.size));
  const auto x = st.x();
  const auto y = st.y();
  const auto pop = st.pop();
  const int n = l.n_atoms;
  const cplx ca = at(s, r.ca);
  const cplx cb = l.two_mode ? at(s, r.cb) : cplx{};
  const cplx* cm = reinterpret_cast<const cplx*>(s.data() + r.cm);
  cplx* dcm = reinterpret_cast<cplx*>(ds.data() + r.cm);

  cplx dca = -(0.5 * p.kappa + kI * p.delta_c) * ca;
  cplx dcb = l.two_mode ? -(0.5 * p.kappa + kI * *p.delta_c2) * cb : cplx{};
  const cplx atom_decay = 0.5 * p.gamma + kI * p.delta_a;
  for (int m = 0; m < n; ++m) {
    const double gm = coupling(p, x[m], y[m]);
    const double om = pump_amplitude(p, y[m]);
    const double inv = 2.0 * pop[m] - 1.0;
    dca += kI * gm * cm[m];
    cplx d = -atom_decay * cm[m] - kI * inv * (gm * ca + om * source);
    if (l.two_mode) {
      const double gsm = filter_coupling(p, x[m], y[m]);
      dcb += kI * gsm * cm[m];
      d -= kI * inv * gsm * cb;
    }
    dcm[m] = d;
  }
  at(ds, r.ca) = dca;
  if (l.two_mode) at(ds, r.cb) = dcb;
}

// One regression run from a single-time state at t0. Returns the single-time
// state at t0 + span through `advanced`.
CorrelationSeries propagate_once(const SystemParams& p, const StateLayout& l,
                                 std::span<const double> state, double t0,
                                 const CorrelationSettings& cs, const IntegratorSettings& set) {
  const RegressionLayout r(l);
  const ConstStateRef st(l, state);
  const bool filter = cs.mode == ModeTag::filter;

  std::vector<double> aug(r.size, 0.0);
  std::copy(state.begin(), state.end(), aug.begin());
  cplx source;
  if (filter) {
    at(aug, r.ca) = st.ab();
    at(aug, r.cb) = st.n_phot_b();
    for (int m = 0; m < l.n_atoms; ++m) at(aug, r.cm + 2 * m) = st.b_sp()[m];
    source = st.b();
  } else {
    at(aug, r.ca) = st.n_phot();
    if (l.two_mode) at(aug, r.cb) = std::conj(st.ab());
    for (int m = 0; m < l.n_atoms; ++m) at(aug, r.cm + 2 * m) = st.a_sp()[m];
    source = st.a();
  }

  auto system = [&](double, std::span<const double> s, std::span<double> ds) {
    rhs(p, l, s.first(l.size), ds.first(l.size));
    regression_rhs(p, l, r, source, s, ds);
  };

  IntegratorSettings reg_set = set;
  reg_set.sample_dt = cs.dtau;
  reg_set.max_step = std::min(set.max_step, cs.span);

  CorrelationSeries out;
  out.t0 = t0;
  out.dtau = cs.dtau;
  out.mode = cs.mode;
  std::vector<double> photons;
  const std::size_t g1_off = filter ? r.cb : r.ca;
  integrate(
      system, aug, 0.0, cs.span, reg_set,
      [&](double tau, std::span<const double> s, bool) {
        out.tau.push_back(tau);
        out.g1.push_back(at(s, g1_off));
        const ConstStateRef cur(l, s.first(l.size));
        photons.push_back(filter ? cur.n_phot_b() : cur.n_phot());
      },
      physicality_check(l));

  const std::size_t fifth = std::max<std::size_t>(1, photons.size() / 5);
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < fifth; ++i) {
    head += photons[i];
    tail += photons[photons.size() - 1 - i];
  }
  head /= static_cast<double>(fifth);
  tail /= static_cast<double>(fifth);
  const double scale = std::max(std::abs(head), 1e-300);
  out.photon_drift = std::abs(tail - head) / scale;
  out.stationarity_warning = head > 0.0 && out.photon_drift > kStationarityDriftLimit;
  return out;
}

}  // namespace

std::string to_string(ModeTag tag) { return tag == ModeTag::main ? "main" : "filter"; }

ModeTag mode_tag_from_string(const std::string& s) {
  if (s == "main") return ModeTag::main;
  if (s == "filter") return ModeTag::filter;
  throw ConfigError("unknown mode tag '" + s + "' (expected main or filter)");
}

CorrelationSeries correlation_function(const SystemParams& p, const StateLayout& layout,
                                       std::span<const double> state, double t0,
                                       const CorrelationSettings& cs,
                                       const IntegratorSettings& set) {
  if (!layout.second_order()) throw Error("correlation functions need a second-order state");
  if (cs.mode == ModeTag::filter && !layout.two_mode) {
    throw Error("filter-mode correlation needs a two-mode state");
  }
  if (state.size() != layout.size) throw Error("state does not match layout");
  if (!(cs.dtau > 0.0) || !(cs.span >= cs.dtau)) {
    throw ConfigError("correlation grid needs dtau > 0 and span >= dtau");
  }
  if (cs.repetitions < 1) throw ConfigError("repetitions must be >= 1");

  CorrelationSeries avg = propagate_once(p, layout, state, t0, cs, set);
  if (cs.repetitions == 1) return avg;

  std::vector<double> cur(state.begin(), state.end());
  double t = t0;
  for (int rep = 1; rep < cs.repetitions; ++rep) {
    IntegratorSettings adv = set;
    adv.sample_dt = cs.repetition_spacing;
    cur = integrate(make_rhs(p, layout), cur, t, cs.repetition_spacing, adv, {},
                    physicality_check(layout))
              .final_state;
    t += cs.repetition_spacing;
    const CorrelationSeries next = propagate_once(p, layout, cur, t, cs, set);
    for (std::size_t i = 0; i < avg.g1.size(); ++i) avg.g1[i] += next.g1[i];
    avg.photon_drift = std::max(avg.photon_drift, next.photon_drift);
    avg.stationarity_warning = avg.stationarity_warning || next.stationarity_warning;
  }
  for (auto& v : avg.g1) v /= static_cast<double>(cs.repetitions);
  return avg;
}

std::size_t SpectrumResult::bin_of(double w) const {
  if (omega.empty()) throw Error("empty spectrum");
  const auto it = std::lower_bound(omega.begin(), omega.end(), w);
  if (it == omega.begin()) return 0;
  if (it == omega.end()) return omega.size() - 1;
  const auto i = static_cast<std::size_t>(it - omega.begin());
  return (w - omega[i - 1] <= omega[i] - w) ? i - 1 : i;
}

SpectrumResult spectrum_from_g1(const CorrelationSeries& c, const SpectrumOptions& opt) {
  if (c.g1.size() < 3 || c.tau.size() != c.g1.size()) {
    throw Error("spectrum needs at least three correlation samples");
  }
  const std::size_t intervals = c.g1.size() - 1;
  const double dtau = c.dtau;
  const double span = dtau * static_cast<double>(intervals);

  // The tau = T sample has phase exp(-i 2 pi j) = 1 on this grid and folds
  // onto tau = 0; both carry trapezoid weight 1/2.
  std::vector<cplx> h(intervals);
  for (std::size_t k = 0; k < intervals; ++k) {
    double w = 1.0;
    if (opt.apodization_rate > 0.0) w = std::exp(-opt.apodization_rate * c.tau[k]);
    h[k] = w * c.g1[k];
  }
  const double w_last =
      opt.apodization_rate > 0.0 ? std::exp(-opt.apodization_rate * c.tau[intervals]) : 1.0;
  h[0] = 0.5 * h[0] + 0.5 * w_last * c.g1[intervals];

  std::vector<cplx> f(intervals);
  auto* in = reinterpret_cast<fftw_complex*>(h.data());
  auto* outp = reinterpret_cast<fftw_complex*>(f.data());
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(intervals), in, outp, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  SpectrumResult res;
  res.resolution = 2.0 * std::numbers::pi / span;
  const auto half = static_cast<long>((intervals - 1) / 2);
  res.omega.reserve(2 * half + 1);
  res.s_raw.reserve(2 * half + 1);
  for (long j = -half; j <= half; ++j) {
    const auto idx = static_cast<std::size_t>(j < 0 ? j + static_cast<long>(intervals) : j);
    res.omega.push_back(res.resolution * static_cast<double>(j));
    res.s_raw.push_back(2.0 * dtau * f[idx].real());
  }
  res.s = res.s_raw;
  if (opt.normalize) {
    double peak = 0.0;
    for (double v : res.s_raw) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) {
      for (double& v : res.s) v /= peak;
      res.normalized = true;
    }
  }
  return res;
}

namespace {

// Prominence of a local maximum at i, in the sense of topographic prominence:
// the drop to the higher of the two lowest points separating i from higher
// ground on either side.
double prominence_at(const std::vector<double>& v, std::size_t i, std::size_t lo,
                     std::size_t hi) {
  double left_min = v[i];
  for (std::size_t k = i; k-- > lo;) {
    if (v[k] > v[i]) break;
    left_min = std::min(left_min, v[k]);
  }
  double right_min = v[i];
  for (std::size_t k = i + 1; k <= hi; ++k) {
    if (v[k] > v[i]) break;
    right_min = std::min(right_min, v[k]);
  }
  return v[i] - std::max(left_min, right_min);
}

double half_width(const std::vector<double>& v, const std::vector<double>& w, std::size_t i,
                  double level, std::size_t lo, std::size_t hi) {
  std::size_t l = i;
  while (l > lo && v[l] > level) --l;
  std::size_t r = i;
  while (r < hi && v[r] > level) ++r;
  auto cross = [&](std::size_t a, std::size_t b) {
    const double denom = v[b] - v[a];
    if (denom == 0.0) return w[a];
    return w[a] + (level - v[a]) / denom * (w[b] - w[a]);
  };
  const double wl = v[l] <= level && l < i ? cross(l, l + 1) : w[l];
  const double wr = v[r] <= level && r > i ? cross(r, r - 1) : w[r];
  return wr - wl;
}

void find_maxima(const std::vector<double>& v, const std::vector<double>& w, FeatureKind kind,
                 double sign, std::size_t lo, std::size_t hi, double min_prom,
                 std::vector<Feature>& out) {
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (!(v[i] > v[i - 1] && v[i] >= v[i + 1])) continue;
    const double prom = prominence_at(v, i, lo, hi);
    if (prom < min_prom) continue;
    const double ym = v[i - 1];
    const double y0 = v[i];
    const double yp = v[i + 1];
    const double curv = ym - 2.0 * y0 + yp;
    const double shift = curv != 0.0 ? 0.5 * (ym - yp) / curv : 0.0;
    const double dw = w[i + 1] - w[i];
    Feature f;
    f.kind = kind;
    f.omega = w[i] + std::clamp(shift, -0.5, 0.5) * dw;
    f.value = sign * (y0 - 0.25 * (ym - yp) * shift);
    f.prominence = prom;
    f.width = half_width(v, w, i, y0 - 0.5 * prom, lo, hi);
    out.push_back(f);
  }
}

}  // namespace

std::vector<Feature> locate_features(const SpectrumResult& s, const FeatureOptions& opt) {
  std::vector<Feature> out;
  if (s.omega.size() < 3) return out;
  const std::size_t n = s.s.size();
  std::size_t lo = 0;
  while (lo < n && s.omega[lo] < opt.omega_min) ++lo;
  std::size_t hi = n - 1;
  while (hi > lo && s.omega[hi] > opt.omega_max) --hi;
  if (lo >= n || hi < lo + 2) return out;

  double peak = 0.0;
  const std::size_t from = opt.window_relative ? lo : 0;
  const std::size_t to = opt.window_relative ? hi : n - 1;
  for (std::size_t i = from; i <= to; ++i) peak = std::max(peak, std::abs(s.s[i]));
  if (peak == 0.0) return out;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = s.s[i] / peak;

  find_maxima(v, s.omega, FeatureKind::peak, 1.0, lo, hi, opt.min_prominence, out);
  std::vector<double> neg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
  find_maxima(neg, s.omega, FeatureKind::dip, -1.0, lo, hi, opt.min_prominence, out);
  std::sort(out.begin(), out.end(),
            [](const Feature& a, const Feature& b) { return a.omega < b.omega; });
  return out;
}

}  // namespace cavsim
