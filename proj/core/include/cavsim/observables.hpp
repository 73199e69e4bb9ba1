#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cavsim/layout.hpp"
#include "cavsim/params.hpp"

namespace cavsim {

struct ObservableRecord {
  double theta = 0.0;      // checkerboard order parameter, signed
  double abs_theta = 0.0;  // |theta|; differs from |<theta>| once time-averaged
  double e_kin = 0.0;      // per atom, hbar*omega_r
  double n_phot = 0.0;
  double inversion = 0.0;  // ensemble mean of <sigma_z>
  std::optional<double> n_phot_b;
};

// (1/N) sum_i cos(k x_i) cos(k y_i).
double order_parameter(std::span<const double> x, std::span<const double> y);

// Mean kinetic energy per atom in hbar*omega_r for momenta in hbar*k; the
// recoil identity k^2/2m = omega_r makes this the mean of px^2 + py^2.
double kinetic_energy(std::span<const double> px, std::span<const double> py);

// Mean of 2 pop - 1.
double mean_inversion(std::span<const double> pop);

// Photon number of the main mode: the dynamical <a+a> in second order,
// |<a>|^2 in mean field.
double photon_number(const StateLayout& layout, std::span<const double> s);
std::optional<double> filter_photon_number(const StateLayout& layout, std::span<const double> s);

ObservableRecord observe(const StateLayout& layout, std::span<const double> s);

// Streaming mean over the samples that fall in [t_end - window, t_end].
class WindowAverager {
 public:
  WindowAverager(double t_end, double window);
  void add(double t, const ObservableRecord& r);
  std::size_t count() const { return count_; }
  // Throws Error when no sample fell inside the window.
  ObservableRecord mean() const;

 private:
  double t_start_;
  double t_end_;
  std::size_t count_ = 0;
  ObservableRecord sum_;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<ObservableRecord> records;
};

TimeSeries observe_trajectory(const StateLayout& layout, const std::vector<double>& times,
                              const std::vector<std::vector<double>>& samples);

// Arithmetic mean of each observable over samples in [t_last - window, t_last].
// Throws Error for an empty window or a window longer than the series.
ObservableRecord time_average(const TimeSeries& series, double window);

// Mean positions over the samples in [t_last - window, t_last].
PositionsSnapshot average_positions(const StateLayout& layout, const std::vector<double>& times,
                                    const std::vector<std::vector<double>>& samples,
                                    double window);

}  // namespace cavsim
