#include "cavsim/params.hpp"

#include <cmath>
#include <string>

#include "cavsim/error.hpp"
#include "cavsim/model.hpp"

namespace cavsim {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

void require_finite(double v, const char* key) {
  require(std::isfinite(v), std::string(key) + " must be finite");
}

void check_snapshot(const SystemParams& p, const PositionsSnapshot& pos) {
  if (pos.x.size() != pos.y.size() ||
      pos.x.size() != static_cast<std::size_t>(p.n_atoms)) {
    throw ConfigError("positions snapshot must hold exactly n_atoms x and y values");
  }
}

double coupling_sum_sq(const SystemParams& p, const PositionsSnapshot& pos) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double gi = coupling(p, pos.x[i], pos.y[i]);
    sum += gi * gi;
  }
  return sum;
}

}  // namespace

void validate(const SystemParams& p) {
  require(p.n_atoms >= 1, "n_atoms must be >= 1");
  for (auto [v, key] : {std::pair{p.g, "g"}, {p.kappa, "kappa"}, {p.gamma, "gamma"},
                        {p.omega_pump, "omega_pump"}, {p.delta_a, "delta_a"},
                        {p.delta_c, "delta_c"}, {p.waist, "waist"}, {p.omega_r, "omega_r"},
                        {p.t_final, "t_final"}, {p.avg_window, "avg_window"},
                        {p.init_pos_halfwidth, "init_pos_halfwidth"},
                        {p.init_mom_halfwidth, "init_mom_halfwidth"},
                        {p.init_n_phot, "init_n_phot"}}) {
    require_finite(v, key);
  }
  if (p.delta_c2) require_finite(*p.delta_c2, "delta_c2");
  require(p.kappa > 0.0, "kappa must be > 0");
  require(p.gamma > 0.0, "gamma must be > 0");
  require(p.gamma == 1.0, "gamma is the unit of time and must equal 1; rescale the other rates");
  require(p.waist > 0.0, "waist must be > 0");
  require(p.omega_r > 0.0, "omega_r must be > 0");
  require(p.t_final > 0.0, "t_final must be > 0");
  require(p.avg_window > 0.0, "avg_window must be > 0");
  require(p.avg_window <= p.t_final, "avg_window must not exceed t_final");
  require(p.init_pos_halfwidth >= 0.0, "init_pos_halfwidth must be >= 0");
  require(p.init_mom_halfwidth >= 0.0, "init_mom_halfwidth must be >= 0");
  require(p.init_n_phot >= 0.0, "init_n_phot must be >= 0");
}

double effective_detuning(const SystemParams& p, const PositionsSnapshot& pos) {
  check_snapshot(p, pos);
  if (p.delta_a == 0.0) {
    throw SingularityError("effective detuning is singular at delta_a = 0");
  }
  return p.delta_c - coupling_sum_sq(p, pos) / p.delta_a;
}

double threshold_margin(const SystemParams& p, const PositionsSnapshot& pos) {
  const double delta = effective_detuning(p, pos);
  if (delta == 0.0) {
    throw SingularityError("pumping threshold is undefined at zero effective detuning");
  }
  const double n = static_cast<double>(pos.size());
  const double g_avg = std::sqrt(coupling_sum_sq(p, pos) / n);
  const double lhs = 2.0 * std::sqrt(n) * g_avg * p.omega_pump / std::abs(p.delta_a);
  const double half_kappa = 0.5 * p.kappa;
  const double rhs = (half_kappa * half_kappa + delta * delta) / (2.0 * std::abs(delta));
  return lhs - rhs;
}

}  // namespace cavsim
