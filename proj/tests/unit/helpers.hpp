#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "cavsim/config.hpp"
#include "cavsim/layout.hpp"
#include "cavsim/params.hpp"

namespace testing {

inline cavsim::SystemParams fig1_params(int n_atoms) {
  cavsim::SystemParams p;
  p.n_atoms = n_atoms;
  p.g = 1.0;
  p.kappa = 10.0;
  p.omega_pump = 5.0;
  p.delta_a = -20.0;
  p.delta_c = -10.0;
  p.waist = 1000.0;
  p.omega_r = 1.0;
  p.seed = 7;
  return p;
}

inline cavsim::Config fig1_config(int n_atoms) {
  cavsim::Config c;
  c.system = fig1_params(n_atoms);
  return c;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// A random but physical-looking moment state: small coherences, populations in
// [0, 1], arbitrary positions and momenta.
inline std::vector<double> random_state(const cavsim::StateLayout& l, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> s(l.size);
  for (double& v : s) v = 0.3 * u(rng);
  cavsim::StateRef st(l, s);
  if (l.second_order()) st.n_phot() = 0.5 + 0.4 * u(rng);
  for (int m = 0; m < l.n_atoms; ++m) {
    st.pop()[m] = 0.5 + 0.4 * u(rng);
    st.x()[m] = 2.0 * u(rng);
    st.y()[m] = 2.0 * u(rng);
    st.px()[m] = 3.0 * u(rng);
    st.py()[m] = 3.0 * u(rng);
  }
  if (l.two_mode && l.second_order()) st.n_phot_b() = 0.5 + 0.4 * u(rng);
  return s;
}

}  // namespace testing
