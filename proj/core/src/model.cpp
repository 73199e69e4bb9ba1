#include "cavsim/model.hpp"

#include <cassert>
#include <cmath>
#include <random>
#include <string>

#include "cavsim/error.hpp"

namespace cavsim {

namespace {

constexpr cplx kI{0.0, 1.0};

double envelope(const SystemParams& p, double y) {
  return std::exp(-(y * y) / (p.waist * p.waist));
}

// Per-atom geometric factors at the instantaneous positions.
struct AtomGeometry {
  std::vector<double> g;      // main-mode coupling
  std::vector<double> gs;     // filter-mode coupling
  std::vector<double> pump;   // Omega cos(ky)
  std::vector<double> dg_dx;  // d/dx of g, per hbar*k
  std::vector<double> dg_dy;
  std::vector<double> dgs_dx;
  std::vector<double> dgs_dy;
  std::vector<double> dpump_dy;

  AtomGeometry(const SystemParams& p, std::span<const double> x, std::span<const double> y,
               bool two_mode) {
    const std::size_t n = x.size();
    g.resize(n);
    pump.resize(n);
    dg_dx.resize(n);
    dg_dy.resize(n);
    dpump_dy.resize(n);
    if (two_mode) {
      gs.resize(n);
      dgs_dx.resize(n);
      dgs_dy.resize(n);
    }
    const double k = kWavenumber;
    const double w2 = p.waist * p.waist;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = envelope(p, y[i]);
      const double c = std::cos(k * x[i]);
      const double s = std::sin(k * x[i]);
      g[i] = p.g * c * e;
      dg_dx[i] = -p.g * k * s * e;
      dg_dy[i] = -2.0 * y[i] / w2 * g[i];
      pump[i] = p.omega_pump * std::cos(k * y[i]);
      dpump_dy[i] = -p.omega_pump * k * std::sin(k * y[i]);
      if (two_mode) {
        gs[i] = p.g * s * e;
        dgs_dx[i] = p.g * k * c * e;
        dgs_dy[i] = -2.0 * y[i] / w2 * gs[i];
      }
    }
  }
};

void check_layout(const StateLayout& l, std::span<const double> s, std::span<double> ds) {
  if (s.size() != l.size || ds.size() != l.size) {
    throw Error("state size " + std::to_string(s.size()) + " does not match layout size " +
                std::to_string(l.size));
  }
}

// Motional part shared by every closure. Forces are -dH/dx expressed per
// hbar*k, with 2 Re<a sigma+_m> (resp. 2 Re<b sigma+_m>) as the field-dipole
// factor and 2 Re<sigma+_m> for the pump.
void motion_rhs(const SystemParams& p, const AtomGeometry& geo, ConstStateRef in,
                StateRef out, std::span<const cplx> field_dipole,
                std::span<const cplx> filter_dipole) {
  const int n = in.layout().n_atoms;
  auto dx = out.x();
  auto dy = out.y();
  auto dpx = out.px();
  auto dpy = out.py();
  if (p.pin_atoms) {
    for (int m = 0; m < n; ++m) dx[m] = dy[m] = dpx[m] = dpy[m] = 0.0;
    return;
  }
  const double velocity_scale = 2.0 * p.omega_r / kWavenumber;
  const double inv_k = 1.0 / kWavenumber;
  const auto px = in.px();
  const auto py = in.py();
  const auto sm = in.sm();
  for (int m = 0; m < n; ++m) {
    dx[m] = velocity_scale * px[m];
    dy[m] = velocity_scale * py[m];
    const double re_asp = field_dipole[m].real();
    const double re_sp = sm[m].real();
    double fx = -2.0 * geo.dg_dx[m] * re_asp;
    double fy = -2.0 * geo.dg_dy[m] * re_asp - 2.0 * geo.dpump_dy[m] * re_sp;
    if (!filter_dipole.empty()) {
      const double re_bsp = filter_dipole[m].real();
      fx -= 2.0 * geo.dgs_dx[m] * re_bsp;
      fy -= 2.0 * geo.dgs_dy[m] * re_bsp;
    }
    dpx[m] = fx * inv_k;
    dpy[m] = fy * inv_k;
  }
}

template <bool TwoMode>
void second_order_impl(const SystemParams& p, const StateLayout& l, std::span<const double> s,
                       std::span<double> ds) {
  check_layout(l, s, ds);
  const ConstStateRef in(l, s);
  const StateRef out(l, ds);
  const int n = l.n_atoms;
  const AtomGeometry geo(p, in.x(), in.y(), TwoMode);

  const cplx a = in.a();
  const double nph = in.n_phot();
  const auto sm = in.sm();
  const auto asp = in.a_sp();
  const auto pop = in.pop();
  const auto pair = in.pair();

  cplx b{};
  double nph_b = 0.0;
  cplx ab{};
  std::span<const cplx> bsp;
  if constexpr (TwoMode) {
    b = in.b();
    nph_b = in.n_phot_b();
    bsp = in.b_sp();
    ab = in.ab();
  }

  // Sums over j != m of g_j <sigma+_m sigma-_j>, built from the stored upper triangle.
  std::vector<cplx> pair_sum(n, cplx{});
  std::vector<cplx> pair_sum_b(TwoMode ? n : 0, cplx{});
  std::vector<double> inv(n);
  for (int m = 0; m < n; ++m) inv[m] = 2.0 * pop[m] - 1.0;

  auto dpair = out.pair();
  std::size_t idx = 0;
  for (int m = 0; m < n; ++m) {
    const cplx sp_m = std::conj(sm[m]);
    for (int j = m + 1; j < n; ++j, ++idx) {
      const cplx pmj = pair[idx];
      pair_sum[m] += geo.g[j] * pmj;
      pair_sum[j] += geo.g[m] * std::conj(pmj);
      cplx d = -p.gamma * pmj - kI * geo.g[m] * std::conj(asp[j]) * inv[m] +
               kI * geo.g[j] * asp[m] * inv[j] + kI * geo.pump[j] * sp_m * inv[j] -
               kI * geo.pump[m] * sm[j] * inv[m];
      if constexpr (TwoMode) {
        pair_sum_b[m] += geo.gs[j] * pmj;
        pair_sum_b[j] += geo.gs[m] * std::conj(pmj);
        d += -kI * geo.gs[m] * std::conj(bsp[j]) * inv[m] + kI * geo.gs[j] * bsp[m] * inv[j];
      }
      dpair[idx] = d;
    }
  }

  cplx da = -(0.5 * p.kappa - kI * p.delta_c) * a;
  double dn = -p.kappa * nph;
  cplx db{};
  double dn_b = 0.0;
  cplx dab{};
  if constexpr (TwoMode) {
    db = -(0.5 * p.kappa - kI * *p.delta_c2) * b;
    dn_b = -p.kappa * nph_b;
    dab = (-p.kappa + kI * (*p.delta_c2 - p.delta_c)) * ab;
  }

  auto dsm = out.sm();
  auto dasp = out.a_sp();
  auto dpop = out.pop();
  const cplx atom_decay = 0.5 * p.gamma - kI * p.delta_a;
  const cplx field_atom_decay = 0.5 * (p.kappa + p.gamma) + kI * (p.delta_a - p.delta_c);
  for (int m = 0; m < n; ++m) {
    const double gm = geo.g[m];
    const double om = geo.pump[m];
    da -= kI * gm * sm[m];
    // i g (z - conj z) = -2 g Im z
    dn -= 2.0 * gm * asp[m].imag();

    cplx dsm_m = -atom_decay * sm[m] + kI * gm * a * inv[m] + kI * om * inv[m];
    cplx dasp_m = -field_atom_decay * asp[m] +
                  kI * gm * (nph - 2.0 * nph * pop[m] - pop[m]) - kI * pair_sum[m] -
                  kI * om * a * inv[m];
    double dpop_m = -p.gamma * pop[m] + 2.0 * gm * asp[m].imag() - 2.0 * om * sm[m].imag();

    if constexpr (TwoMode) {
      const double gsm = geo.gs[m];
      db -= kI * gsm * sm[m];
      dn_b -= 2.0 * gsm * bsp[m].imag();
      dab += kI * gm * bsp[m] - kI * gsm * std::conj(asp[m]);
      dsm_m += kI * gsm * b * inv[m];
      dasp_m -= kI * gsm * std::conj(ab) * inv[m];
      dpop_m += 2.0 * gsm * bsp[m].imag();
    }
    dsm[m] = dsm_m;
    dasp[m] = dasp_m;
    dpop[m] = dpop_m;
  }
  out.a() = da;
  out.n_phot() = dn;

  if constexpr (TwoMode) {
    auto dbsp = out.b_sp();
    const cplx filter_atom_decay = 0.5 * (p.kappa + p.gamma) + kI * (p.delta_a - *p.delta_c2);
    for (int m = 0; m < n; ++m) {
      const double gsm = geo.gs[m];
      dbsp[m] = -filter_atom_decay * bsp[m] +
                kI * gsm * (nph_b - 2.0 * nph_b * pop[m] - pop[m]) - kI * pair_sum_b[m] -
                kI * geo.pump[m] * b * inv[m] - kI * geo.g[m] * ab * inv[m];
    }
    out.b() = db;
    out.n_phot_b() = dn_b;
    out.ab() = dab;
  }

  motion_rhs(p, geo, in, out, asp, bsp);
}

}  // namespace

double coupling(const SystemParams& p, double x, double y) {
  return p.g * std::cos(kWavenumber * x) * envelope(p, y);
}

double filter_coupling(const SystemParams& p, double x, double y) {
  return p.g * std::sin(kWavenumber * x) * envelope(p, y);
}

double pump_amplitude(const SystemParams& p, double y) {
  return p.omega_pump * std::cos(kWavenumber * y);
}

StateLayout layout_for(const SystemParams& p, Closure closure) {
  return StateLayout(p.n_atoms, closure, p.two_mode());
}

void rhs_second_order(const SystemParams& p, const StateLayout& layout,
                      std::span<const double> s, std::span<double> ds) {
  if (!layout.second_order() || layout.two_mode) {
    throw Error("rhs_second_order needs a single-mode second-order layout");
  }
  second_order_impl<false>(p, layout, s, ds);
}

void rhs_two_mode(const SystemParams& p, const StateLayout& layout, std::span<const double> s,
                  std::span<double> ds) {
  if (!layout.second_order() || !layout.two_mode || !p.delta_c2) {
    throw Error("rhs_two_mode needs a two-mode second-order layout and delta_c2");
  }
  second_order_impl<true>(p, layout, s, ds);
}

void rhs_mean_field(const SystemParams& p, const StateLayout& l, std::span<const double> s,
                    std::span<double> ds) {
  if (l.second_order()) throw Error("rhs_mean_field needs a mean-field layout");
  if (l.two_mode && !p.delta_c2) throw Error("two-mode layout without delta_c2");
  check_layout(l, s, ds);
  const ConstStateRef in(l, s);
  const StateRef out(l, ds);
  const int n = l.n_atoms;
  const bool two = l.two_mode;
  const AtomGeometry geo(p, in.x(), in.y(), two);

  const cplx a = in.a();
  const cplx b = two ? in.b() : cplx{};
  const auto sm = in.sm();
  const auto pop = in.pop();

  // Factorized <a sigma+_m> -> <a><sigma+_m>, also used by the force lines.
  std::vector<cplx> asp(n);
  std::vector<cplx> bsp(two ? n : 0);
  cplx da = -(0.5 * p.kappa - kI * p.delta_c) * a;
  cplx db = two ? -(0.5 * p.kappa - kI * *p.delta_c2) * b : cplx{};
  auto dsm = out.sm();
  auto dpop = out.pop();
  const cplx atom_decay = 0.5 * p.gamma - kI * p.delta_a;
  for (int m = 0; m < n; ++m) {
    const double inv = 2.0 * pop[m] - 1.0;
    const double gm = geo.g[m];
    const double om = geo.pump[m];
    asp[m] = a * std::conj(sm[m]);
    da -= kI * gm * sm[m];
    cplx dsm_m = -atom_decay * sm[m] + kI * gm * a * inv + kI * om * inv;
    double dpop_m = -p.gamma * pop[m] + 2.0 * gm * asp[m].imag() - 2.0 * om * sm[m].imag();
    if (two) {
      const double gsm = geo.gs[m];
      bsp[m] = b * std::conj(sm[m]);
      db -= kI * gsm * sm[m];
      dsm_m += kI * gsm * b * inv;
      dpop_m += 2.0 * gsm * bsp[m].imag();
    }
    dsm[m] = dsm_m;
    dpop[m] = dpop_m;
  }
  out.a() = da;
  if (two) out.b() = db;
  motion_rhs(p, geo, in, out, asp, bsp);
}

void rhs(const SystemParams& p, const StateLayout& layout, std::span<const double> s,
         std::span<double> ds) {
  if (!layout.second_order()) {
    rhs_mean_field(p, layout, s, ds);
  } else if (layout.two_mode) {
    rhs_two_mode(p, layout, s, ds);
  } else {
    rhs_second_order(p, layout, s, ds);
  }
}

std::vector<double> init_state(const SystemParams& p, const StateLayout& layout) {
  std::vector<double> s(layout.size, 0.0);
  const StateRef st(layout, s);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto x = st.x();
  auto y = st.y();
  auto px = st.px();
  auto py = st.py();
  for (int m = 0; m < layout.n_atoms; ++m) {
    x[m] = p.init_pos_halfwidth * unit(rng);
    y[m] = p.init_pos_halfwidth * unit(rng);
    px[m] = p.init_mom_halfwidth * unit(rng);
    py[m] = p.init_mom_halfwidth * unit(rng);
  }
  if (layout.second_order()) st.n_phot() = p.init_n_phot;
  return s;
}

bool check_physical(const StateLayout& layout, std::span<const double> s, double tol) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i])) {
      throw PhysicalityError("non-finite state component " + std::to_string(i));
    }
  }
  const ConstStateRef st(layout, s);
  bool flagged = false;
  if (layout.second_order()) {
    flagged |= st.n_phot() < 0.0 || (layout.two_mode && st.n_phot_b() < 0.0);
    if (st.n_phot() < -tol) {
      throw PhysicalityError("negative photon number " + std::to_string(st.n_phot()));
    }
    if (layout.two_mode && st.n_phot_b() < -tol) {
      throw PhysicalityError("negative filter photon number " + std::to_string(st.n_phot_b()));
    }
  }
  const auto pop = st.pop();
  for (int m = 0; m < layout.n_atoms; ++m) {
    if (pop[m] < -tol || pop[m] > 1.0 + tol) {
      throw PhysicalityError("excited population of atom " + std::to_string(m) +
                             " out of range: " + std::to_string(pop[m]));
    }
    flagged |= pop[m] < 0.0 || pop[m] > 1.0;
  }
  return flagged;
}

RhsFn make_rhs(const SystemParams& p, const StateLayout& layout) {
  return [p, layout](double, std::span<const double> s, std::span<double> ds) {
    rhs(p, layout, s, ds);
  };
}

StepCheckFn physicality_check(const StateLayout& layout, double tol) {
  return [layout, tol](double, std::span<const double> s) {
    return check_physical(layout, s.first(layout.size), tol);
  };
}

PositionsSnapshot positions_of(const StateLayout& layout, std::span<const double> s) {
  const ConstStateRef st(layout, s);
  return {{st.x().begin(), st.x().end()}, {st.y().begin(), st.y().end()}};
}

}  // namespace cavsim
