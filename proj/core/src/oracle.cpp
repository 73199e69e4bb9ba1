#include "cavsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cavsim/error.hpp"
#include "cavsim/model.hpp"

namespace cavsim::oracle {

namespace {

constexpr cplx kI{0.0, 1.0};

using Triplets = std::vector<Eigen::Triplet<cplx>>;

SparseOp from_triplets(std::size_t dim, const Triplets& t) {
  SparseOp m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SparseOp adjoint(const SparseOp& op) { return SparseOp(op.adjoint()); }

struct Basis {
  std::size_t levels;  // cutoff + 1
  std::size_t b_levels;
  std::size_t atom_states;
  std::size_t index(std::size_t na, std::size_t nb, std::size_t bits) const {
    return (na * b_levels + nb) * atom_states + bits;
  }
};

Basis basis_of(const HilbertSpec& h) {
  const auto levels = static_cast<std::size_t>(h.fock_cutoff + 1);
  return {levels, h.modes == 2 ? levels : 1, std::size_t{1} << h.n_atoms};
}

Matrix as_matrix(std::span<const double> v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return Eigen::Map<const Matrix>(reinterpret_cast<const cplx*>(v.data()), d, d);
}

}  // namespace

std::size_t HilbertSpec::dim() const {
  std::size_t d = std::size_t{1} << n_atoms;
  for (int i = 0; i < modes; ++i) d *= static_cast<std::size_t>(fock_cutoff + 1);
  return d;
}

void validate(const HilbertSpec& h) {
  if (h.n_atoms < 0 || h.n_atoms > 3) throw ConfigError("oracle supports 0 to 3 atoms");
  if (h.fock_cutoff < 2) throw ConfigError("fock_cutoff must be >= 2");
  if (h.modes != 1 && h.modes != 2) throw ConfigError("oracle supports 1 or 2 cavity modes");
  if (h.positions.x.size() != static_cast<std::size_t>(h.n_atoms) ||
      h.positions.y.size() != static_cast<std::size_t>(h.n_atoms)) {
    throw ConfigError("oracle positions must list every atom");
  }
  if (h.dim() > h.dim_cap) {
    throw ConfigError("Hilbert space dimension " + std::to_string(h.dim()) + " exceeds cap " +
                      std::to_string(h.dim_cap));
  }
}

Operators build_operators(const HilbertSpec& h) {
  validate(h);
  const Basis B = basis_of(h);
  const std::size_t dim = h.dim();
  Operators ops;
  Triplets ta;
  Triplets tb;
  Triplets tid;
  for (std::size_t na = 0; na < B.levels; ++na) {
    for (std::size_t nb = 0; nb < B.b_levels; ++nb) {
      for (std::size_t bits = 0; bits < B.atom_states; ++bits) {
        const auto col = B.index(na, nb, bits);
        tid.emplace_back(col, col, 1.0);
        if (na > 0) ta.emplace_back(B.index(na - 1, nb, bits), col, std::sqrt(double(na)));
        if (nb > 0) tb.emplace_back(B.index(na, nb - 1, bits), col, std::sqrt(double(nb)));
      }
    }
  }
  ops.a = from_triplets(dim, ta);
  if (h.modes == 2) ops.b = from_triplets(dim, tb);
  ops.identity = from_triplets(dim, tid);
  for (int m = 0; m < h.n_atoms; ++m) {
    Triplets ts;
    const std::size_t mask = std::size_t{1} << m;
    for (std::size_t na = 0; na < B.levels; ++na) {
      for (std::size_t nb = 0; nb < B.b_levels; ++nb) {
        for (std::size_t bits = 0; bits < B.atom_states; ++bits) {
          if (bits & mask) ts.emplace_back(B.index(na, nb, bits & ~mask), B.index(na, nb, bits), 1.0);
        }
      }
    }
    ops.sm.push_back(from_triplets(dim, ts));
  }
  return ops;
}

Liouvillian::Liouvillian(const SystemParams& p, const HilbertSpec& h)
    : dim_(h.dim()), ops_(build_operators(h)) {
  if (h.modes == 2 && !p.delta_c2) throw ConfigError("two-mode oracle needs delta_c2");
  const SparseOp ad = adjoint(ops_.a);
  SparseOp H = -p.delta_c * (ad * ops_.a);
  for (int m = 0; m < h.n_atoms; ++m) {
    const SparseOp& sm = ops_.sm[m];
    const SparseOp sp = adjoint(sm);
    const double x = h.positions.x[m];
    const double y = h.positions.y[m];
    const double gm = coupling(p, x, y);
    const double om = pump_amplitude(p, y);
    H += -p.delta_a * (sp * sm);
    H += gm * (ops_.a * sp + ad * sm);
    H += om * (sp + sm);
    if (h.modes == 2) {
      const SparseOp bd = adjoint(ops_.b);
      H += filter_coupling(p, x, y) * (ops_.b * sp + bd * sm);
    }
  }
  if (h.modes == 2) H += -*p.delta_c2 * (adjoint(ops_.b) * ops_.b);
  hamiltonian_ = H;

  jumps_.push_back(std::sqrt(p.kappa) * ops_.a);
  if (h.modes == 2) jumps_.push_back(std::sqrt(p.kappa) * ops_.b);
  for (const auto& sm : ops_.sm) jumps_.push_back(std::sqrt(p.gamma) * sm);

  SparseOp decay = 0.0 * ops_.identity;
  for (const auto& l : jumps_) {
    jumps_adj_.push_back(adjoint(l));
    decay += jumps_adj_.back() * l;
  }
  h_eff_ = hamiltonian_ - 0.5 * kI * decay;
  h_eff_adj_ = adjoint(h_eff_);
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  Matrix out;
  apply(rho, out);
  return out;
}

void Liouvillian::apply(const Matrix& rho, Matrix& drho) const {
  drho.noalias() = -kI * (h_eff_ * rho);
  drho.noalias() += kI * (rho * h_eff_adj_);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    drho.noalias() += (jumps_[k] * rho) * jumps_adj_[k];
  }
}

Matrix product_density(const HilbertSpec& h, const ProductState& ps) {
  validate(h);
  const Basis B = basis_of(h);
  auto coherent = [&](cplx amp, std::size_t levels) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(levels));
    cplx c = std::exp(-0.5 * std::norm(amp));
    for (std::size_t n = 0; n < levels; ++n) {
      v[static_cast<Eigen::Index>(n)] = c;
      c *= amp / std::sqrt(double(n + 1));
    }
    return Eigen::VectorXcd(v / v.norm());
  };
  const Eigen::VectorXcd va = coherent(ps.alpha, B.levels);
  const Eigen::VectorXcd vb = coherent(ps.beta, B.b_levels);
  if (!ps.atoms.empty() && ps.atoms.size() != static_cast<std::size_t>(h.n_atoms)) {
    throw ConfigError("product state must give amplitudes for every atom");
  }
  std::vector<std::array<cplx, 2>> atoms(h.n_atoms, {cplx{1.0}, cplx{}});
  for (std::size_t m = 0; m < ps.atoms.size(); ++m) {
    const double norm = std::sqrt(std::norm(ps.atoms[m][0]) + std::norm(ps.atoms[m][1]));
    if (norm == 0.0) throw ConfigError("atomic amplitudes must not both vanish");
    atoms[m] = {ps.atoms[m][0] / norm, ps.atoms[m][1] / norm};
  }
  Eigen::VectorXcd psi(static_cast<Eigen::Index>(h.dim()));
  for (std::size_t na = 0; na < B.levels; ++na) {
    for (std::size_t nb = 0; nb < B.b_levels; ++nb) {
      for (std::size_t bits = 0; bits < B.atom_states; ++bits) {
        cplx amp = va[static_cast<Eigen::Index>(na)] * vb[static_cast<Eigen::Index>(nb)];
        for (int m = 0; m < h.n_atoms; ++m) amp *= atoms[m][(bits >> m) & 1u];
        psi[static_cast<Eigen::Index>(B.index(na, nb, bits))] = amp;
      }
    }
  }
  return psi * psi.adjoint();
}

cplx expect(const SparseOp& op, const Matrix& rho) {
  cplx sum{};
  for (Eigen::Index k = 0; k < op.outerSize(); ++k) {
    for (SparseOp::InnerIterator it(op, k); it; ++it) {
      sum += it.value() * rho(it.col(), it.row());
    }
  }
  return sum;
}

double expect_real(const SparseOp& op, const Matrix& rho) { return expect(op, rho).real(); }

std::vector<double> moments(const Operators& ops, const HilbertSpec& h, const Matrix& rho) {
  const StateLayout l(h.n_atoms, Closure::second_order, h.modes == 2);
  std::vector<double> s(l.size, 0.0);
  const StateRef st(l, s);
  const SparseOp ad = adjoint(ops.a);
  st.a() = expect(ops.a, rho);
  st.n_phot() = expect_real(ad * ops.a, rho);
  std::vector<SparseOp> sp;
  for (const auto& sm : ops.sm) sp.push_back(adjoint(sm));
  for (int m = 0; m < h.n_atoms; ++m) {
    st.sm()[m] = expect(ops.sm[m], rho);
    st.a_sp()[m] = expect(ops.a * sp[m], rho);
    st.pop()[m] = expect_real(sp[m] * ops.sm[m], rho);
    for (int j = m + 1; j < h.n_atoms; ++j) {
      st.pair()[l.pair_index(m, j)] = expect(sp[m] * ops.sm[j], rho);
    }
    st.x()[m] = h.positions.x[m];
    st.y()[m] = h.positions.y[m];
  }
  if (h.modes == 2) {
    st.b() = expect(ops.b, rho);
    st.n_phot_b() = expect_real(adjoint(ops.b) * ops.b, rho);
    for (int m = 0; m < h.n_atoms; ++m) st.b_sp()[m] = expect(ops.b * sp[m], rho);
    st.ab() = expect(ad * ops.b, rho);
  }
  return s;
}

DensityDiagnostics diagnose(const Matrix& rho) {
  DensityDiagnostics d;
  d.trace_error = std::abs(rho.trace() - cplx{1.0});
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Matrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

OracleSeries evolve_expectations(const SystemParams& p, const HilbertSpec& h,
                                 const ProductState& initial, double span,
                                 const IntegratorSettings& set, bool check_cutoff) {
  const Liouvillian L(p, h);
  const std::size_t dim = L.dim();
  const Matrix rho0 = product_density(h, initial);
  std::vector<double> flat(2 * dim * dim);
  std::copy_n(reinterpret_cast<const double*>(rho0.data()), flat.size(), flat.begin());

  auto rhs = [&L, dim](double, std::span<const double> s, std::span<double> ds) {
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::Map<const Matrix> rho(reinterpret_cast<const cplx*>(s.data()), d, d);
    Eigen::Map<Matrix> out(reinterpret_cast<cplx*>(ds.data()), d, d);
    Matrix tmp;
    L.apply(rho, tmp);
    out = tmp;
  };

  OracleSeries series;
  series.layout = StateLayout(h.n_atoms, Closure::second_order, h.modes == 2);
  series.worst.min_eigenvalue = 1.0;
  integrate(rhs, flat, 0.0, span, set, [&](double t, std::span<const double> s, bool) {
    const Matrix rho = as_matrix(s, dim);
    const DensityDiagnostics d = diagnose(rho);
    series.worst.trace_error = std::max(series.worst.trace_error, d.trace_error);
    series.worst.hermiticity_error = std::max(series.worst.hermiticity_error, d.hermiticity_error);
    series.worst.min_eigenvalue = std::min(series.worst.min_eigenvalue, d.min_eigenvalue);
    if (d.trace_error > kTraceTolerance || d.hermiticity_error > kHermiticityTolerance ||
        d.min_eigenvalue < kPositivityTolerance) {
      throw Error("density matrix left the physical set at t = " + std::to_string(t) +
                  " (trace error " + std::to_string(d.trace_error) + ", min eigenvalue " +
                  std::to_string(d.min_eigenvalue) + ")");
    }
    series.times.push_back(t);
    series.samples.push_back(moments(L.ops(), h, rho));
  });

  if (check_cutoff) {
    HilbertSpec bigger = h;
    bigger.fock_cutoff += 2;
    bigger.dim_cap = std::max(h.dim_cap, bigger.dim());
    const OracleSeries ref = evolve_expectations(p, bigger, initial, span, set, false);
    double peak = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < series.samples.size(); ++i) {
      const double n1 = series.samples[i][series.layout.n_phot];
      const double n2 = ref.samples[i][ref.layout.n_phot];
      peak = std::max(peak, std::abs(n2));
      diff = std::max(diff, std::abs(n1 - n2));
    }
    series.cutoff_sensitivity = peak > 0.0 ? diff / peak : 0.0;
    if (series.cutoff_sensitivity > kCutoffConvergenceLimit) {
      throw CutoffError("Fock cutoff " + std::to_string(h.fock_cutoff) +
                        " not converged: raising it by 2 changes <a+a> by " +
                        std::to_string(100.0 * series.cutoff_sensitivity) + " %");
    }
  }
  return series;
}

namespace {

struct Accessor {
  std::string name;
  bool complex = false;
  std::size_t oracle_off = 0;
  std::size_t cumulant_off = 0;
  bool mean_field_photons = false;  // cumulant side stores <a>, photons = |<a>|^2
  bool mean_field_filter = false;
};

bool is_gated(const std::string& name, const Tolerance& tol) {
  return std::any_of(tol.gated.begin(), tol.gated.end(),
                     [&](const std::string& prefix) { return name.rfind(prefix, 0) == 0; });
}

}  // namespace

ComparisonReport compare_to_cumulant(const OracleSeries& oracle, const StateLayout& layout,
                                     const std::vector<double>& times,
                                     const std::vector<std::vector<double>>& samples,
                                     const Tolerance& tol) {
  const StateLayout& ol = oracle.layout;
  if (layout.n_atoms != ol.n_atoms) throw Error("atom numbers differ");
  if (times.size() != oracle.times.size() || samples.size() != times.size()) {
    throw Error("time grids differ in length");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (std::abs(times[i] - oracle.times[i]) > 1e-9 * std::max(1.0, std::abs(times[i]))) {
      throw Error("time grids differ at sample " + std::to_string(i));
    }
  }

  std::vector<Accessor> acc;
  acc.push_back({"a", true, ol.a, layout.a});
  acc.push_back({"n_phot", false, ol.n_phot, layout.second_order() ? layout.n_phot : layout.a,
                 !layout.second_order()});
  for (int m = 0; m < ol.n_atoms; ++m) {
    const std::string s = std::to_string(m);
    acc.push_back({"sm_" + s, true, ol.sm + 2 * m, layout.sm + 2 * m});
    acc.push_back({"pop_" + s, false, ol.pop + m, layout.pop + m});
    if (layout.second_order()) {
      acc.push_back({"a_sp_" + s, true, ol.a_sp + 2 * m, layout.a_sp + 2 * m});
    }
  }
  if (layout.second_order()) {
    for (int m = 0; m < ol.n_atoms; ++m) {
      for (int j = m + 1; j < ol.n_atoms; ++j) {
        acc.push_back({"pair_" + std::to_string(m) + "_" + std::to_string(j), true,
                       ol.pair + 2 * ol.pair_index(m, j), layout.pair + 2 * layout.pair_index(m, j)});
      }
    }
  }
  if (ol.two_mode && layout.two_mode) {
    acc.push_back({"b", true, ol.b, layout.b});
    acc.push_back({"n_phot_b", false, ol.n_phot_b,
                   layout.second_order() ? layout.n_phot_b : layout.b, false,
                   !layout.second_order()});
  }

  ComparisonReport report;
  for (const auto& a : acc) {
    VariableError ve;
    ve.name = a.name;
    ve.gated = is_gated(a.name, tol);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const auto& o = oracle.samples[i];
      const auto& c = samples[i];
      cplx ov{o[a.oracle_off], a.complex ? o[a.oracle_off + 1] : 0.0};
      cplx cv;
      if (a.mean_field_photons || a.mean_field_filter) {
        cv = std::norm(cplx{c[a.cumulant_off], c[a.cumulant_off + 1]});
      } else {
        cv = {c[a.cumulant_off], a.complex ? c[a.cumulant_off + 1] : 0.0};
      }
      const double err = std::abs(cv - ov);
      const double mag = std::abs(ov);
      ve.max_abs_error = std::max(ve.max_abs_error, err);
      ve.max_rel_error = std::max(ve.max_rel_error, err / std::max(mag, tol.abs_floor));
      if (err > std::max(tol.rel * mag, tol.abs_floor)) ve.pass = false;
    }
    if (ve.gated) {
      report.pass = report.pass && ve.pass;
      report.gated_score = std::max(report.gated_score, ve.max_rel_error);
    }
    report.variables.push_back(ve);
  }
  return report;
}

ValidationRun validate_config(const Config& c, const ValidationOptions& opt) {
  SystemParams p = c.system;
  validate(p);
  if (p.init_n_phot != 0.0) throw ConfigError("oracle validation starts from vacuum (init_n_phot = 0)");
  p.pin_atoms = true;
  ValidationRun run;
  run.layout = layout_for(p, c.engine);
  const std::vector<double> s0 = init_state(p, run.layout);

  HilbertSpec h;
  h.n_atoms = p.n_atoms;
  h.modes = p.two_mode() ? 2 : 1;
  h.fock_cutoff = opt.fock_cutoff;
  h.positions = positions_of(run.layout, s0);
  validate(h);

  // Positivity is asserted at 1e-8, so the density matrix is integrated well
  // below that level; near-pure states otherwise pick up spurious negative
  // eigenvalues from the local error alone.
  IntegratorSettings exact = c.integrator;
  exact.rel_tol = std::min(exact.rel_tol, 1e-9);
  exact.abs_tol = std::min(exact.abs_tol, 1e-12);
  run.oracle = evolve_expectations(p, h, ProductState{}, p.t_final, exact, opt.check_cutoff);
  run.cumulant = integrate(make_rhs(p, run.layout), s0, p.t_final, c.integrator,
                           physicality_check(run.layout));
  run.report = compare_to_cumulant(run.oracle, run.layout, run.cumulant.times,
                                   run.cumulant.samples, opt.tol);
  return run;
}

}  // namespace cavsim::oracle
