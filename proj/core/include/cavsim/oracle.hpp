#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cavsim/config.hpp"
#include "cavsim/integrator.hpp"
#include "cavsim/layout.hpp"
#include "cavsim/params.hpp"

namespace cavsim::oracle {

using Matrix = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<cplx>;

struct HilbertSpec {
  int n_atoms = 1;
  int fock_cutoff = 10;  // highest Fock state kept, per mode
  int modes = 1;
  PositionsSnapshot positions;  // pinned atoms
  std::size_t dim_cap = 4096;

  std::size_t dim() const;
};

// Throws ConfigError when the spec is inconsistent or over the dimension cap.
void validate(const HilbertSpec& h);

// Operators on cavity Fock space(s) tensored with N two-level atoms. Basis
// index = (n_a * (cutoff+1) + n_b) * 2^N + bits, bit m set for excited atom m.
struct Operators {
  SparseOp a;
  SparseOp b;  // empty for a single mode
  std::vector<SparseOp> sm;
  SparseOp identity;
};

Operators build_operators(const HilbertSpec& h);

// rho -> -i[H, rho] + L_kappa[rho] + L_Gamma[rho], with the filter mode and
// its decay included when h.modes == 2 (requires p.delta_c2).
class Liouvillian {
 public:
  Liouvillian(const SystemParams& p, const HilbertSpec& h);

  Matrix apply(const Matrix& rho) const;
  void apply(const Matrix& rho, Matrix& drho) const;

  const Operators& ops() const { return ops_; }
  const SparseOp& hamiltonian() const { return hamiltonian_; }
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_ = 0;
  Operators ops_;
  SparseOp hamiltonian_;
  SparseOp h_eff_;      // H - (i/2) sum_k L_k^+ L_k
  SparseOp h_eff_adj_;
  std::vector<SparseOp> jumps_;
  std::vector<SparseOp> jumps_adj_;
};

inline Liouvillian build_generator(const SystemParams& p, const HilbertSpec& h) {
  return Liouvillian(p, h);
}

// Pure product state: coherent main mode, coherent filter mode, and per-atom
// amplitudes {c_ground, c_excited} (normalized internally).
struct ProductState {
  cplx alpha{};
  cplx beta{};
  std::vector<std::array<cplx, 2>> atoms;  // empty: all ground
};

Matrix product_density(const HilbertSpec& h, const ProductState& ps);

double expect_real(const SparseOp& op, const Matrix& rho);
cplx expect(const SparseOp& op, const Matrix& rho);

// Expectation values in the cumulant state layout (second order, two-mode
// tail when modes == 2); positions filled from the spec, momenta zero.
std::vector<double> moments(const Operators& ops, const HilbertSpec& h, const Matrix& rho);

struct DensityDiagnostics {
  double trace_error = 0.0;      // max |tr rho - 1|
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

inline constexpr double kTraceTolerance = 1e-8;
inline constexpr double kHermiticityTolerance = 1e-10;
inline constexpr double kPositivityTolerance = -1e-8;

DensityDiagnostics diagnose(const Matrix& rho);

struct OracleSeries {
  StateLayout layout;
  std::vector<double> times;
  std::vector<std::vector<double>> samples;
  DensityDiagnostics worst;
  // Max relative change of <a+a> when the cutoff is raised by 2; negative when
  // the check was not run.
  double cutoff_sensitivity = -1.0;
};

inline constexpr double kCutoffConvergenceLimit = 0.01;

class CutoffError : public Error {
 public:
  using Error::Error;
};

// Integrates the master equation from rho0 and records moments at every
// sample time. Throws Error when a DensityState invariant is violated and,
// if check_cutoff, CutoffError when raising the cutoff by 2 moves <a+a> by
// more than 1 %.
OracleSeries evolve_expectations(const SystemParams& p, const HilbertSpec& h,
                                 const ProductState& initial, double span,
                                 const IntegratorSettings& set, bool check_cutoff = true);

struct Tolerance {
  double rel = 0.05;
  double abs_floor = 1e-4;
  // Variables whose names start with one of these prefixes decide pass/fail.
  std::vector<std::string> gated = {"n_phot", "pop"};
};

struct VariableError {
  std::string name;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  // |c - o| / max(|o|, abs_floor)
  bool gated = false;
  bool pass = true;
};

struct ComparisonReport {
  std::vector<VariableError> variables;
  bool pass = true;
  // Largest max_rel_error among gated variables.
  double gated_score = 0.0;
};

// Compares a cumulant trajectory (any closure) with oracle moments on the
// same time grid. Variables: a, sm_m, n_phot, pop_m, and for second-order
// input also a_sp_m and pair_m_j; filter-mode b and n_phot_b when present.
// Throws Error on mismatched grids.
ComparisonReport compare_to_cumulant(const OracleSeries& oracle, const StateLayout& layout,
                                     const std::vector<double>& times,
                                     const std::vector<std::vector<double>>& samples,
                                     const Tolerance& tol = {});

struct ValidationOptions {
  int fock_cutoff = 10;
  bool check_cutoff = true;
  Tolerance tol;
};

struct ValidationRun {
  OracleSeries oracle;
  StateLayout layout;  // cumulant layout (c.engine)
  Trajectory cumulant;
  ComparisonReport report;
};

// Cumulant engine of `c` against the exact master equation over [0, t_final]
// on the sample grid, atoms pinned at their seeded initial positions, starting
// from vacuum and ground states. Requires n_atoms <= 3 and init_n_phot = 0.
ValidationRun validate_config(const Config& c, const ValidationOptions& opt = {});

}  // namespace cavsim::oracle
