#ifndef ADIA_NEWTON_HPP
#define ADIA_NEWTON_HPP

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "adia/strip.hpp"

namespace adia {

enum class SolveStatus { converged, diverged, singular_jacobian };

struct SolveReport {
  SolveStatus status = SolveStatus::diverged;
  double residual_norm = 0.0;  // discrete L2 norm of the stacked residual
  int newton_iters = 0;
  double energy = 0.0;  // omega-energy of the final field
  double sup_dQ = 0.0;
  double sup_dP = 0.0;
  bool singular_flag = false;
  std::string message;

  bool converged() const { return status == SolveStatus::converged; }
};

struct SolverOptions {
  double res_tol = 1e-9;
  int max_iters = 50;
  EquationMode mode = EquationMode::plain_cr;
  double armijo_c = 1e-4;
  double min_step = 1.0 / 1024.0;  // backtracking floor 2^-10
  int continuation_rungs = 8;      // geometric eps ladder from 0
};

/// Dirichlet arcs at s = -r (left) and s = +r (right); size Nt+1 each.
struct EndData {
  std::vector<Vec2> q_left, p_left, q_right, p_right;

  static EndData from_field(const StripField& u);
};

/// Damped Newton on the stacked residual (graph rows, Dirichlet ends, CR
/// equations elsewhere; same stencils as cr_residual). The Jacobian is
/// assembled sparse from the analytic linearization; Christoffel derivatives
/// use a small finite-difference step since charts expose only dg.
std::pair<StripField, SolveReport> solve_strip(const MetricChart& chart, const AdiabaticData& bc,
                                               const EndData& end, const StripField& init,
                                               const SolverOptions& opts = {});

/// Floer-seeded driver: seed and end arcs from adiabatic_seed(q0).
std::pair<StripField, SolveReport> solve_floer_seeded(const MetricChart& chart,
                                                      const AdiabaticData& bc, double r, int Ns,
                                                      int Nt, const Vec2& q0,
                                                      const SolverOptions& opts = {});

/// Dirichlet driver without an initial guess: continuation from eps = 0 in
/// `continuation_rungs` geometric steps; the P arcs are rescaled with eps at
/// every rung so the corner data stays graph-compatible.
std::pair<StripField, SolveReport> solve_with_continuation(const MetricChart& chart,
                                                           const AdiabaticData& bc,
                                                           const EndData& end, double r, int Ns,
                                                           int Nt, const SolverOptions& opts = {});

/// Assemble the stacked residual and sparse Jacobian at a given field state
/// (diagnostics and consistency tests).
std::pair<Eigen::VectorXd, Eigen::SparseMatrix<double>> assemble_system(
    const MetricChart& chart, const AdiabaticData& bc, const EndData& end, const StripField& at,
    const SolverOptions& opts = {});

}  // namespace adia

#endif
