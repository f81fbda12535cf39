#ifndef ADIA_LAB_HPP
#define ADIA_LAB_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adia/estimates.hpp"
#include "adia/morse_flow.hpp"
#include "adia/newton.hpp"
#include "adia/strip.hpp"

namespace adia {

/// A strip viewed through v(s,t) = u(s/eps, t/eps): same grid, coordinates
/// scaled onto [-ell, ell] x [0, eps]. Pure reindexing, no interpolation.
struct RescaledField {
  StripField field;
  double eps = 1.0;
  double ell = 0.0;

  double sigma_of(int i) const { return eps * field.s_of(i); }
};

RescaledField rescale(const StripField& u, double eps);

enum class ComparisonMode { finite_flow, broken_flow };

/// Max over grid nodes of the torus distance between pr(v) and the reference
/// path. Finite mode evaluates the path at sigma = s + ell (shift 0
/// convention, first sample anchored at the left end); broken mode matches
/// columns to the path polyline with a monotone index assignment.
double sup_dist_to_flow(const MetricChart& chart, const RescaledField& v, const FlowPath& path,
                        ComparisonMode mode = ComparisonMode::finite_flow);

struct SweepConfig {
  std::vector<double> eps_ladder;  // strictly decreasing
  double ell = 2.0;
  int ns_per_unit = 12;  // Ns grows proportionally to r = ell/eps
  int nt = 24;
  Vec2 q0 = Vec2::Zero();  // x_- anchor for the end arcs
  ComparisonMode mode = ComparisonMode::finite_flow;
  SolverOptions solver;
  std::optional<double> hbar;  // default: half the Morse energy gap
  int jobs = 1;                // worker pool bound for row post-processing
};

struct SweepRow {
  double eps = 0.0, r = 0.0;
  int Ns = 0, Nt = 0;
  bool converged = false;
  int newton_iters = 0;
  double residual = 0.0;
  double sup_dist = 0.0;
  double energy = 0.0;
  double stokes = 0.0;
  double morse_energy = 0.0;
  double measured_K = 0.0;
  double measured_kappa = 0.0;
  double runtime_s = 0.0;  // volatile; excluded from data artifacts
};

struct ConvergenceTable {
  std::vector<SweepRow> rows;
  bool trend_ok = false;  // sup_dist strictly decreasing within 10% slack
  double hbar = 0.0;
  std::string note;
};

struct SweepResult {
  ConvergenceTable table;
  std::vector<StripField> fields;
  std::vector<SolveReport> reports;
  std::vector<GammaProfile> profiles;
  std::vector<FlowPath> references;
};

/// Solve the eps ladder (continuation-seeded down the ladder), rescale each
/// solution, compare to the flow line anchored at the x_- end, and collect
/// energies and measured estimate constants.
SweepResult run_sweep(const MetricChart& chart, const OneForm& a_form, const MorseData& f,
                      const SweepConfig& config);

struct EnergyInterval {
  double s_lo = 0.0, s_hi = 0.0;
  bool high = false;
};

/// Sliding-window omega-energy decomposition: maximal intervals where the
/// window energy reaches hbar are high, the complement low; adjacent
/// same-class intervals merged, so classes alternate and cover the domain.
std::vector<EnergyInterval> energy_decompose(const MetricChart& chart, const StripField& u,
                                             double window, double hbar);

struct ExtractOptions {
  double plateau_min = 2.0;     // rescaled s-length (2/eps unrescaled)
  double speed_tol_factor = 0.05;  // fraction of the max flow speed
  double match_tol = 1e-3;      // plateau-to-critical identification
};

/// Detect critical plateaus of a rescaled long strip and assemble the broken
/// flow line they bound. Throws InconsistentLimitError when a plateau sits at
/// a non-critical location.
FlowPath extract_broken(const MetricChart& chart, const RescaledField& v, const MorseData& f,
                        const ExtractOptions& opts = {});

/// Morse energy of a rescaled window [a,b]: omega-energy over the matching
/// columns divided by eps.
double morse_energy(const MetricChart& chart, const RescaledField& v, double a, double b);

}  // namespace adia

#endif
