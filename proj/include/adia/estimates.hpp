#ifndef ADIA_ESTIMATES_HPP
#define ADIA_ESTIMATES_HPP

#include <vector>

#include "adia/strip.hpp"

namespace adia {

// Poincare constant for boundary-vanishing sections and the induced rate:
// delta^2 = 1/(3 c_pc).
constexpr double kPoincareConst = 0.25;
constexpr double kDeltaSq = 4.0 / 3.0;

using CovectorGrid = std::array<Eigen::ArrayXXd, 2>;

/// P~ = P - eps*t*(b o Q) - eps*(1-t)*(a o Q) with b = a + df.
/// Vanishes on the rows t=0 and t=1 for boundary-feasible fields.
CovectorGrid perturbed_section(const MetricChart& chart, const StripField& u,
                               const AdiabaticData& bc);

/// Covariant derivative of a covector field along the strip's base map
/// (direction s when along_s, else t); shared stencils with cr_residual.
CovectorGrid grid_covariant(const MetricChart& chart, const StripField& u,
                            const CovectorGrid& field, bool along_s);

/// Levi-Civita Laplacian nabla_s nabla_s + nabla_t nabla_t by nested
/// covariant differences; meaningful at interior nodes.
CovectorGrid lc_laplacian(const MetricChart& chart, const StripField& u,
                          const CovectorGrid& field);

/// W^{1,2} norm (covector metric g^{-1}) of a field over the strip.
double field_w12_norm(const MetricChart& chart, const StripField& u, const CovectorGrid& field);
double field_l2_norm(const MetricChart& chart, const StripField& u, const CovectorGrid& field);

struct GammaProfile {
  std::vector<double> s;  // full s grid of the strip
  std::vector<double> gamma, dgamma, ddgamma, dirichlet;
  double delta = 0.0;
  double eps = 0.0;
  double R = 0.0;              // half-length of the inequality conclusion window
  int window_lo = 0, window_hi = 0;  // node range of [-R-0.75, R+0.75]
  double measured_K = 0.0;     // smallest K making the differential inequality hold
  double slack = 0.0;          // min of gamma'' - delta^2 gamma - dirichlet/3 + K eps^2
  double C1 = 0.0, C2 = 0.0, C3 = 0.0;
};

struct EstimateReport {
  bool inequality_holds = false;
  double measured_K = 0.0;
  std::vector<double> envelope;  // per node of [-R, R]
  std::vector<double> lhs;       // gamma + int of dirichlet/3 over the half-unit window
  int window_lo = 0, window_hi = 0;
  int violations = 0;
  double c1_kappa = 0.0;
  double d_rate = 0.0;
};

/// gamma(s) = 1/2 int |P~|^2 dt plus its coarsened-stencil derivatives, the
/// per-s Dirichlet integrand, the measured inequality constant K, and the
/// envelope constants C1 = 9 gamma(-R-0.75), C2 = 9|dgamma+delta*gamma|(R+0.75)/(2 delta),
/// C3 = 9/delta^2 + 5/4. Throws GridError for strips shorter than 2.5 units.
GammaProfile gamma_profile(const MetricChart& chart, const StripField& u, const AdiabaticData& bc,
                           double delta = std::sqrt(kDeltaSq));

/// Verifies gamma(s) + int_{s-1/2}^{s+1/2} dirichlet/3 <= C1 e^{-delta(R+s)}
/// + C2 e^{-delta(R-s)} + C3 K eps^2 on [-R, R]; violations are counted,
/// never thrown.
EstimateReport check_decay_bound(const GammaProfile& profile, double R);

/// Pointwise C^1 envelope: the smallest kappa with
/// max_t(|P~| + |nabla_s P~| + |nabla_t P~|) <= kappa (e^{-d(R+s)} + e^{-d(R-s)} + eps)
/// over [-R, R]. Default rate d = delta/2.
double c1_envelope(const MetricChart& chart, const StripField& u, const AdiabaticData& bc,
                   double R, double d_rate = 0.5 * std::sqrt(kDeltaSq));

}  // namespace adia

#endif
