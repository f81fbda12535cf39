#include <cmath>

#include "doctest.h"

#include "adia/estimates.hpp"
#include "adia/newton.hpp"
#include "test_util.hpp"

using namespace adia;
using adia::test::Rng;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::pair<StripField, AdiabaticData> solved_reference(const MetricChart& chart, double eps,
                                                      double r, int Ns, int Nt) {
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.1, 1, 0.0), eps};
  auto [u, rep] = solve_floer_seeded(chart, bc, r, Ns, Nt, Vec2(0.1, 0.0));
  REQUIRE(rep.converged());
  return {u, bc};
}
}  // namespace

TEST_CASE("perturbed section: eps = 0 identity and vanishing boundary rows") {
  MetricChart chart = chart_flat(1);
  MorseData f = morse_cosine_1d(0.3, 1, 0.0);

  StripField u = floer_oracle(chart, f, Vec2(0.2, 0.0), 2.0, 40, 10);
  AdiabaticData zero{aform_zero(), f, 0.0};
  CovectorGrid pt = perturbed_section(chart, u, zero);
  CHECK((pt[0] - u.p[0]).abs().maxCoeff() == 0.0);

  // oracle with eps = 1: P~ vanishes identically since Q is t-independent
  AdiabaticData unit{aform_zero(), f, 1.0};
  CovectorGrid pt1 = perturbed_section(chart, u, unit);
  CHECK(pt1[0].abs().maxCoeff() < 1e-15);
}

TEST_CASE("perturbed section boundary rows vanish on a solved strip") {
  auto [u, bc] = solved_reference(chart_flat(1), 0.1, 5.0, 100, 12);
  CovectorGrid pt = perturbed_section(chart_flat(1), u, bc);
  for (int i = 0; i <= u.Ns; ++i) {
    CHECK(std::abs(pt[0](i, 0)) < 1e-12);
    CHECK(std::abs(pt[0](i, u.Nt)) < 1e-12);
  }
}

TEST_CASE("poincare inequality with c_pc = 1/4 on random boundary-vanishing sections") {
  MetricChart chart = chart_diag_perturbed_2d(0.1);
  Rng rng(41);
  const int nt = 128;
  const double ht = 1.0 / nt;
  int violations = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Vec2> Q(nt + 1), P(nt + 1);
    double a1 = rng.uniform(-0.3, 0.3), a2 = rng.uniform(-0.3, 0.3);
    double ph = rng.uniform(0, 1);
    Vec2 b[3];
    for (int k = 0; k < 3; ++k) b[k] = rng.vec(2, 0.5);
    for (int j = 0; j <= nt; ++j) {
      double t = j * ht;
      Q[j] = Vec2(0.5 + a1 * std::sin(kTwoPi * t + ph), 0.5 + a2 * std::cos(kTwoPi * t));
      P[j] = Vec2::Zero();
      for (int k = 0; k < 3; ++k) P[j] += std::sin((k + 1) * M_PI * t) * b[k];
    }
    auto cov = covariant_t(chart, Q, P, ht);
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j <= nt; ++j) {
      double w = (j == 0 || j == nt) ? 0.5 : 1.0;
      lhs += w * chart.conorm2(Q[j], P[j]) * ht;
      rhs += w * chart.conorm2(Q[j], cov[j]) * ht;
    }
    if (lhs > kPoincareConst * rhs + 10.0 * ht * ht * (lhs + rhs)) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("gamma profile of the constant zero-section strip") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  StripField u(4.0, 80, 10);
  for (int i = 0; i <= 80; ++i)
    for (int j = 0; j <= 10; ++j) u.setQ(i, j, Vec2(0.3, 0.0));
  GammaProfile prof = gamma_profile(chart, u, bc);
  for (double g : prof.gamma) CHECK(g == 0.0);
  CHECK(prof.measured_K == 0.0);
  CHECK(prof.delta == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-15));
  CHECK(prof.C3 == doctest::Approx(8.0).epsilon(1e-15));  // 9/delta^2 + 5/4 at delta^2 = 4/3

  EstimateReport rep = check_decay_bound(prof, prof.R);
  CHECK(rep.violations == 0);
  for (double e : rep.envelope) CHECK(e >= 0.0);
}

TEST_CASE("gamma profile rejects short strips") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  StripField u(1.0, 20, 8);
  CHECK_THROWS_AS(gamma_profile(chart, u, bc), GridError);
}

TEST_CASE("gamma is nonnegative and the decay bound holds on a solved strip") {
  MetricChart chart = chart_flat(1);
  auto [u, bc] = solved_reference(chart, 0.1, 10.0, 200, 16);
  GammaProfile prof = gamma_profile(chart, u, bc);
  for (double g : prof.gamma) CHECK(g >= 0.0);
  EstimateReport rep = check_decay_bound(prof, prof.R);
  CHECK(rep.violations == 0);
}

TEST_CASE("measured K and kappa shrink when eps halves") {
  MetricChart chart = chart_flat(1);
  auto [u1, bc1] = solved_reference(chart, 0.1, 10.0, 200, 16);
  auto [u2, bc2] = solved_reference(chart, 0.05, 10.0, 200, 16);
  GammaProfile p1 = gamma_profile(chart, u1, bc1);
  GammaProfile p2 = gamma_profile(chart, u2, bc2);
  CHECK(p2.measured_K <= 1.1 * p1.measured_K);
  double k1 = c1_envelope(chart, u1, bc1, p1.R);
  double k2 = c1_envelope(chart, u2, bc2, p2.R);
  CHECK(k2 <= 1.1 * k1);
}

TEST_CASE("levi-civita laplacian: flat closed form and constants") {
  MetricChart chart = chart_flat(1);
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    int n = 16 << level;
    StripField u(1.0, n, n);
    CovectorGrid field;
    field[0] = Eigen::ArrayXXd::Zero(n + 1, n + 1);
    field[1] = Eigen::ArrayXXd::Zero(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        u.setQ(i, j, Vec2(0.4, 0.0));
        field[0](i, j) = std::sin(M_PI * u.t_of(j));
      }
    CovectorGrid lap = lc_laplacian(chart, u, field);
    double worst = 0.0;
    for (int i = 4; i <= n - 4; ++i)
      for (int j = 4; j <= n - 4; ++j)
        worst =
            std::max(worst, std::abs(lap[0](i, j) + M_PI * M_PI * std::sin(M_PI * u.t_of(j))));
    if (level > 0) CHECK(std::log2(prev / worst) > 1.8);
    prev = worst;
  }

  // constant section along a constant path
  StripField u(1.0, 16, 16);
  CovectorGrid field;
  field[0] = Eigen::ArrayXXd::Constant(17, 17, 0.7);
  field[1] = Eigen::ArrayXXd::Zero(17, 17);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j <= 16; ++j) u.setQ(i, j, Vec2(0.25, 0.0));
  CovectorGrid lap = lc_laplacian(chart, u, field);
  CHECK(lap[0].abs().maxCoeff() < 1e-12);
}

TEST_CASE("laplacian of the perturbed section obeys the remainder structure") {
  // || lap P~ || <= K' (eps + ||P~||_W12) with K' shrinking as eps halves
  MetricChart chart = chart_flat(1);
  double prev_ratio = 0.0;
  int level = 0;
  for (double eps : {0.1, 0.05}) {
    auto [u, bc] = solved_reference(chart, eps, 10.0, 200, 16);
    CovectorGrid pt = perturbed_section(chart, u, bc);
    // restrict to the conclusion window to avoid one-sided edge noise
    CovectorGrid lap = lc_laplacian(chart, u, pt);
    double num = field_l2_norm(chart, u, lap);
    double den = eps + field_w12_norm(chart, u, pt);
    double ratio = num / den;
    if (level > 0) CHECK(ratio <= 1.1 * prev_ratio);
    prev_ratio = ratio;
    ++level;
  }
}

TEST_CASE("decay bound holds on a stronger-field strip") {
  MetricChart chart = chart_conformal_1d(0.1, 0.2);
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.25, 1, 0.0), 0.15};
  auto [u, rep] = solve_floer_seeded(chart, bc, 10.0, 240, 24, Vec2(0.1, 0.0));
  REQUIRE(rep.converged());
  GammaProfile prof = gamma_profile(chart, u, bc);
  EstimateReport er = check_decay_bound(prof, prof.R);
  CHECK(er.violations == 0);
  CHECK(prof.measured_K > 0.0);
  // the measured K is the smallest constant: the inequality binds somewhere
  CHECK(std::abs(prof.slack) < 1e-12);
}

TEST_CASE("negative control: an inflated profile is flagged") {
  // synthetic gamma with an interior bump far above its envelope
  GammaProfile prof;
  const int n = 200;
  prof.delta = std::sqrt(kDeltaSq);
  prof.eps = 0.1;
  prof.R = 4.0;
  prof.s.resize(n + 1);
  prof.gamma.resize(n + 1);
  prof.dgamma.assign(n + 1, 0.0);
  prof.ddgamma.assign(n + 1, 0.0);
  prof.dirichlet.assign(n + 1, 0.0);
  for (int i = 0; i <= n; ++i) {
    double s = -5.0 + 10.0 * i / n;
    prof.s[i] = s;
    prof.gamma[i] = 1e-6 + 0.5 * std::exp(-s * s);  // big interior bump
  }
  prof.measured_K = 0.0;
  prof.slack = -1.0;  // the bump breaks the differential inequality at K = 0
  prof.C1 = 9.0 * prof.gamma[0];
  prof.C2 = 9.0 * prof.gamma[n];
  prof.C3 = 8.0;
  EstimateReport er = check_decay_bound(prof, prof.R);
  CHECK(er.violations > 0);
  CHECK_FALSE(er.inequality_holds);
}

TEST_CASE("negative control: sections that keep a boundary value escape the bound") {
  // constant nonzero sections violate the boundary-vanishing hypothesis and
  // the inequality: int |P|^2 > c_pc int |nabla_t P|^2 = O(curvature terms)
  MetricChart chart = chart_flat(1);
  const int nt = 64;
  const double ht = 1.0 / nt;
  std::vector<Vec2> Q(nt + 1, Vec2(0.3, 0.0)), P(nt + 1, Vec2(0.7, 0.0));
  auto cov = covariant_t(chart, Q, P, ht);
  double lhs = 0.0, rhs = 0.0;
  for (int j = 0; j <= nt; ++j) {
    double w = (j == 0 || j == nt) ? 0.5 : 1.0;
    lhs += w * chart.conorm2(Q[j], P[j]) * ht;
    rhs += w * chart.conorm2(Q[j], cov[j]) * ht;
  }
  CHECK(lhs > kPoincareConst * rhs + 1e-3);
}

TEST_CASE("c1 envelope: zero section and s-symmetry") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  StripField u(4.0, 80, 10);
  for (int i = 0; i <= 80; ++i)
    for (int j = 0; j <= 10; ++j) u.setQ(i, j, Vec2(0.1, 0.0));
  CHECK(c1_envelope(chart, u, bc, 3.0) == 0.0);

  // s-symmetric data: kappa is invariant under s -> -s reindexing
  auto [v, bc2] = solved_reference(chart, 0.1, 5.0, 100, 12);
  StripField w = v;
  for (int i = 0; i <= v.Ns; ++i)
    for (int j = 0; j <= v.Nt; ++j) {
      w.q[0](i, j) = v.q[0](v.Ns - i, j);
      w.p[0](i, j) = v.p[0](v.Ns - i, j);
    }
  double kv = c1_envelope(chart, v, bc2, 4.0);
  double kw = c1_envelope(chart, w, bc2, 4.0);
  CHECK(kv == doctest::Approx(kw).epsilon(1e-10));
}
