#include <cmath>

#include "doctest.h"

#include "adia/strip.hpp"
#include "test_util.hpp"

using namespace adia;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

StripField constant_zero_section(double r, int Ns, int Nt, const Vec2& q) {
  StripField u(r, Ns, Nt);
  for (int i = 0; i <= Ns; ++i)
    for (int j = 0; j <= Nt; ++j) u.setQ(i, j, q);
  return u;
}

// q + i p = s + i t restricted to the grid (flat chart)
StripField flat_annulus(double r, int Ns, int Nt) {
  StripField u(r, Ns, Nt);
  for (int i = 0; i <= Ns; ++i)
    for (int j = 0; j <= Nt; ++j) {
      u.setQ(i, j, Vec2(u.s_of(i), 0.0));
      u.setP(i, j, Vec2(u.t_of(j), 0.0));
    }
  return u;
}

// q + i p = 0.2 exp(s + i t): a genuinely curved holomorphic map
StripField exp_map(double r, int Ns, int Nt) {
  StripField u(r, Ns, Nt);
  for (int i = 0; i <= Ns; ++i)
    for (int j = 0; j <= Nt; ++j) {
      double es = 0.2 * std::exp(u.s_of(i));
      u.setQ(i, j, Vec2(es * std::cos(u.t_of(j)), 0.0));
      u.setP(i, j, Vec2(es * std::sin(u.t_of(j)), 0.0));
    }
  return u;
}

}  // namespace

TEST_CASE("constant zero-section map has exactly zero residual") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  StripField u = constant_zero_section(2.0, 20, 10, Vec2(0.3, 0.0));
  ResidualField res = cr_residual(chart, u, bc);
  CHECK(res.interior_max(1) == 0.0);  // stencils annihilate constants exactly
  CHECK(res.boundary_max(1) == 0.0);
}

TEST_CASE("flat annulus solves the discrete CR system to machine precision") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  StripField u = flat_annulus(0.5, 40, 40);
  ResidualField res = cr_residual(chart, u, bc);
  CHECK(res.interior_max(1) < 1e-12);  // all stencils are exact on linear data
}

TEST_CASE("curved holomorphic map has O(h^2) residual") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    int n = 20 << level;
    StripField u = exp_map(0.5, n, n);
    double m = cr_residual(chart, u, bc).interior_max(1);
    if (level > 0) CHECK(std::log2(prev / m) > 1.8);
    prev = m;
  }
}

TEST_CASE("floer oracle: critical start, monotonicity, boundary containment") {
  MetricChart chart = chart_flat(1);
  MorseData f = morse_cosine_1d(0.5, 1, 0.0);

  StripField at_cp = floer_oracle(chart, f, Vec2(0.5, 0.0), 2.0, 40, 10);
  for (int i = 0; i <= 40; ++i) {
    CHECK(at_cp.q[0](i, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(at_cp.p[0](i, 10)) < 1e-14);
  }

  StripField u = floer_oracle(chart, f, Vec2(0.1, 0.0), 10.0, 200, 10);
  for (int i = 0; i < 200; ++i) CHECK(u.q[0](i + 1, 0) >= u.q[0](i, 0));  // ascends to 1/2
  CHECK(u.q[0](200, 0) <= 0.5 + 1e-12);
  for (int i = 0; i <= 200; ++i) {
    CHECK(u.p[0](i, 0) == 0.0);  // bottom row on the zero section
    CHECK(u.p[0](i, 10) == doctest::Approx(f.df(u.Q(i, 10))[0]).epsilon(1e-15));
  }
}

TEST_CASE("floer oracle satisfies the modified equation at second order") {
  MetricChart chart = chart_conformal_1d(0.2, 0.15);
  MorseData f = morse_cosine_1d(0.5, 1, 0.3);
  AdiabaticData bc{aform_zero(), f, 1.0};
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    int ns = 40 << level, nt = 8 << level;
    StripField u = floer_oracle(chart, f, Vec2(0.1, 0.0), 1.0, ns, nt);
    StripField twisted = floer_twist(u, f, 1.0, +1);
    double m = cr_residual(chart, twisted, bc, EquationMode::floer_modified).interior_max(1);
    if (level > 0) CHECK(std::log2(prev / m) > 1.8);
    prev = m;
  }
}

TEST_CASE("omega energy: constant, annulus, and oracle values") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  (void)bc;

  StripField c = constant_zero_section(1.0, 16, 8, Vec2(0.2, 0.0));
  CHECK(std::abs(omega_energy(chart, c)) < 1e-15);

  StripField a = flat_annulus(0.5, 32, 32);
  CHECK(omega_energy(chart, a) == doctest::Approx(1.0).epsilon(1e-12));

  MorseData f = morse_cosine_1d(0.5, 1, 0.0);
  StripField u = floer_oracle(chart, f, Vec2(0.15, 0.0), 4.0, 400, 24);
  double expected = f.f(u.Q(400, 0)) - f.f(u.Q(0, 0));
  double h = std::max(u.hs(), u.ht());
  CHECK(std::abs(omega_energy(chart, u) - expected) < 10.0 * h * h);
}

TEST_CASE("stokes energy: constant map and oracle top-edge term") {
  MetricChart chart = chart_flat(1);
  MorseData f = morse_cosine_1d(0.5, 1, 0.0);

  AdiabaticData bc{aform_zero(), f, 0.3};
  StripField c(2.0, 20, 10);
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 10; ++j) c.setQ(i, j, Vec2(0.5, 0.0));  // critical point
  StokesEnergy se = stokes_energy(chart, c, bc);
  CHECK(std::abs(se.total) < 1e-15);
  CHECK(std::abs(se.top_term) < 1e-15);

  AdiabaticData unit{aform_zero(), f, 1.0};
  StripField u = floer_oracle(chart, f, Vec2(0.15, 0.0), 4.0, 400, 24);
  StokesEnergy se2 = stokes_energy(chart, u, unit);
  double expected = f.f(u.Q(400, 24)) - f.f(u.Q(0, 24));
  CHECK(se2.top_term == doctest::Approx(expected).epsilon(1e-12));
  // the oracle's Q is t-independent, so the side integrals vanish
  CHECK(se2.total == doctest::Approx(se2.top_term).epsilon(1e-12));
  // and the Stokes total agrees with the omega-energy up to O(h^2)
  double h = std::max(u.hs(), u.ht());
  CHECK(std::abs(se2.total - omega_energy(chart, u)) < 10.0 * h * h);
}

TEST_CASE("closedness defect of catalog one-forms") {
  MetricChart chart = chart_flat(2);
  AdiabaticData bc{aform_constant(0.05, -0.03), morse_constant(), 0.1};
  CHECK(bc.closedness_defect(chart) < 1e-10);
}

TEST_CASE("adiabatic seed is boundary feasible") {
  MetricChart chart = chart_conformal_1d(0.1, 0.0);
  AdiabaticData bc{aform_constant(0.02, 0.0), morse_cosine_1d(0.1, 1, 0.0), 0.1};
  StripField u = adiabatic_seed(chart, bc, 5.0, 60, 12, Vec2(0.2, 0.0));
  ResidualField res = cr_residual(chart, u, bc);
  CHECK(res.boundary_max(1) < 1e-14);
}
