#include <cmath>

#include "doctest.h"

#include "adia/newton.hpp"
#include "test_util.hpp"

using namespace adia;
using adia::test::Rng;

TEST_CASE("eps = 0 with zero-section Dirichlet data returns the constant solution") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.1, 1, 0.0), 0.0};
  StripField init(2.0, 24, 10);
  for (int i = 0; i <= 24; ++i)
    for (int j = 0; j <= 10; ++j) init.setQ(i, j, Vec2(0.3, 0.0));
  EndData end = EndData::from_field(init);
  auto [u, rep] = solve_strip(chart, bc, end, init);
  CHECK(rep.converged());
  CHECK(std::abs(rep.energy) <= 1e-12);
  CHECK(std::abs(u.q[0].maxCoeff() - 0.3) < 1e-12);
  CHECK(u.p[0].abs().maxCoeff() < 1e-12);
}

TEST_CASE("floer-seeded adiabatic solve converges quickly") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.1, 1, 0.0), 0.1};
  auto [u, rep] = solve_floer_seeded(chart, bc, 20.0, 400, 20, Vec2(0.1, 0.0));
  CHECK(rep.converged());
  CHECK(rep.residual_norm < 1e-9);
  CHECK(rep.newton_iters <= 10);

  // residual operation agrees with the solver at the solution
  ResidualField res = cr_residual(chart, u, bc);
  CHECK(res.interior_l2(1, u.hs(), u.ht()) < 1e-8);
  CHECK(res.boundary_max(1) < 1e-9);

  // tameness: omega-energy of a converged solve is not negative
  CHECK(rep.energy >= -1e-9 * (2.0 * u.r));
}

TEST_CASE("stokes and omega energies agree on converged strips") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.1, 1, 0.0), 0.1};
  double prev = 0.0;
  for (int level = 0; level < 2; ++level) {
    int ns = 120 << level, nt = 12 << level;
    auto [u, rep] = solve_floer_seeded(chart, bc, 5.0, ns, nt, Vec2(0.1, 0.0));
    REQUIRE(rep.converged());
    double h = std::max(u.hs(), u.ht());
    double gap = std::abs(omega_energy(chart, u) - stokes_energy(chart, u, bc).total);
    CHECK(gap <= 5.0 * (h * h + 1e-9));
    if (level == 1) CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("floer reproduction: perturbed oracle reconverges to the oracle") {
  MetricChart chart = chart_flat(1);
  MorseData f = morse_cosine_1d(0.1, 1, 0.0);
  const double eps = 0.1, r = 10.0;
  const int Ns = 200, Nt = 16;
  AdiabaticData bc{aform_zero(), f, eps};

  StripField oracle = floer_oracle(chart, f.scaled(eps), Vec2(0.1, 0.0), r, Ns, Nt);
  StripField twisted = floer_twist(oracle, f, eps, +1);
  EndData end = EndData::from_field(twisted);

  StripField perturbed = twisted;
  Rng rng(31);
  double scale = 0.01;  // one percent of the chart unit
  for (int i = 1; i < Ns; ++i)
    for (int j = 1; j < Nt; ++j) {
      perturbed.q[0](i, j) += scale * rng.uniform(-1, 1);
      perturbed.p[0](i, j) += scale * rng.uniform(-1, 1);
    }

  SolverOptions opts;
  opts.mode = EquationMode::floer_modified;
  auto [v, rep] = solve_strip(chart, bc, end, perturbed, opts);
  REQUIRE(rep.converged());
  double h = std::max(oracle.hs(), oracle.ht());
  CHECK(field_sup_distance(v, twisted, 1) <= 10.0 * h * h);
}

TEST_CASE("self convergence under grid refinement") {
  // Corner-compatible data (the modified-equation problem is solved exactly
  // by the Floer field, smooth through the corners), strong field so the
  // discretization error sits well above roundoff.
  MetricChart chart = chart_conformal_1d(0.15, 0.3);
  MorseData f = morse_cosine_1d(0.8, 1, 0.0);
  AdiabaticData bc{aform_zero(), f, 1.0};
  SolverOptions opts;
  opts.mode = EquationMode::floer_modified;
  const double r = 2.0;
  std::vector<StripField> sols;
  for (int level = 0; level < 3; ++level) {
    auto [u, rep] =
        solve_floer_seeded(chart, bc, r, 64 << level, 16 << level, Vec2(0.17, 0.0), opts);
    REQUIRE(rep.converged());
    sols.push_back(u);
  }
  auto coarse_dist = [&](const StripField& coarse, const StripField& fine) {
    double m = 0.0;
    for (int i = 0; i <= coarse.Ns; ++i)
      for (int j = 0; j <= coarse.Nt; ++j) {
        m = std::max(m, std::abs(coarse.q[0](i, j) - fine.q[0](2 * i, 2 * j)));
        m = std::max(m, std::abs(coarse.p[0](i, j) - fine.p[0](2 * i, 2 * j)));
      }
    return m;
  };
  double d0 = coarse_dist(sols[0], sols[1]);
  double d1 = coarse_dist(sols[1], sols[2]);
  CHECK(std::log2(d0 / d1) > 1.8);
}

TEST_CASE("direct error against a closed-form holomorphic solution") {
  // w = c exp(pi z) has both boundary rows on the zero section, so it solves
  // the eps = 0 problem with its own arcs as Dirichlet data.
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_constant(), 0.0};
  const double r = 1.0, c0 = 0.05;
  double prev = 0.0;
  for (int level = 0; level < 3; ++level) {
    int Ns = 48 << level, Nt = 24 << level;
    StripField exact(r, Ns, Nt);
    for (int i = 0; i <= Ns; ++i)
      for (int j = 0; j <= Nt; ++j) {
        double s = exact.s_of(i), t = exact.t_of(j);
        exact.setQ(i, j, Vec2(c0 * std::exp(M_PI * s) * std::cos(M_PI * t), 0.0));
        exact.setP(i, j, Vec2(c0 * std::exp(M_PI * s) * std::sin(M_PI * t), 0.0));
      }
    EndData end = EndData::from_field(exact);
    auto [u, rep] = solve_strip(chart, bc, end, exact);
    REQUIRE(rep.converged());
    double err = field_sup_distance(u, exact, 1);
    if (level > 0) CHECK(std::log2(prev / err) > 1.8);
    prev = err;
  }
}

TEST_CASE("nonflat chart adiabatic solve with a constant one-form") {
  MetricChart chart = chart_conformal_1d(0.15, 0.3);
  AdiabaticData bc{aform_constant(0.02, 0.0), morse_cosine_1d(0.1, 1, 0.0), 0.08};
  auto [u, rep] = solve_floer_seeded(chart, bc, 6.0, 120, 12, Vec2(0.2, 0.0));
  CHECK(rep.converged());
  CHECK(cr_residual(chart, u, bc).boundary_max(1) < 1e-9);

  // Stokes with the eps pr*a correction still matches the omega-energy
  double h = std::max(u.hs(), u.ht());
  CHECK(std::abs(omega_energy(chart, u) - stokes_energy(chart, u, bc).total) <
        5.0 * (h * h + 1e-9));

  // for holomorphic strips the omega-energy equals the g-energy
  double genergy = 0.0;
  {
    Eigen::ArrayXXd dsq = grid_deriv_s(u.q[0], u.hs());
    Eigen::ArrayXXd dsp = grid_deriv_s(u.p[0], u.hs());
    Eigen::ArrayXXd dtq = grid_deriv_t(u.q[0], u.ht());
    for (int i = 0; i <= u.Ns; ++i) {
      double wi = (i == 0 || i == u.Ns) ? 0.5 : 1.0;
      for (int j = 0; j <= u.Nt; ++j) {
        double wj = (j == 0 || j == u.Nt) ? 0.5 : 1.0;
        Vec2 Q = u.Q(i, j);
        Christoffel G = christoffel(chart, Q);
        Vec2 nablas = Vec2(dsp(i, j), 0.0) -
                      christoffel_contract_covector(G, Vec2(dsq(i, j), 0.0), u.P(i, j), 1);
        // |d_s u|^2 = |d_s Q|^2_g + |nabla_s P|^2_{g^-1}
        genergy += wi * wj *
                   (chart.norm2(Q, Vec2(dsq(i, j), 0.0)) + chart.conorm2(Q, nablas));
        (void)dtq;
      }
    }
    genergy *= u.hs() * u.ht();
  }
  CHECK(std::abs(genergy - omega_energy(chart, u)) < 10.0 * (h * h + 1e-9));
}

TEST_CASE("2-d adiabatic solve against the product function") {
  MetricChart chart = chart_diag_perturbed_2d(0.1);
  AdiabaticData bc{aform_zero(), morse_cosine_2d(0.1, 1, 0.0, 0.08, 1, 0.0), 0.05};
  auto [u, rep] = solve_floer_seeded(chart, bc, 4.0, 64, 10, Vec2(0.2, 0.3));
  CHECK(rep.converged());
  CHECK(rep.energy >= -1e-9 * 8.0);
}

TEST_CASE("divergence reports carry the last residual") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.1, 1, 0.0), 0.2};
  StripField init(4.0, 40, 8);
  for (int i = 0; i <= 40; ++i)
    for (int j = 0; j <= 8; ++j) init.setQ(i, j, Vec2(0.3, 0.0));
  EndData end = EndData::from_field(init);  // inconsistent with the graph rows
  SolverOptions opts;
  opts.max_iters = 1;
  auto [u, rep] = solve_strip(chart, bc, end, init, opts);
  CHECK_FALSE(rep.converged());
  CHECK(rep.status == SolveStatus::diverged);
  CHECK(rep.residual_norm > 0.0);
  CHECK_FALSE(rep.message.empty());
}

TEST_CASE("continuation from eps = 0 reaches the adiabatic solution") {
  MetricChart chart = chart_flat(1);
  AdiabaticData bc{aform_zero(), morse_cosine_1d(0.1, 1, 0.0), 0.15};
  const double r = 6.0;
  const int Ns = 120, Nt = 12;
  StripField seed = adiabatic_seed(chart, bc, r, Ns, Nt, Vec2(0.1, 0.0));
  EndData end = EndData::from_field(seed);
  auto [u, rep] = solve_with_continuation(chart, bc, end, r, Ns, Nt);
  CHECK(rep.converged());
  // cross-check against the directly seeded solve
  auto [v, rep2] = solve_strip(chart, bc, end, seed);
  REQUIRE(rep2.converged());
  CHECK(field_sup_distance(u, v, 1) < 1e-8);
}
