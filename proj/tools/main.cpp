// adia-strips: solve holomorphic-strip boundary value problems in T*L with
// adiabatic graph boundary conditions, verify the exponential decay
// estimates, and run eps -> 0 sweeps against gradient flow lines.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"

#include "adia/artifacts.hpp"
#include "adia/config.hpp"

namespace fs = std::filesystem;
using namespace adia;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolver = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRowDiverged = 4;

struct ProblemSetup {
  MetricChart chart;
  MorseData f;
  OneForm aform;
  Vec2 q0 = Vec2::Zero();
};

ProblemSetup setup_from_config(const Config& cfg) {
  ProblemSetup s;
  std::string chart_id = cfg.get_str("chart", "id", "flat");
  s.chart = make_chart(chart_id, cfg.section("chart"));

  auto morse_params = cfg.section("morse");
  if (!morse_params.count("dim")) morse_params["dim"] = std::to_string(s.chart.dim);
  s.f = make_morse(cfg.get_str("morse", "id", "cosine"), morse_params);

  s.aform = make_aform(cfg.get_str("aform", "id", "zero"), cfg.section("aform"));

  s.q0 = Vec2::Zero();
  for (auto [section, key, slot] :
       {std::tuple{"problem", "q0", 0}, {"problem", "q0_2", 1}, {"sweep", "q0", 0},
        {"sweep", "q0_2", 1}, {"flow", "q0", 0}, {"flow", "q0_2", 1}}) {
    if (cfg.has(section, key)) s.q0[slot] = cfg.require_num(section, key);
  }
  return s;
}

uint32_t rng_state_mix(std::uint64_t seed) { return static_cast<uint32_t>(seed * 2654435761u); }

void perturb_interior(StripField& u, int dim, double amount, std::uint64_t seed) {
  if (amount <= 0.0) return;
  std::mt19937_64 rng(seed ^ rng_state_mix(seed));
  auto unit = [&rng] { return (rng() >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0; };
  for (int i = 1; i < u.Ns; ++i)
    for (int j = 1; j < u.Nt; ++j)
      for (int c = 0; c < dim; ++c) {
        u.q[c](i, j) += amount * unit();
        u.p[c](i, j) += amount * unit();
      }
}

std::string resolve_out(const std::string& flag_value) {
  const char* env = std::getenv("ADIA_STRIPS_OUT");
  std::string out = (env && *env) ? std::string(env) : flag_value;
  fs::create_directories(out);
  return out;
}

void copy_config(const std::string& out_dir, const Config& cfg, const std::string& name) {
  std::ofstream f(out_dir + "/" + name, std::ios::binary);
  f << cfg.text();
}

int cmd_solve(const std::string& config_path, const std::string& out_flag_in, std::uint64_t seed,
              double tol_override) {
  const std::string out_flag = out_flag_in.empty() ? "out" : out_flag_in;
  auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  ProblemSetup setup;
  try {
    cfg = Config::parse_file(config_path);
    setup = setup_from_config(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  std::string out = resolve_out(out_flag);

  AdiabaticData bc{setup.aform, setup.f, cfg.get_num("problem", "eps", 0.1)};
  double r = cfg.get_num("problem", "r", 20.0);
  int Ns = cfg.get_int("problem", "ns", 400);
  int Nt = cfg.get_int("problem", "nt", 24);
  SolverOptions opts;
  opts.res_tol = tol_override > 0.0 ? tol_override : cfg.get_num("problem", "res_tol", 1e-9);
  opts.max_iters = cfg.get_int("problem", "max_iters", 50);
  std::string mode = cfg.get_str("problem", "mode", "cr");
  if (mode == "floer") opts.mode = EquationMode::floer_modified;

  std::string end_condition = cfg.get_str("problem", "end_condition", "floer-seeded");
  StripField u;
  SolveReport rep;
  try {
    if (end_condition == "floer-seeded") {
      StripField seed_field =
          (opts.mode == EquationMode::floer_modified)
              ? floer_twist(floer_oracle(setup.chart, bc.f.scaled(bc.eps), setup.q0, r, Ns, Nt),
                            bc.f, bc.eps, +1)
              : adiabatic_seed(setup.chart, bc, r, Ns, Nt, setup.q0);
      EndData end = EndData::from_field(seed_field);
      perturb_interior(seed_field, setup.chart.dim, cfg.get_num("problem", "init_perturb", 0.0),
                       seed);
      std::tie(u, rep) = solve_strip(setup.chart, bc, end, seed_field, opts);
    } else if (end_condition == "dirichlet") {
      StripField seed_field = adiabatic_seed(setup.chart, bc, r, Ns, Nt, setup.q0);
      EndData end = EndData::from_field(seed_field);
      std::tie(u, rep) = solve_with_continuation(setup.chart, bc, end, r, Ns, Nt, opts);
    } else {
      std::fprintf(stderr, "config error: unknown end_condition '%s'\n", end_condition.c_str());
      return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solve failed: %s\n", e.what());
    return kExitSolver;
  }

  write_strip_csv(out + "/strip.csv", u, setup.chart.dim);
  write_report_json(out + "/report.json", rep, bc.eps, r, Ns, Nt);
  copy_config(out, cfg, "problem.cfg");
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out, "solve", config_path, cfg.text(), seed, wall,
                 {"strip.csv", "report.json", "problem.cfg"});
  std::printf("solve: %s residual=%s iters=%d energy=%s\n",
              rep.converged() ? "converged" : "FAILED", format_double(rep.residual_norm).c_str(),
              rep.newton_iters, format_double(rep.energy).c_str());
  return rep.converged() ? kExitOk : kExitSolver;
}

int cmd_verify(const std::string& in_dir, const std::string& out_flag, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  ProblemSetup setup;
  StripField u;
  try {
    cfg = Config::parse_file(in_dir + "/problem.cfg");
    setup = setup_from_config(cfg);
    auto [field, dim] = read_strip_csv(in_dir + "/strip.csv");
    if (dim != setup.chart.dim) throw ArtifactError("strip dimension does not match the chart");
    u = field;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "artifact error: %s\n", e.what());
    return kExitConfig;
  }
  std::string out = resolve_out(out_flag.empty() ? in_dir + "/verify" : out_flag);

  AdiabaticData bc{setup.aform, setup.f, cfg.get_num("problem", "eps", 0.1)};
  GammaProfile prof;
  EstimateReport rep;
  try {
    prof = gamma_profile(setup.chart, u, bc);
    rep = check_decay_bound(prof, prof.R);
    rep.d_rate = 0.5 * prof.delta;
    rep.c1_kappa = c1_envelope(setup.chart, u, bc, prof.R, rep.d_rate);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "verify failed: %s\n", e.what());
    return kExitConfig;
  }

  write_gamma_csv(out + "/gamma.csv", prof);
  write_estimate_json(out + "/estimate.json", prof, rep);

  PlotSeries g{"gamma", {}, {}}, env{"envelope", {}, {}};
  const double Keps2 = prof.measured_K * prof.eps * prof.eps;
  for (size_t i = 0; i < prof.s.size(); ++i) {
    g.x.push_back(prof.s[i]);
    g.y.push_back(prof.gamma[i]);
    env.x.push_back(prof.s[i]);
    env.y.push_back(prof.C1 * std::exp(-prof.delta * (prof.R + prof.s[i])) +
                    prof.C2 * std::exp(-prof.delta * (prof.R - prof.s[i])) + prof.C3 * Keps2);
  }
  write_svg_plot(out + "/gamma.svg", "gamma(s) vs decay envelope", {g, env}, true);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out, "verify", in_dir, cfg.text(), seed, wall,
                 {"gamma.csv", "estimate.json", "gamma.svg"});
  std::printf("verify: violations=%d measured_K=%s kappa=%s\n", rep.violations,
              format_double(rep.measured_K).c_str(), format_double(rep.c1_kappa).c_str());
  return rep.violations == 0 ? kExitOk : kExitSolver;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag_in, std::uint64_t seed,
              double tol_override, int jobs) {
  const std::string out_flag = out_flag_in.empty() ? "out" : out_flag_in;
  auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  ProblemSetup setup;
  SweepConfig sc;
  try {
    cfg = Config::parse_file(config_path);
    setup = setup_from_config(cfg);
    sc.eps_ladder = cfg.get_num_list("sweep", "eps_ladder");
    if (sc.eps_ladder.empty()) throw std::runtime_error("missing [sweep] eps_ladder");
    for (size_t k = 1; k < sc.eps_ladder.size(); ++k)
      if (sc.eps_ladder[k] >= sc.eps_ladder[k - 1])
        throw std::runtime_error("eps_ladder must be strictly decreasing");
    sc.ell = cfg.get_num("sweep", "ell", 2.0);
    sc.ns_per_unit = cfg.get_int("sweep", "ns_per_unit", 12);
    sc.nt = cfg.get_int("sweep", "nt", 24);
    sc.q0 = setup.q0;
    sc.mode = cfg.get_str("sweep", "mode", "finite") == "broken" ? ComparisonMode::broken_flow
                                                                 : ComparisonMode::finite_flow;
    sc.solver.res_tol =
        tol_override > 0.0 ? tol_override : cfg.get_num("sweep", "res_tol", 1e-9);
    if (cfg.has("sweep", "hbar")) sc.hbar = cfg.require_num("sweep", "hbar");
    sc.jobs = jobs;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  std::string out = resolve_out(out_flag);

  SweepResult res;
  try {
    res = run_sweep(setup.chart, setup.aform, setup.f, sc);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sweep failed: %s\n", e.what());
    return kExitRowDiverged;
  }

  std::vector<std::string> artifacts;
  for (size_t k = 0; k < res.table.rows.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "row_%02zu", k);
    std::string rowdir = std::string(buf);
    fs::create_directories(out + "/" + rowdir);
    const auto& row = res.table.rows[k];
    write_strip_csv(out + "/" + rowdir + "/strip.csv", res.fields[k], setup.chart.dim);
    write_report_json(out + "/" + rowdir + "/report.json", res.reports[k], row.eps, row.r, row.Ns,
                      row.Nt);
    artifacts.push_back(rowdir + "/strip.csv");
    artifacts.push_back(rowdir + "/report.json");
    if (row.converged) {
      write_gamma_csv(out + "/" + rowdir + "/gamma.csv", res.profiles[k]);
      artifacts.push_back(rowdir + "/gamma.csv");

      // overlay: rescaled horizontal part vs the reference flow line
      RescaledField v = rescale(res.fields[k], row.eps);
      PlotSeries strip_q{"strip q1", {}, {}}, flow_q{"flow q1", {}, {}};
      for (int i = 0; i <= v.field.Ns; ++i) {
        strip_q.x.push_back(v.sigma_of(i));
        strip_q.y.push_back(v.field.q[0](i, 0));
      }
      const auto& ref = res.references[k];
      if (!ref.segments.empty()) {
        const auto& seg = ref.segments.front();
        for (size_t m = 0; m < seg.samples.size(); ++m) {
          flow_q.x.push_back(-v.ell + static_cast<double>(m) * seg.step);
          flow_q.y.push_back(seg.samples[m][0]);
        }
      }
      std::string svg = rowdir + "/overlay.svg";
      write_svg_plot(out + "/" + svg, "rescaled strip vs flow line", {strip_q, flow_q});
      artifacts.push_back(svg);
    }
  }
  write_table_csv(out + "/table.csv", res.table);
  write_table_json(out + "/table.json", res.table);
  copy_config(out, cfg, "sweep.cfg");
  artifacts.insert(artifacts.begin(), {"table.csv", "table.json", "sweep.cfg"});

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(out, "sweep", config_path, cfg.text(), seed, wall, artifacts);

  bool all_converged = true;
  for (const auto& row : res.table.rows) all_converged = all_converged && row.converged;
  std::printf("sweep: rows=%zu converged=%s trend=%s hbar=%s\n", res.table.rows.size(),
              all_converged ? "all" : "NOT ALL", res.table.trend_ok ? "ok" : "FAILED",
              format_double(res.table.hbar).c_str());
  if (!all_converged) return kExitRowDiverged;
  return res.table.trend_ok ? kExitOk : kExitSolver;
}

int cmd_flow(const std::string& config_path, const std::string& out_flag_in, std::uint64_t seed) {
  const std::string out_flag = out_flag_in.empty() ? "out" : out_flag_in;
  auto t0 = std::chrono::steady_clock::now();
  Config cfg;
  ProblemSetup setup;
  try {
    cfg = Config::parse_file(config_path);
    setup = setup_from_config(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  std::string out = resolve_out(out_flag);
  std::string op = cfg.get_str("flow", "op", "criticals");

  try {
    if (op == "criticals") {
      MorseData f = setup.f;
      attach_criticals(setup.chart, f);
      write_flowpath_json(out + "/criticals.json",
                          [&] {
                            FlowPath p;
                            p.crossed_criticals = f.critical_points;
                            return p;
                          }(),
                          f);
      double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_manifest(out, "flow", config_path, cfg.text(), seed, wall, {"criticals.json"});
      std::printf("flow: %zu critical points\n", f.critical_points.size());
      return kExitOk;
    }
    if (op == "integrate") {
      double length = cfg.get_num("flow", "length", 10.0);
      double step = cfg.get_num("flow", "step", 1e-2);
      FlowSegment seg = integrate_flow(setup.chart, setup.f, setup.q0, length, step);
      FlowPath path;
      path.kind = FlowKind::finite;
      path.x_minus = seg.start;
      path.x_plus = seg.end;
      path.segments.push_back(seg);
      write_flowpath_csv(out + "/flow.csv", path, setup.chart.dim);
      write_flowpath_json(out + "/flow.json", path, setup.f);
      double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_manifest(out, "flow", config_path, cfg.text(), seed, wall, {"flow.csv", "flow.json"});
      std::printf("flow: integrated %zu samples, captured=%d\n", seg.samples.size(),
                  seg.captured ? 1 : 0);
      return kExitOk;
    }
    if (op == "broken") {
      Vec2 xm(cfg.get_num("flow", "x_minus", 0.0), cfg.get_num("flow", "x_minus_2", 0.0));
      Vec2 xp(cfg.get_num("flow", "x_plus", 0.5), cfg.get_num("flow", "x_plus_2", 0.0));
      int max_breaks = cfg.get_int("flow", "max_breaks", 4);
      std::string why;
      auto path = assemble_broken(setup.chart, setup.f, xm, xp, max_breaks, &why);
      if (!path) {
        std::fprintf(stderr, "flow: no broken chain found: %s\n", why.c_str());
        return kExitSolver;
      }
      write_flowpath_csv(out + "/broken.csv", *path, setup.chart.dim);
      write_flowpath_json(out + "/broken.json", *path, setup.f);
      double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_manifest(out, "flow", config_path, cfg.text(), seed, wall,
                     {"broken.csv", "broken.json"});
      std::printf("flow: chain with %zu crossed criticals\n", path->crossed_criticals.size());
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "flow failed: %s\n", e.what());
    return kExitSolver;
  }
  std::fprintf(stderr, "config error: unknown flow op '%s'\n", op.c_str());
  return kExitConfig;
}

int cmd_catalog() {
  std::printf("%-6s %-18s %s\n", "kind", "id", "parameters");
  for (const auto& e : catalog_entries())
    std::printf("%-6s %-18s %s\n", e[0].c_str(), e[1].c_str(), e[2].c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holomorphic strips with adiabatic boundary conditions in T*L"};
  app.require_subcommand(1);

  std::string config_path, out_dir, in_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int jobs = 1;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", config_path, "problem config file")->required();
    sub->add_option("--out", out_dir, "output directory (env ADIA_STRIPS_OUT overrides)");
    sub->add_option("--seed", seed, "run seed recorded in the manifest");
    sub->add_option("--tol", tol, "override the residual tolerance");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one strip problem");
  add_common(solve, true);
  CLI::App* verify = app.add_subcommand("verify", "decay estimates for solved strip artifacts");
  verify->add_option("--in", in_dir, "directory with strip.csv and problem.cfg")->required();
  add_common(verify, false);
  CLI::App* sweep = app.add_subcommand("sweep", "eps ladder sweep");
  add_common(sweep, true);
  sweep->add_option("--jobs", jobs, "worker pool bound for row post-processing");
  CLI::App* flow = app.add_subcommand("flow", "gradient flow utilities");
  add_common(flow, true);
  CLI::App* catalog = app.add_subcommand("catalog", "list built-in charts and functions");

  CLI11_PARSE(app, argc, argv);

  if (solve->parsed()) return cmd_solve(config_path, out_dir, seed, tol);
  if (verify->parsed()) return cmd_verify(in_dir, out_dir, seed);
  if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seed, tol, jobs);
  if (flow->parsed()) return cmd_flow(config_path, out_dir, seed);
  if (catalog->parsed()) return cmd_catalog();
  return kExitConfig;
}
