#include "adia/lab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace adia {

RescaledField rescale(const StripField& u, double eps) {
  RescaledField v;
  v.field = u;
  v.eps = eps;
  v.ell = eps * u.r;
  return v;
}

namespace {

std::vector<Vec2> flowpath_polyline(const FlowPath& path) {
  std::vector<Vec2> poly;
  for (const auto& seg : path.segments)
    for (const auto& q : seg.samples) poly.push_back(q);
  return poly;
}

}  // namespace

double sup_dist_to_flow(const MetricChart& chart, const RescaledField& v, const FlowPath& path,
                        ComparisonMode mode) {
  const StripField& u = v.field;
  if (path.segments.empty()) throw GridError("sup_dist_to_flow: empty reference path");

  double worst = 0.0;
  if (mode == ComparisonMode::finite_flow) {
    const FlowSegment& seg = path.segments.front();
    double span = seg.step * (static_cast<double>(seg.samples.size()) - 1.0);
    if (!seg.captured && span + 0.5 * seg.step < 2.0 * v.ell)
      throw GridError("sup_dist_to_flow: reference path shorter than the strip domain");
    for (int i = 0; i <= u.Ns; ++i) {
      double sigma = v.sigma_of(i) + v.ell;  // path parameter from the left end
      Vec2 ref = flowpath_eval(path, sigma);
      for (int j = 0; j <= u.Nt; ++j)
        worst = std::max(worst, torus_dist(u.Q(i, j), ref, chart.dim, chart.period));
    }
    return worst;
  }

  std::vector<Vec2> poly = flowpath_polyline(path);
  size_t ptr = 0;
  for (int i = 0; i <= u.Ns; ++i) {
    // monotone matching: the polyline index may only advance
    size_t best = ptr;
    double best_d = 1e300;
    for (size_t k = ptr; k < poly.size(); ++k) {
      double dcol = 0.0;
      for (int j = 0; j <= u.Nt; ++j)
        dcol = std::max(dcol, torus_dist(u.Q(i, j), poly[k], chart.dim, chart.period));
      if (dcol < best_d) {
        best_d = dcol;
        best = k;
      }
    }
    ptr = best;
    worst = std::max(worst, best_d);
  }
  return worst;
}

namespace {

// Per-column omega-energy density integrated over t.
std::vector<double> column_energy(const MetricChart& chart, const StripField& u) {
  const int d = chart.dim;
  std::array<Eigen::ArrayXXd, 2> dsQ, dtQ, dsP, dtP;
  for (int c = 0; c < d; ++c) {
    dsQ[c] = grid_deriv_s(u.q[c], u.hs());
    dtQ[c] = grid_deriv_t(u.q[c], u.ht());
    dsP[c] = grid_deriv_s(u.p[c], u.hs());
    dtP[c] = grid_deriv_t(u.p[c], u.ht());
  }
  std::vector<double> e(u.Ns + 1, 0.0);
  for (int i = 0; i <= u.Ns; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= u.Nt; ++j) {
      double wj = (j == 0 || j == u.Nt) ? 0.5 : 1.0;
      double v = 0.0;
      for (int c = 0; c < d; ++c)
        v += dsQ[c](i, j) * dtP[c](i, j) - dtQ[c](i, j) * dsP[c](i, j);
      acc += wj * v;
    }
    e[i] = acc * u.ht();
  }
  return e;
}

StripField interpolate_to_grid(const StripField& prev, double prev_eps, double new_eps, double r,
                               int Ns, int Nt) {
  StripField out(r, Ns, Nt);
  const double scale_p = (prev_eps > 0.0) ? new_eps / prev_eps : 0.0;
  const double ell = prev_eps * prev.r;
  for (int i = 0; i <= Ns; ++i) {
    double sigma = new_eps * out.s_of(i);  // shared rescaled coordinate
    double x = (sigma / ell + 1.0) * 0.5 * prev.Ns;
    int k = std::min(prev.Ns - 1, std::max(0, static_cast<int>(std::floor(x))));
    double w = std::min(1.0, std::max(0.0, x - k));
    for (int j = 0; j <= Nt; ++j) {
      // t grids match; interpolate columns linearly in sigma
      double jj = static_cast<double>(j) * prev.Nt / Nt;
      int j0 = std::min(prev.Nt - 1, static_cast<int>(std::floor(jj)));
      double wj = jj - j0;
      auto lerp = [&](const Eigen::ArrayXXd& a) {
        double v0 = (1.0 - w) * a(k, j0) + w * a(k + 1, j0);
        double v1 = (1.0 - w) * a(k, j0 + 1) + w * a(k + 1, j0 + 1);
        return (1.0 - wj) * v0 + wj * v1;
      };
      Vec2 Q(lerp(prev.q[0]), lerp(prev.q[1]));
      Vec2 P(lerp(prev.p[0]), lerp(prev.p[1]));
      out.setQ(i, j, Q);
      out.setP(i, j, Vec2(scale_p * P));
    }
  }
  return out;
}

}  // namespace

namespace {

// Reference flow line for one sweep row, anchored at q(-ell + rho, 0) with
// rho = (eps/delta) log(1/eps); sample 0 lands on sigma = -ell exactly.
FlowPath reference_flow(const MetricChart& chart, const MorseData& f, const RescaledField& v,
                        double delta) {
  const StripField& u = v.field;
  double rho = (v.eps / delta) * std::log(1.0 / v.eps);
  int anchor = std::min(
      u.Ns, std::max(0, static_cast<int>(std::lround(((rho - v.ell) / v.eps + u.r) / u.hs()))));
  Vec2 x_anchor = u.Q(anchor, 0);

  // The path step divides the strip's sigma spacing so every strip column
  // lands exactly on a path sample (no interpolation shift in sup_dist).
  const double dsig = v.eps * u.hs();
  const int m = std::max(1, static_cast<int>(std::ceil(dsig / 0.002)));
  const double step = dsig / m;
  const int n_back = anchor * m;
  const int n_fwd = (u.Ns - anchor) * m;

  FlowSegment fseg = integrate_flow(chart, f, x_anchor, (n_fwd + 0.5) * step, step, 0.0);
  FlowSegment bseg = integrate_flow_backward(chart, f, x_anchor, (n_back + 0.5) * step, step, 0.0);

  FlowPath ref;
  ref.kind = FlowKind::finite;
  FlowSegment joined;
  joined.step = step;
  joined.samples.assign(bseg.samples.rbegin(), bseg.samples.rend());
  joined.samples.insert(joined.samples.end(), fseg.samples.begin() + 1, fseg.samples.end());
  // trim so sample 0 corresponds to sigma = -ell exactly
  int extra = static_cast<int>(bseg.samples.size()) - 1 - n_back;
  if (extra > 0 && extra < static_cast<int>(joined.samples.size()))
    joined.samples.erase(joined.samples.begin(), joined.samples.begin() + extra);
  joined.start = joined.samples.front();
  joined.end = joined.samples.back();
  ref.segments.push_back(joined);
  ref.x_minus = joined.start;
  ref.x_plus = joined.end;
  return ref;
}

}  // namespace

SweepResult run_sweep(const MetricChart& chart, const OneForm& a_form, const MorseData& f,
                      const SweepConfig& config) {
  SweepResult result;
  result.table.hbar = config.hbar ? *config.hbar : 0.5 * morse_energy_gap(chart, f);

  for (size_t k = 1; k < config.eps_ladder.size(); ++k)
    if (config.eps_ladder[k] >= config.eps_ladder[k - 1])
      throw ConfigValueError("eps_ladder must be strictly decreasing");

  const double delta = std::sqrt(kDeltaSq);
  const size_t nrows = config.eps_ladder.size();
  result.fields.reserve(nrows);
  result.reports.reserve(nrows);
  result.profiles.resize(nrows);
  result.references.resize(nrows);
  result.table.rows.resize(nrows);

  // Stage 1: solves, sequential (continuation seeding orders the ladder).
  for (size_t k = 0; k < nrows; ++k) {
    auto t0 = std::chrono::steady_clock::now();
    double eps = config.eps_ladder[k];
    SweepRow& row = result.table.rows[k];
    row.eps = eps;
    row.r = config.ell / eps;
    row.Ns = std::max(8, static_cast<int>(std::lround(config.ns_per_unit * row.r)));
    row.Nt = config.nt;

    AdiabaticData bc{a_form, f, eps};
    StripField seed = adiabatic_seed(chart, bc, row.r, row.Ns, row.Nt, config.q0);
    EndData end = EndData::from_field(seed);

    StripField init = seed;
    if (k > 0 && result.reports[k - 1].converged()) {
      init = interpolate_to_grid(result.fields[k - 1], config.eps_ladder[k - 1], eps, row.r,
                                 row.Ns, row.Nt);
      for (int j = 0; j <= row.Nt; ++j) {  // restore exact end arcs
        init.setQ(0, j, end.q_left[j]);
        init.setP(0, j, end.p_left[j]);
        init.setQ(row.Ns, j, end.q_right[j]);
        init.setP(row.Ns, j, end.p_right[j]);
      }
    }

    auto [u, rep] = solve_strip(chart, bc, end, init, config.solver);
    row.converged = rep.converged();
    row.newton_iters = rep.newton_iters;
    row.residual = rep.residual_norm;
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!row.converged)
      result.table.note = "row eps=" + std::to_string(eps) + " diverged: " + rep.message;
    result.fields.push_back(std::move(u));
    result.reports.push_back(std::move(rep));
  }

  // Broken mode compares every row against one fixed reference: the broken
  // flow line extracted from the finest converged run (comparing each row to
  // its own extraction would be circular).
  FlowPath broken_reference;
  if (config.mode == ComparisonMode::broken_flow) {
    for (size_t k = nrows; k-- > 0;) {
      if (!result.table.rows[k].converged) continue;
      RescaledField v = rescale(result.fields[k], result.table.rows[k].eps);
      broken_reference = extract_broken(chart, v, f);
      break;
    }
  }

  // Stage 2: per-row post-processing; rows are independent, so a bounded
  // worker pool is allowed here. Results land in preallocated slots.
  auto post_row = [&](size_t k) {
    SweepRow& row = result.table.rows[k];
    if (!row.converged) return;
    const StripField& u = result.fields[k];
    AdiabaticData bc{a_form, f, row.eps};
    RescaledField v = rescale(u, row.eps);
    FlowPath ref = (config.mode == ComparisonMode::broken_flow)
                       ? broken_reference
                       : reference_flow(chart, f, v, delta);
    row.sup_dist = sup_dist_to_flow(chart, v, ref, config.mode);
    row.energy = omega_energy(chart, u);
    row.stokes = stokes_energy(chart, u, bc).total;
    row.morse_energy = row.energy / row.eps;
    GammaProfile prof = gamma_profile(chart, u, bc, delta);
    row.measured_K = prof.measured_K;
    row.measured_kappa = c1_envelope(chart, u, bc, prof.R);
    result.profiles[k] = std::move(prof);
    result.references[k] = std::move(ref);
  };
  int jobs = std::max(1, config.jobs);
  if (jobs == 1 || nrows <= 1) {
    for (size_t k = 0; k < nrows; ++k) post_row(k);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    int nthreads = std::min<size_t>(jobs, nrows);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&] {
        for (size_t k = next.fetch_add(1); k < nrows; k = next.fetch_add(1)) post_row(k);
      });
    for (auto& th : pool) th.join();
  }

  result.table.trend_ok = true;
  for (size_t k = 0; k + 1 < result.table.rows.size(); ++k) {
    const auto& a = result.table.rows[k];
    const auto& b = result.table.rows[k + 1];
    if (!a.converged || !b.converged || !(b.sup_dist < 1.10 * a.sup_dist))
      result.table.trend_ok = false;
  }
  return result;
}

std::vector<EnergyInterval> energy_decompose(const MetricChart& chart, const StripField& u,
                                             double window, double hbar) {
  if (window < 1.0) throw GridError("energy_decompose: window must be at least 1 s-unit");
  if (hbar <= 0.0) throw GridError("energy_decompose: hbar must be positive");

  std::vector<double> e = column_energy(chart, u);
  // cumulative trapezoid in s
  std::vector<double> cum(u.Ns + 1, 0.0);
  for (int i = 1; i <= u.Ns; ++i) cum[i] = cum[i - 1] + 0.5 * (e[i] + e[i - 1]) * u.hs();

  auto window_energy = [&](int i) {
    double lo = std::max(-u.r, u.s_of(i) - window);
    double hi = std::min(u.r, u.s_of(i) + window);
    int ilo = static_cast<int>(std::lround((lo + u.r) / u.hs()));
    int ihi = static_cast<int>(std::lround((hi + u.r) / u.hs()));
    return cum[std::min(u.Ns, ihi)] - cum[std::max(0, ilo)];
  };

  std::vector<bool> high(u.Ns + 1);
  for (int i = 0; i <= u.Ns; ++i) high[i] = window_energy(i) >= hbar;

  std::vector<EnergyInterval> out;
  int start = 0;
  for (int i = 1; i <= u.Ns + 1; ++i) {
    if (i == u.Ns + 1 || high[i] != high[start]) {
      EnergyInterval iv;
      iv.s_lo = u.s_of(start);
      iv.s_hi = (i == u.Ns + 1) ? u.r : u.s_of(i);
      iv.high = high[start];
      out.push_back(iv);
      start = i;
    }
  }
  return out;
}

double morse_energy(const MetricChart& chart, const RescaledField& v, double a, double b) {
  const StripField& u = v.field;
  std::vector<double> e = column_energy(chart, u);
  int ilo = std::max(0, static_cast<int>(std::lround((a / v.eps + u.r) / u.hs())));
  int ihi = std::min(u.Ns, static_cast<int>(std::lround((b / v.eps + u.r) / u.hs())));
  double total = 0.0;
  for (int i = ilo; i < ihi; ++i) total += 0.5 * (e[i] + e[i + 1]) * u.hs();
  return total / v.eps;
}

FlowPath extract_broken(const MetricChart& chart, const RescaledField& v, const MorseData& f,
                        const ExtractOptions& opts) {
  const StripField& u = v.field;
  const double dsig = v.eps * u.hs();

  // max flow speed over the chart, for the plateau speed threshold
  double vmax = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < (chart.dim == 2 ? 64 : 1); ++j) {
      Vec2 q(chart.period * i / 64.0, chart.period * j / 64.0);
      vmax = std::max(vmax, (chart.metric_inv(q) * f.df(q)).norm());
    }
  const double speed_tol = opts.speed_tol_factor * std::max(vmax, 1e-12);

  // rescaled column speed |dq/dsigma|
  std::vector<double> speed(u.Ns, 0.0);
  for (int i = 0; i < u.Ns; ++i)
    speed[i] = (u.Q(i + 1, 0) - u.Q(i, 0)).norm() / dsig;

  struct Plateau {
    int lo, hi;
    Vec2 center;
    int critical = -1;
  };
  std::vector<Plateau> plateaus;
  const int min_cols = std::max(1, static_cast<int>(std::lround(opts.plateau_min / dsig)));
  int run = 0;
  for (int i = 0; i <= u.Ns; ++i) {
    bool slow = (i < u.Ns) ? speed[i] <= speed_tol : false;
    if (slow) {
      ++run;
    } else {
      if (run >= min_cols) plateaus.push_back({i - run, i, Vec2::Zero(), -1});
      run = 0;
    }
  }
  if (run >= min_cols) plateaus.push_back({u.Ns - run, u.Ns, Vec2::Zero(), -1});

  std::vector<CriticalPoint> cps = find_criticals(chart, f);
  for (auto& pl : plateaus) {
    Vec2 acc = Vec2::Zero();
    for (int i = pl.lo; i <= pl.hi; ++i) acc += u.Q(i, 0);
    pl.center = acc / static_cast<double>(pl.hi - pl.lo + 1);
    double best = 1e300;
    for (int k = 0; k < static_cast<int>(cps.size()); ++k) {
      double dd = torus_dist(pl.center, cps[k].location, chart.dim, chart.period);
      if (dd < best) {
        best = dd;
        pl.critical = k;
      }
    }
    if (pl.critical < 0 || best > opts.match_tol)
      throw InconsistentLimitError("plateau at a non-critical location");
  }

  FlowPath path;
  path.x_minus = u.Q(0, 0);
  path.x_plus = u.Q(u.Ns, 0);

  const double fstep = std::min(1e-2 / std::max(vmax, 1e-12), 0.5);
  const double escape_len = 400.0 / std::max(vmax, 1e-6);

  if (plateaus.empty()) {
    path.kind = FlowKind::finite;
    FlowSegment seg = integrate_flow(chart, f, path.x_minus, 2.0 * v.ell, fstep, 0.0);
    path.segments.push_back(seg);
    return path;
  }

  path.kind = FlowKind::broken;
  for (const auto& pl : plateaus) path.crossed_criticals.push_back(cps[pl.critical]);

  // leading segment (only when the strip does not start inside a plateau)
  if (plateaus.front().lo > 0) {
    FlowSegment seg = integrate_flow(chart, f, path.x_minus, escape_len, fstep);
    if (!seg.captured ||
        torus_dist(seg.end, cps[plateaus.front().critical].location, chart.dim, chart.period) >
            kMinSep)
      path.diagnostic = "leading segment does not reach the first plateau critical";
    path.segments.push_back(seg);
  }
  for (size_t k = 0; k + 1 < plateaus.size(); ++k) {
    const Vec2& y = cps[plateaus[k].critical].location;
    int exit_col = std::min(u.Ns, plateaus[k].hi + std::max(1, min_cols / 4));
    Vec2 dir = Vec2::Zero();
    for (int c = 0; c < chart.dim; ++c)
      dir[c] = wrap_diff(u.Q(exit_col, 0)[c], y[c], chart.period);
    if (dir.norm() == 0.0) dir[0] = 1.0;
    dir.normalize();
    FlowSegment seg =
        integrate_flow_from_critical(chart, f, Vec2(y + 0.5 * kCpTol * dir), escape_len, fstep);
    if (!seg.captured ||
        torus_dist(seg.end, cps[plateaus[k + 1].critical].location, chart.dim, chart.period) >
            kMinSep)
      path.diagnostic = "connecting segment does not reach the next plateau critical";
    path.segments.push_back(seg);
  }
  if (plateaus.back().hi < u.Ns) {
    const Vec2& y = cps[plateaus.back().critical].location;
    int exit_col = std::min(u.Ns, plateaus.back().hi + std::max(1, min_cols / 4));
    Vec2 dir = Vec2::Zero();
    for (int c = 0; c < chart.dim; ++c)
      dir[c] = wrap_diff(u.Q(exit_col, 0)[c], y[c], chart.period);
    if (dir.norm() == 0.0) dir[0] = 1.0;
    dir.normalize();
    double remaining = (u.Ns - plateaus.back().hi) * dsig;
    FlowSegment seg = integrate_flow_from_critical(chart, f, Vec2(y + 0.5 * kCpTol * dir),
                                                   remaining + escape_len * 0.25, fstep);
    path.segments.push_back(seg);
  }
  return path;
}

}  // namespace adia
