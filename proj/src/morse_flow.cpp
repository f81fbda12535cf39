#include "adia/morse_flow.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace adia {

namespace {

Vec2 flow_field(const MetricChart& chart, const MorseData& f, const Vec2& q) {
  Vec2 v = chart.metric_inv(q) * f.df(q);
  if (chart.dim == 1) v[1] = 0.0;
  return v;
}

Vec2 rk4_step(const MetricChart& chart, const MorseData& f, const Vec2& q, double h) {
  Vec2 k1 = flow_field(chart, f, q);
  Vec2 k2 = flow_field(chart, f, q + 0.5 * h * k1);
  Vec2 k3 = flow_field(chart, f, q + 0.5 * h * k2);
  Vec2 k4 = flow_field(chart, f, q + h * k3);
  return q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

FlowSegment integrate_impl(const MetricChart& chart, const MorseData& f, const Vec2& q0,
                           double length, double step, double cp_tol, double sign) {
  FlowSegment seg;
  seg.step = step;
  seg.start = q0;
  const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
  seg.samples.reserve(n + 1);
  Vec2 q = q0;
  seg.samples.push_back(q);
  for (int i = 0; i < n; ++i) {
    if (f.df(q).norm() < 0.1 * cp_tol) {
      seg.captured = true;
      break;
    }
    q = rk4_step(chart, f, q, sign * step);
    seg.samples.push_back(q);
  }
  if (!seg.captured && f.df(q).norm() < 0.1 * cp_tol) seg.captured = true;
  seg.end = seg.samples.back();
  return seg;
}

// Integration for orbits that start within the capture radius of a critical
// point: the capture test stays disarmed until the orbit clears `clearance`
// from its start.
FlowSegment integrate_escape(const MetricChart& chart, const MorseData& f, const Vec2& q0,
                             double clearance, double length, double step, double cp_tol) {
  FlowSegment seg;
  seg.step = step;
  seg.start = q0;
  const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
  seg.samples.reserve(n + 1);
  Vec2 q = q0;
  seg.samples.push_back(q);
  bool armed = false;
  for (int i = 0; i < n; ++i) {
    if (!armed && torus_dist(q, q0, chart.dim, chart.period) > clearance) armed = true;
    if (armed && f.df(q).norm() < 0.1 * cp_tol) {
      seg.captured = true;
      break;
    }
    q = rk4_step(chart, f, q, step);
    seg.samples.push_back(q);
  }
  if (!seg.captured && f.df(q).norm() < 0.1 * cp_tol &&
      torus_dist(q, q0, chart.dim, chart.period) > clearance)
    seg.captured = true;
  seg.end = seg.samples.back();
  return seg;
}

const CriticalPoint* nearest_critical(const std::vector<CriticalPoint>& cps, const Vec2& q,
                                      const MetricChart& chart) {
  const CriticalPoint* best = nullptr;
  double best_d = 1e300;
  for (const auto& cp : cps) {
    double d = torus_dist(q, cp.location, chart.dim, chart.period);
    if (d < best_d) {
      best_d = d;
      best = &cp;
    }
  }
  return best;
}

struct ConnectionEdge {
  int from = -1;
  int to = -1;
  FlowSegment orbit;
};

// Integrate from just off a critical along `dir` until capture; returns the
// index of the captured critical or -1.
int shoot(const MetricChart& chart, const MorseData& f, const std::vector<CriticalPoint>& cps,
          const Vec2& origin, const Vec2& dir, double offset, double step, double max_len,
          FlowSegment* orbit_out) {
  FlowSegment seg = integrate_escape(chart, f, Vec2(origin + offset * dir), 10.0 * kMinSep,
                                     max_len, step, kCpTol);
  if (!seg.captured) return -1;
  const CriticalPoint* cp = nearest_critical(cps, seg.end, chart);
  if (cp == nullptr) return -1;
  if (torus_dist(seg.end, cp->location, chart.dim, chart.period) > kMinSep) return -1;
  if (orbit_out) *orbit_out = seg;
  return static_cast<int>(cp - cps.data());
}

// All isolated connecting orbits between criticals (index difference one in
// d=2, adjacent min->max pairs in d=1).
std::vector<ConnectionEdge> connection_edges(const MetricChart& chart, const MorseData& f,
                                             const std::vector<CriticalPoint>& cps) {
  std::vector<ConnectionEdge> edges;
  const double dfmax = [&] {
    double m = 0.0;
    for (int i = 0; i < 33; ++i)
      for (int j = 0; j < (chart.dim == 2 ? 33 : 1); ++j) {
        Vec2 q(chart.period * i / 32.0, chart.period * j / 32.0);
        m = std::max(m, f.df(q).norm());
      }
    return m;
  }();
  if (dfmax == 0.0) return edges;
  const double step = std::min(1e-2 / dfmax, 0.5);
  // Escape from a cp_tol/2 offset plus the crossing itself.
  const double max_len = 64.0 / std::max(1e-6, 0.25 * dfmax) + 40.0 * std::log(1e9) / dfmax;

  // Eigenvectors of g^{-1} hess with the requested eigenvalue sign; the
  // matrix is similar to a symmetric one, so the eigenvalues are real.
  auto eigen_dirs = [&](const CriticalPoint& cp, bool expanding) {
    std::vector<Vec2> dirs;
    if (chart.dim == 1) {
      Mat2 h = f.hess(cp.location);
      if ((h(0, 0) > 0.0) == expanding) {
        dirs.push_back(Vec2(1.0, 0.0));
        dirs.push_back(Vec2(-1.0, 0.0));
      }
      return dirs;
    }
    Mat2 gi = chart.metric_inv(cp.location);
    Mat2 a = gi * f.hess(cp.location);
    Eigen::EigenSolver<Mat2> es(a);
    for (int k = 0; k < 2; ++k) {
      if ((es.eigenvalues()[k].real() > 0.0) == expanding) {
        Vec2 v = es.eigenvectors().col(k).real();
        v.normalize();
        dirs.push_back(v);
        dirs.push_back(Vec2(-v));
      }
    }
    return dirs;
  };

  // Every index-difference-one connection has a one-dimensional manifold on
  // one side: shoot forward along 1-d unstable manifolds, and backward (the
  // reversed flow) along 1-d stable manifolds. A minimum's two-dimensional
  // unstable manifold needs no scan: its saddle connections are found from
  // the saddle side.
  auto record = [&](int a, int b, FlowSegment orbit) {
    if (b < 0 || b == a) return;
    if (f.f(cps[b].location) <= f.f(cps[a].location)) return;
    if (cps[b].index != cps[a].index + 1) return;
    for (const auto& e : edges)
      if (e.from == a && e.to == b) return;
    edges.push_back({a, b, std::move(orbit)});
  };

  for (int a = 0; a < static_cast<int>(cps.size()); ++a) {
    const CriticalPoint& ya = cps[a];
    if (chart.dim - ya.index == 1) {
      for (const Vec2& dir : eigen_dirs(ya, true)) {
        FlowSegment orbit;
        int b = shoot(chart, f, cps, ya.location, dir, 0.5 * kCpTol, step, max_len, &orbit);
        record(a, b, std::move(orbit));
      }
    }
    if (ya.index == 1) {
      // reversed flow down the stable directions lands at the source critical
      MorseData neg = f.scaled(-1.0);
      for (const Vec2& dir : eigen_dirs(ya, false)) {
        FlowSegment down;
        int b = shoot(chart, neg, cps, ya.location, dir, 0.5 * kCpTol, step, max_len, &down);
        if (b < 0) continue;
        FlowSegment orbit;
        orbit.step = down.step;
        orbit.samples.assign(down.samples.rbegin(), down.samples.rend());
        orbit.start = orbit.samples.front();
        orbit.end = orbit.samples.back();
        orbit.captured = false;  // the forward orbit only departs a critical here
        record(b, a, std::move(orbit));
      }
    }
  }
  return edges;
}

}  // namespace

FlowSegment integrate_flow(const MetricChart& chart, const MorseData& f, const Vec2& q0,
                           double length, double step, double cp_tol) {
  return integrate_impl(chart, f, q0, length, step, cp_tol, 1.0);
}

FlowSegment integrate_flow_backward(const MetricChart& chart, const MorseData& f, const Vec2& q0,
                                    double length, double step, double cp_tol) {
  return integrate_impl(chart, f, q0, length, step, cp_tol, -1.0);
}

FlowSegment integrate_flow_from_critical(const MetricChart& chart, const MorseData& f,
                                         const Vec2& q0, double length, double step,
                                         double cp_tol) {
  return integrate_escape(chart, f, q0, 10.0 * kMinSep, length, step, cp_tol);
}

std::vector<CriticalPoint> find_criticals(const MetricChart& chart, const MorseData& f,
                                          double cp_tol, double min_sep) {
  const int d = chart.dim;
  const int n = 32;
  std::vector<CriticalPoint> found;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < (d == 2 ? n : 1); ++j) {
      Vec2 q(chart.period * i / n, d == 2 ? chart.period * j / n : 0.0);
      bool converged = false;
      for (int it = 0; it < 50; ++it) {
        Vec2 g = f.df(q);
        if (g.norm() < 1e-13) {
          converged = true;
          break;
        }
        Mat2 h = f.hess(q);
        Vec2 stepv = Vec2::Zero();
        if (d == 1) {
          if (std::abs(h(0, 0)) < 1e-14) break;
          stepv[0] = g[0] / h(0, 0);
        } else {
          double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
          if (std::abs(det) < 1e-14) break;
          stepv[0] = (h(1, 1) * g[0] - h(0, 1) * g[1]) / det;
          stepv[1] = (-h(1, 0) * g[0] + h(0, 0) * g[1]) / det;
        }
        double norm = stepv.norm();
        if (norm > 0.25) stepv *= 0.25 / norm;  // keep Newton inside the basin
        q -= stepv;
      }
      if (!converged || f.df(q).norm() >= cp_tol) continue;
      q = wrap_point(q, d, chart.period);
      bool dup = false;
      for (const auto& cp : found)
        if (torus_dist(q, cp.location, d, chart.period) < min_sep) dup = true;
      if (dup) continue;

      Mat2 h = f.hess(q);
      double det = (d == 1) ? h(0, 0) : h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
      if (std::abs(det) < 1e-8)
        throw NonMorseError("critical point with |det hess| < 1e-8 encountered");
      CriticalPoint cp;
      cp.location = q;
      cp.tolerance = f.df(q).norm();
      if (d == 1) {
        cp.index = h(0, 0) < 0.0 ? 1 : 0;
      } else {
        Eigen::SelfAdjointEigenSolver<Mat2> es(h);
        cp.index = (es.eigenvalues()[0] < 0.0 ? 1 : 0) + (es.eigenvalues()[1] < 0.0 ? 1 : 0);
      }
      found.push_back(cp);
    }
  }
  std::sort(found.begin(), found.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.location[0] != b.location[0]) return a.location[0] < b.location[0];
    return a.location[1] < b.location[1];
  });
  return found;
}

void attach_criticals(const MetricChart& chart, MorseData& f) {
  f.critical_points = find_criticals(chart, f);
}

std::optional<FlowPath> assemble_broken(const MetricChart& chart, const MorseData& f,
                                        const Vec2& x_minus, const Vec2& x_plus, int max_breaks,
                                        std::string* diagnostic) {
  auto fail = [&](const std::string& why) -> std::optional<FlowPath> {
    if (diagnostic) *diagnostic = why;
    return std::nullopt;
  };

  std::vector<CriticalPoint> cps = find_criticals(chart, f);
  if (cps.empty()) return fail("function has no critical points");

  double dfmax = 0.0;
  for (const auto& cp : cps) dfmax = std::max(dfmax, f.df(cp.location).norm());
  for (int i = 0; i < 64; ++i) {
    Vec2 q(chart.period * i / 64.0, 0.0);
    dfmax = std::max(dfmax, f.df(q).norm());
  }
  const double step = std::min(2e-3 / std::max(dfmax, 1e-12), 0.25);
  const double max_len = 400.0 / std::max(dfmax, 1e-6);

  // Forward orbit from x_minus; check for a direct pass through x_plus.
  FlowSegment seg_minus = integrate_flow(chart, f, x_minus, max_len, step);
  {
    double best = 1e300;
    int best_i = -1;
    for (int i = 0; i < static_cast<int>(seg_minus.samples.size()); ++i) {
      double d = torus_dist(seg_minus.samples[i], x_plus, chart.dim, chart.period);
      if (d < best) {
        best = d;
        best_i = i;
      }
    }
    if (best < 10.0 * step * dfmax + 1e-9 && best_i >= 0) {
      // Multilevel refinement: re-walk the bracket at ever finer resolution
      // until the closest approach is resolved below the hit tolerance.
      double sigma_lo = std::max(0, best_i - 1) * step;
      Vec2 q_lo = seg_minus.samples[std::max(0, best_i - 1)];
      double span = 2.0 * step;
      double best_fine = best;
      double sigma_hit = best_i * step;
      for (int level = 0; level < 4; ++level) {
        double fine = span / 256.0;
        Vec2 q = q_lo;
        double sigma = sigma_lo;
        double local_best = torus_dist(q, x_plus, chart.dim, chart.period);
        double local_sigma = sigma;
        Vec2 local_q = q;
        for (int k = 0; k < 256; ++k) {
          q = rk4_step(chart, f, q, fine);
          sigma += fine;
          double d = torus_dist(q, x_plus, chart.dim, chart.period);
          if (d < local_best) {
            local_best = d;
            local_sigma = sigma;
            local_q = q;
          }
        }
        best_fine = local_best;
        sigma_hit = local_sigma;
        // re-center the bracket two fine steps before the closest approach
        q_lo = local_q;
        q_lo = rk4_step(chart, f, q_lo, -fine);
        q_lo = rk4_step(chart, f, q_lo, -fine);
        sigma_lo = local_sigma - 2.0 * fine;
        span = 4.0 * fine;
      }
      if (best_fine <= 1e-6) {
        FlowPath path;
        path.kind = FlowKind::finite;
        path.x_minus = x_minus;
        path.x_plus = x_plus;
        int nkeep = std::max(2, static_cast<int>(std::round(sigma_hit / step)));
        double step2 = sigma_hit / nkeep;
        FlowSegment seg;
        seg.step = step2;
        seg.start = x_minus;
        Vec2 qq = x_minus;
        seg.samples.push_back(qq);
        for (int k = 0; k < nkeep; ++k) {
          qq = rk4_step(chart, f, qq, step2);
          seg.samples.push_back(qq);
        }
        seg.end = seg.samples.back();
        path.segments.push_back(seg);
        return path;
      }
    }
  }

  if (!seg_minus.captured) return fail("forward flow from x_minus did not reach a critical point");
  const CriticalPoint* y0 = nearest_critical(cps, seg_minus.end, chart);
  if (!y0 || torus_dist(seg_minus.end, y0->location, chart.dim, chart.period) > kMinSep)
    return fail("forward capture does not match a known critical point");

  FlowSegment seg_plus_back = integrate_flow_backward(chart, f, x_plus, max_len, step);
  if (!seg_plus_back.captured)
    return fail("backward flow from x_plus did not reach a critical point");
  const CriticalPoint* yk = nearest_critical(cps, seg_plus_back.end, chart);
  if (!yk || torus_dist(seg_plus_back.end, yk->location, chart.dim, chart.period) > kMinSep)
    return fail("backward capture does not match a known critical point");

  FlowSegment seg_plus;  // y^k -> x_plus, forward orientation
  seg_plus.step = seg_plus_back.step;
  seg_plus.samples.assign(seg_plus_back.samples.rbegin(), seg_plus_back.samples.rend());
  seg_plus.start = seg_plus.samples.front();
  seg_plus.end = seg_plus.samples.back();

  int i0 = static_cast<int>(y0 - cps.data());
  int ik = static_cast<int>(yk - cps.data());

  std::vector<int> chain;  // criticals y^0 ... y^k by catalog index
  std::vector<ConnectionEdge> used_edges;
  if (i0 == ik) {
    chain = {i0};
  } else {
    std::vector<ConnectionEdge> edges = connection_edges(chart, f, cps);
    // Breadth-first over criticals; f strictly increases along edges, so the
    // search space is a DAG.
    std::vector<int> prev(cps.size(), -2);
    std::vector<int> prev_edge(cps.size(), -1);
    std::vector<int> depth(cps.size(), 0);
    std::vector<int> queue{i0};
    prev[i0] = -1;
    size_t head = 0;
    while (head < queue.size()) {
      int cur = queue[head++];
      if (cur == ik) break;
      for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
        if (edges[e].from != cur) continue;
        int nxt = edges[e].to;
        if (prev[nxt] != -2) continue;
        prev[nxt] = cur;
        prev_edge[nxt] = e;
        depth[nxt] = depth[cur] + 1;
        queue.push_back(nxt);
      }
    }
    if (prev[ik] == -2) return fail("no connecting chain between captured criticals");
    for (int cur = ik; cur != -1; cur = prev[cur]) {
      chain.push_back(cur);
      if (prev[cur] >= 0) used_edges.push_back(edges[prev_edge[cur]]);
    }
    std::reverse(chain.begin(), chain.end());
    std::reverse(used_edges.begin(), used_edges.end());
  }

  if (static_cast<int>(chain.size()) > max_breaks)
    return fail("chain requires more than max_breaks crossed criticals");

  FlowPath path;
  path.kind = FlowKind::broken;
  path.x_minus = x_minus;
  path.x_plus = x_plus;
  path.segments.push_back(seg_minus);
  for (const auto& e : used_edges) path.segments.push_back(e.orbit);
  path.segments.push_back(seg_plus);
  for (int idx : chain) path.crossed_criticals.push_back(cps[idx]);
  return path;
}

double morse_energy_gap(const MetricChart& chart, const MorseData& f) {
  std::vector<CriticalPoint> cps = find_criticals(chart, f);
  std::vector<ConnectionEdge> edges = connection_edges(chart, f, cps);
  double gap = 0.0;
  bool any = false;
  for (const auto& e : edges) {
    double d = f.f(cps[e.to].location) - f.f(cps[e.from].location);
    if (d <= 0.0) continue;
    if (!any || d < gap) gap = d;
    any = true;
  }
  return any ? gap : 0.0;
}

std::vector<std::array<int, 2>> connecting_orbits(const MetricChart& chart, const MorseData& f) {
  std::vector<CriticalPoint> cps = find_criticals(chart, f);
  std::vector<ConnectionEdge> edges = connection_edges(chart, f, cps);
  std::vector<std::array<int, 2>> out;
  for (const auto& e : edges) {
    std::array<int, 2> pair{e.from, e.to};
    bool dup = false;
    for (const auto& p : out) dup = dup || p == pair;
    if (!dup) out.push_back(pair);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Vec2 flowpath_eval(const FlowPath& path, double sigma) {
  if (path.segments.empty()) throw GridError("flowpath_eval: empty path");
  const FlowSegment& seg = path.segments.front();
  const int n = static_cast<int>(seg.samples.size());
  double u = sigma / seg.step;
  if (u <= 0.0) return seg.samples.front();
  if (u >= n - 1) {
    if (seg.captured || u < n - 1 + 0.5) return seg.samples.back();
    throw GridError("flowpath_eval: sigma beyond a non-captured segment");
  }
  int i = static_cast<int>(std::floor(u));
  double w = u - i;
  return (1.0 - w) * seg.samples[i] + w * seg.samples[i + 1];
}

}  // namespace adia
