#include "adia/estimates.hpp"

#include <cmath>

namespace adia {

namespace {

// trapezoid over a t-column
double column_trapezoid(const std::vector<double>& vals, double ht) {
  double s = 0.0;
  const int n = static_cast<int>(vals.size()) - 1;
  for (int j = 0; j <= n; ++j) s += ((j == 0 || j == n) ? 0.5 : 1.0) * vals[j];
  return s * ht;
}

}  // namespace

CovectorGrid perturbed_section(const MetricChart& chart, const StripField& u,
                               const AdiabaticData& bc) {
  CovectorGrid out;
  for (int c = 0; c < 2; ++c) out[c] = Eigen::ArrayXXd::Zero(u.Ns + 1, u.Nt + 1);
  for (int i = 0; i <= u.Ns; ++i)
    for (int j = 0; j <= u.Nt; ++j) {
      Vec2 Q = u.Q(i, j);
      double t = u.t_of(j);
      Vec2 a = bc.a_form.a(Q);
      Vec2 b = a + bc.f.df(Q);
      Vec2 val = u.P(i, j) - bc.eps * t * b - bc.eps * (1.0 - t) * a;
      for (int c = 0; c < chart.dim; ++c) out[c](i, j) = val[c];
    }
  return out;
}

CovectorGrid grid_covariant(const MetricChart& chart, const StripField& u,
                            const CovectorGrid& field, bool along_s) {
  const int d = chart.dim;
  const int ns = u.Ns, nt = u.Nt;
  const double h = along_s ? u.hs() : u.ht();
  const int nline = along_s ? ns : nt;

  CovectorGrid out;
  for (int c = 0; c < 2; ++c) out[c] = Eigen::ArrayXXd::Zero(ns + 1, nt + 1);

  int off[4];
  double w[4];
  for (int i = 0; i <= ns; ++i) {
    for (int j = 0; j <= nt; ++j) {
      int line = along_s ? i : j;
      int n = deriv_stencil(line, nline, h, off, w);
      Vec2 dF = Vec2::Zero(), dQ = Vec2::Zero();
      for (int k = 0; k < n; ++k) {
        int ii = along_s ? i + off[k] : i;
        int jj = along_s ? j : j + off[k];
        for (int c = 0; c < d; ++c) {
          dF[c] += w[k] * (field[c](ii, jj) - field[c](i, j));
          dQ[c] += w[k] * (u.q[c](ii, jj) - u.q[c](i, j));
        }
      }
      Vec2 F(field[0](i, j), field[1](i, j));
      Christoffel G = christoffel(chart, u.Q(i, j));
      Vec2 val = dF - christoffel_contract_covector(G, dQ, F, d);
      for (int c = 0; c < d; ++c) out[c](i, j) = val[c];
    }
  }
  return out;
}

CovectorGrid lc_laplacian(const MetricChart& chart, const StripField& u,
                          const CovectorGrid& field) {
  CovectorGrid ds = grid_covariant(chart, u, field, true);
  CovectorGrid dss = grid_covariant(chart, u, ds, true);
  CovectorGrid dt = grid_covariant(chart, u, field, false);
  CovectorGrid dtt = grid_covariant(chart, u, dt, false);
  CovectorGrid out;
  for (int c = 0; c < 2; ++c) out[c] = dss[c] + dtt[c];
  return out;
}

double field_l2_norm(const MetricChart& chart, const StripField& u, const CovectorGrid& field) {
  double acc = 0.0;
  for (int i = 0; i <= u.Ns; ++i) {
    double wi = (i == 0 || i == u.Ns) ? 0.5 : 1.0;
    for (int j = 0; j <= u.Nt; ++j) {
      double wj = (j == 0 || j == u.Nt) ? 0.5 : 1.0;
      Vec2 F(field[0](i, j), field[1](i, j));
      acc += wi * wj * chart.conorm2(u.Q(i, j), F);
    }
  }
  return std::sqrt(acc * u.hs() * u.ht());
}

double field_w12_norm(const MetricChart& chart, const StripField& u, const CovectorGrid& field) {
  CovectorGrid ds = grid_covariant(chart, u, field, true);
  CovectorGrid dt = grid_covariant(chart, u, field, false);
  double a = field_l2_norm(chart, u, field);
  double b = field_l2_norm(chart, u, ds);
  double c = field_l2_norm(chart, u, dt);
  return std::sqrt(a * a + b * b + c * c);
}

GammaProfile gamma_profile(const MetricChart& chart, const StripField& u, const AdiabaticData& bc,
                           double delta) {
  if (2.0 * u.r < 2.5)
    throw GridError("gamma_profile: strip shorter than 2.5 units, inequality window undefined");

  const int ns = u.Ns, nt = u.Nt;
  const double hs = u.hs(), ht = u.ht();
  const double R = u.r - 1.0;

  GammaProfile prof;
  prof.delta = delta;
  prof.eps = bc.eps;
  prof.R = R;

  CovectorGrid pt = perturbed_section(chart, u, bc);
  CovectorGrid dsP = grid_covariant(chart, u, pt, true);
  CovectorGrid dtP = grid_covariant(chart, u, pt, false);

  prof.s.resize(ns + 1);
  prof.gamma.resize(ns + 1);
  prof.dirichlet.resize(ns + 1);
  std::vector<double> col(nt + 1), cold(nt + 1);
  for (int i = 0; i <= ns; ++i) {
    prof.s[i] = u.s_of(i);
    for (int j = 0; j <= nt; ++j) {
      Vec2 Q = u.Q(i, j);
      Vec2 P(pt[0](i, j), pt[1](i, j));
      Vec2 Ds(dsP[0](i, j), dsP[1](i, j));
      Vec2 Dt(dtP[0](i, j), dtP[1](i, j));
      col[j] = 0.5 * chart.conorm2(Q, P);
      cold[j] = chart.conorm2(Q, Ds) + chart.conorm2(Q, Dt);
    }
    prof.gamma[i] = column_trapezoid(col, ht);
    prof.dirichlet[i] = column_trapezoid(cold, ht);
  }

  // Coarsened second-difference stencil: spacing max(hs, r/200) in s.
  const int m = std::max(1, static_cast<int>(std::lround(std::max(hs, u.r / 200.0) / hs)));
  const double H = m * hs;
  prof.dgamma.resize(ns + 1);
  prof.ddgamma.resize(ns + 1);
  for (int i = 0; i <= ns; ++i) {
    if (i >= m && i + m <= ns) {
      prof.dgamma[i] = (prof.gamma[i + m] - prof.gamma[i - m]) / (2.0 * H);
      prof.ddgamma[i] = (prof.gamma[i + m] - 2.0 * prof.gamma[i] + prof.gamma[i - m]) / (H * H);
    } else if (i + 2 * m <= ns) {
      prof.dgamma[i] =
          (-3.0 * prof.gamma[i] + 4.0 * prof.gamma[i + m] - prof.gamma[i + 2 * m]) / (2.0 * H);
      prof.ddgamma[i] =
          (prof.gamma[i] - 2.0 * prof.gamma[i + m] + prof.gamma[i + 2 * m]) / (H * H);
    } else if (i >= 2 * m) {
      prof.dgamma[i] =
          (3.0 * prof.gamma[i] - 4.0 * prof.gamma[i - m] + prof.gamma[i - 2 * m]) / (2.0 * H);
      prof.ddgamma[i] =
          (prof.gamma[i] - 2.0 * prof.gamma[i - m] + prof.gamma[i - 2 * m]) / (H * H);
    } else {
      prof.dgamma[i] = 0.0;
      prof.ddgamma[i] = 0.0;
    }
  }

  auto node_of = [&](double s) {
    int i = static_cast<int>(std::lround((s + u.r) / hs));
    return std::min(ns, std::max(0, i));
  };
  prof.window_lo = node_of(-R - 0.75);
  prof.window_hi = node_of(R + 0.75);

  double worst = 0.0;  // max of delta^2 gamma + dirichlet/3 - gamma''
  double slack_at_zero_K = 0.0;
  for (int i = prof.window_lo; i <= prof.window_hi; ++i) {
    double v = delta * delta * prof.gamma[i] + prof.dirichlet[i] / 3.0 - prof.ddgamma[i];
    worst = std::max(worst, v);
  }
  prof.measured_K = (worst <= 0.0) ? 0.0 : worst / (bc.eps > 0.0 ? bc.eps * bc.eps : 1.0);

  slack_at_zero_K = 1e300;
  const double Keps2 = prof.measured_K * bc.eps * bc.eps;
  for (int i = prof.window_lo; i <= prof.window_hi; ++i) {
    double v = prof.ddgamma[i] - delta * delta * prof.gamma[i] - prof.dirichlet[i] / 3.0 + Keps2;
    slack_at_zero_K = std::min(slack_at_zero_K, v);
  }
  prof.slack = slack_at_zero_K;

  int i_left = node_of(-R - 0.75);
  int i_right = node_of(R + 0.75);
  prof.C1 = 9.0 * prof.gamma[i_left];
  prof.C2 = 9.0 * std::abs(prof.dgamma[i_right] + delta * prof.gamma[i_right]) / (2.0 * delta);
  prof.C3 = 9.0 / (delta * delta) + 1.25;
  return prof;
}

EstimateReport check_decay_bound(const GammaProfile& prof, double R) {
  EstimateReport rep;
  rep.measured_K = prof.measured_K;
  const int ns = static_cast<int>(prof.s.size()) - 1;
  const double hs = (prof.s.back() - prof.s.front()) / ns;
  auto node_of = [&](double s) {
    int i = static_cast<int>(std::lround((s - prof.s.front()) / hs));
    return std::min(ns, std::max(0, i));
  };
  rep.window_lo = node_of(-R);
  rep.window_hi = node_of(R);

  const double Keps2 = prof.measured_K * prof.eps * prof.eps;
  const int half = std::max(1, static_cast<int>(std::lround(0.5 / hs)));
  rep.violations = 0;
  for (int i = rep.window_lo; i <= rep.window_hi; ++i) {
    double s = prof.s[i];
    double env = prof.C1 * std::exp(-prof.delta * (R + s)) +
                 prof.C2 * std::exp(-prof.delta * (R - s)) + prof.C3 * Keps2;
    // trapezoid of dirichlet/3 over the half-unit window, nearest-node bounds
    int lo = std::max(0, i - half), hi = std::min(ns, i + half);
    double integral = 0.0;
    for (int k = lo; k <= hi; ++k)
      integral += ((k == lo || k == hi) ? 0.5 : 1.0) * prof.dirichlet[k] / 3.0;
    integral *= hs;
    double lhs = prof.gamma[i] + integral;
    rep.envelope.push_back(env);
    rep.lhs.push_back(lhs);
    if (lhs > env) ++rep.violations;
  }
  rep.inequality_holds = (prof.slack >= -1e-14);
  return rep;
}

double c1_envelope(const MetricChart& chart, const StripField& u, const AdiabaticData& bc,
                   double R, double d_rate) {
  CovectorGrid pt = perturbed_section(chart, u, bc);
  CovectorGrid dsP = grid_covariant(chart, u, pt, true);
  CovectorGrid dtP = grid_covariant(chart, u, pt, false);

  const int ns = u.Ns, nt = u.Nt;
  const double hs = u.hs();
  auto node_of = [&](double s) {
    int i = static_cast<int>(std::lround((s + u.r) / hs));
    return std::min(ns, std::max(0, i));
  };
  int lo = node_of(-R), hi = node_of(R);

  double kappa = 0.0;
  for (int i = lo; i <= hi; ++i) {
    double s = u.s_of(i);
    double m = 0.0;
    for (int j = 0; j <= nt; ++j) {
      Vec2 Q = u.Q(i, j);
      Vec2 P(pt[0](i, j), pt[1](i, j));
      Vec2 Ds(dsP[0](i, j), dsP[1](i, j));
      Vec2 Dt(dtP[0](i, j), dtP[1](i, j));
      double v = std::sqrt(chart.conorm2(Q, P)) + std::sqrt(chart.conorm2(Q, Ds)) +
                 std::sqrt(chart.conorm2(Q, Dt));
      m = std::max(m, v);
    }
    double shape = std::exp(-d_rate * (R + s)) + std::exp(-d_rate * (R - s)) + bc.eps;
    kappa = std::max(kappa, m / shape);
  }
  return kappa;
}

}  // namespace adia
