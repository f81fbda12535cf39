#include "adia/strip.hpp"

#include <cmath>

namespace adia {

StripField::StripField(double r_, int Ns_, int Nt_) : r(r_), Ns(Ns_), Nt(Nt_) {
  for (int c = 0; c < 2; ++c) {
    q[c] = Eigen::ArrayXXd::Zero(Ns + 1, Nt + 1);
    p[c] = Eigen::ArrayXXd::Zero(Ns + 1, Nt + 1);
  }
}

double AdiabaticData::closedness_defect(const MetricChart& chart, int samples) const {
  if (chart.dim == 1) return 0.0;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
    for (int j = 0; j < samples; ++j) {
      Vec2 q(chart.period * i / samples, chart.period * j / samples);
      auto da = a_form.da(q);
      worst = std::max(worst, std::abs(da[0][1] - da[1][0]));
    }
  return worst;
}

Eigen::ArrayXXd grid_deriv_s(const Eigen::ArrayXXd& a, double hs) {
  const int ns = static_cast<int>(a.rows()) - 1;
  Eigen::ArrayXXd d(a.rows(), a.cols());
  d.row(0) = (-3.0 * a.row(0) + 4.0 * a.row(1) - a.row(2)) / (2.0 * hs);
  d.row(ns) = (3.0 * a.row(ns) - 4.0 * a.row(ns - 1) + a.row(ns - 2)) / (2.0 * hs);
  for (int i = 1; i < ns; ++i) d.row(i) = (a.row(i + 1) - a.row(i - 1)) / (2.0 * hs);
  return d;
}

Eigen::ArrayXXd grid_deriv_t(const Eigen::ArrayXXd& a, double ht) {
  const int nt = static_cast<int>(a.cols()) - 1;
  Eigen::ArrayXXd d(a.rows(), a.cols());
  d.col(0) = (-3.0 * a.col(0) + 4.0 * a.col(1) - a.col(2)) / (2.0 * ht);
  d.col(nt) = (3.0 * a.col(nt) - 4.0 * a.col(nt - 1) + a.col(nt - 2)) / (2.0 * ht);
  for (int j = 1; j < nt; ++j) d.col(j) = (a.col(j + 1) - a.col(j - 1)) / (2.0 * ht);
  return d;
}

double ResidualField::interior_max(int dim) const {
  const int ns = static_cast<int>(e1[0].rows()) - 1;
  const int nt = static_cast<int>(e1[0].cols()) - 1;
  double m = 0.0;
  for (int c = 0; c < dim; ++c)
    for (int i = 1; i < ns; ++i)
      for (int j = 1; j < nt; ++j)
        m = std::max({m, std::abs(e1[c](i, j)), std::abs(e2[c](i, j))});
  return m;
}

double ResidualField::interior_l2(int dim, double hs, double ht) const {
  const int ns = static_cast<int>(e1[0].rows()) - 1;
  const int nt = static_cast<int>(e1[0].cols()) - 1;
  double s = 0.0;
  for (int c = 0; c < dim; ++c)
    for (int i = 1; i < ns; ++i)
      for (int j = 1; j < nt; ++j)
        s += (e1[c](i, j) * e1[c](i, j) + e2[c](i, j) * e2[c](i, j)) * hs * ht;
  return std::sqrt(s);
}

double ResidualField::boundary_max(int dim) const {
  const int ns = static_cast<int>(e1[0].rows()) - 1;
  const int nt = static_cast<int>(e1[0].cols()) - 1;
  double m = 0.0;
  for (int c = 0; c < dim; ++c)
    for (int i = 0; i <= ns; ++i) m = std::max({m, std::abs(e1[c](i, 0)), std::abs(e1[c](i, nt))});
  return m;
}

namespace {
// Recompute the center weight as minus the sum of the others so the stencil
// annihilates constant fields exactly in floating point.
void compensate_center(int n, const int* offsets, double* weights) {
  double sum = 0.0;
  int center = -1;
  for (int k = 0; k < n; ++k) {
    if (offsets[k] == 0)
      center = k;
    else
      sum += weights[k];
  }
  if (center >= 0) weights[center] = -sum;
}
}  // namespace

int deriv_stencil(int i, int n, double h, int* offsets, double* weights) {
  if (i == 0) {
    offsets[0] = 0;
    offsets[1] = 1;
    offsets[2] = 2;
    weights[0] = -1.5 / h;
    weights[1] = 2.0 / h;
    weights[2] = -0.5 / h;
    compensate_center(3, offsets, weights);
    return 3;
  }
  if (i == n) {
    offsets[0] = 0;
    offsets[1] = -1;
    offsets[2] = -2;
    weights[0] = 1.5 / h;
    weights[1] = -2.0 / h;
    weights[2] = 0.5 / h;
    compensate_center(3, offsets, weights);
    return 3;
  }
  // Lines 1 and 2 from each edge take biased stencils anchored at the edge
  // node. Collocated central differences otherwise leave a line-parity kernel
  // (values alternating on even/odd lines); each biased pair constrains that
  // family, and the two ends deliberately use members with different parity
  // functionals so the combined rank kills it completely.
  if (i == 1 || i == n - 1) {
    int sgn = (i == 1) ? 1 : -1;
    offsets[0] = -sgn;
    offsets[1] = 0;
    offsets[2] = sgn;
    offsets[3] = 2 * sgn;
    weights[0] = -sgn / (3.0 * h);
    weights[1] = -sgn * 0.5 / h;
    weights[2] = sgn / h;
    weights[3] = -sgn / (6.0 * h);
    compensate_center(4, offsets, weights);
    return 4;
  }
  if (i == 2) {
    offsets[0] = -2;
    offsets[1] = -1;
    offsets[2] = 0;
    offsets[3] = 1;
    weights[0] = 1.0 / (6.0 * h);
    weights[1] = -1.0 / h;
    weights[2] = 0.5 / h;
    weights[3] = 1.0 / (3.0 * h);
    return 4;
  }
  if (i == n - 2) {
    offsets[0] = 2;
    offsets[1] = 1;
    offsets[2] = 0;
    weights[0] = -0.5 / h;
    weights[1] = 2.0 / h;
    weights[2] = -1.5 / h;
    compensate_center(3, offsets, weights);
    return 3;
  }
  offsets[0] = -1;
  offsets[1] = 1;
  weights[0] = -0.5 / h;
  weights[1] = 0.5 / h;
  return 2;
}

namespace {

// Differences against the center value are taken before weighting so that
// constant fields are annihilated exactly (the weights sum to exactly zero).
Vec2 stencil_apply(const std::array<Eigen::ArrayXXd, 2>& field, int i, int j, bool along_s,
                   const int* off, const double* w, int npts) {
  Vec2 out = Vec2::Zero();
  for (int k = 0; k < npts; ++k) {
    int ii = along_s ? i + off[k] : i;
    int jj = along_s ? j : j + off[k];
    out[0] += w[k] * (field[0](ii, jj) - field[0](i, j));
    out[1] += w[k] * (field[1](ii, jj) - field[1](i, j));
  }
  return out;
}
}  // namespace

ResidualField cr_residual(const MetricChart& chart, const StripField& u, const AdiabaticData& bc,
                          EquationMode mode) {
  const int d = chart.dim;
  const int ns = u.Ns, nt = u.Nt;
  const double hs = u.hs(), ht = u.ht();

  ResidualField out;
  for (int c = 0; c < 2; ++c) {
    out.e1[c] = Eigen::ArrayXXd::Zero(ns + 1, nt + 1);
    out.e2[c] = Eigen::ArrayXXd::Zero(ns + 1, nt + 1);
  }

  int soff[4], toff[4];
  double sw[4], tw[4];
  for (int i = 0; i <= ns; ++i) {
    int sn = deriv_stencil(i, ns, hs, soff, sw);
    for (int j = 0; j <= nt; ++j) {
      int tn = deriv_stencil(j, nt, ht, toff, tw);
      Vec2 Q = u.Q(i, j), P = u.P(i, j);
      Mat2 g = chart.g(Q);
      Christoffel G = christoffel(chart, Q);
      Vec2 dsq = stencil_apply(u.q, i, j, true, soff, sw, sn);
      Vec2 dtq = stencil_apply(u.q, i, j, false, toff, tw, tn);
      Vec2 dsp = stencil_apply(u.p, i, j, true, soff, sw, sn);
      Vec2 dtp = stencil_apply(u.p, i, j, false, toff, tw, tn);

      Vec2 nablat = dtp - christoffel_contract_covector(G, dtq, P, d);
      Vec2 nablas = dsp - christoffel_contract_covector(G, dsq, P, d);
      Vec2 e1 = g * dsq - nablat;
      Vec2 e2 = g * dtq + nablas;
      if (mode == EquationMode::floer_modified) e1 -= bc.eps * bc.f.df(Q);

      if (j == 0) {
        Vec2 target = (mode == EquationMode::floer_modified) ? Vec2(Vec2::Zero())
                                                             : bc.bottom_target(Q);
        e1 = P - target;
      } else if (j == nt) {
        Vec2 target = (mode == EquationMode::floer_modified) ? Vec2(Vec2::Zero())
                                                             : bc.top_target(Q);
        e1 = P - target;
      }
      for (int c = 0; c < d; ++c) {
        out.e1[c](i, j) = e1[c];
        out.e2[c](i, j) = e2[c];
      }
    }
  }
  return out;
}

double omega_energy(const MetricChart& chart, const StripField& u) {
  const int d = chart.dim;
  const int ns = u.Ns, nt = u.Nt;
  const double hs = u.hs(), ht = u.ht();

  std::array<Eigen::ArrayXXd, 2> dsQ, dtQ, dsP, dtP;
  for (int c = 0; c < d; ++c) {
    dsQ[c] = grid_deriv_s(u.q[c], hs);
    dtQ[c] = grid_deriv_t(u.q[c], ht);
    dsP[c] = grid_deriv_s(u.p[c], hs);
    dtP[c] = grid_deriv_t(u.p[c], ht);
  }

  double total = 0.0;
  for (int i = 0; i <= ns; ++i) {
    double wi = (i == 0 || i == ns) ? 0.5 : 1.0;
    for (int j = 0; j <= nt; ++j) {
      double wj = (j == 0 || j == nt) ? 0.5 : 1.0;
      double integrand = 0.0;
      for (int c = 0; c < d; ++c)
        integrand += dsQ[c](i, j) * dtP[c](i, j) - dtQ[c](i, j) * dsP[c](i, j);
      total += wi * wj * integrand;
    }
  }
  return total * hs * ht;
}

StokesEnergy stokes_energy(const MetricChart& chart, const StripField& u,
                           const AdiabaticData& bc) {
  const int d = chart.dim;
  const int ns = u.Ns, nt = u.Nt;
  const double ht = u.ht();

  std::array<Eigen::ArrayXXd, 2> dtQ;
  for (int c = 0; c < d; ++c) dtQ[c] = grid_deriv_t(u.q[c], ht);

  auto side_integral = [&](int i) {
    double s = 0.0;
    for (int j = 0; j <= nt; ++j) {
      double wj = (j == 0 || j == nt) ? 0.5 : 1.0;
      Vec2 Q = u.Q(i, j), P = u.P(i, j);
      Vec2 lam = -P + bc.eps * bc.a_form.a(Q);
      double integrand = 0.0;
      for (int c = 0; c < d; ++c) integrand += lam[c] * dtQ[c](i, j);
      s += wj * integrand;
    }
    return s * ht;
  };

  StokesEnergy out;
  double f_right = bc.f.f(u.Q(ns, nt));
  double f_left = bc.f.f(u.Q(0, nt));
  out.top_term = bc.eps * (f_right - f_left);
  out.total = side_integral(ns) - side_integral(0) + out.top_term;
  return out;
}

StripField floer_oracle(const MetricChart& chart, const MorseData& f, const Vec2& q0, double r,
                        int Ns, int Nt) {
  StripField u(r, Ns, Nt);
  const double hs = u.hs();

  auto field = [&](const Vec2& q) {
    Vec2 v = chart.metric_inv(q) * f.df(q);
    if (chart.dim == 1) v[1] = 0.0;
    return v;
  };

  std::vector<Vec2> Q(Ns + 1);
  Q[0] = q0;
  for (int i = 0; i < Ns; ++i) {
    Vec2 k1 = field(Q[i]);
    Vec2 k2 = field(Q[i] + 0.5 * hs * k1);
    Vec2 k3 = field(Q[i] + 0.5 * hs * k2);
    Vec2 k4 = field(Q[i] + hs * k3);
    Q[i + 1] = Q[i] + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  for (int i = 0; i <= Ns; ++i) {
    Vec2 dfq = f.df(Q[i]);
    for (int j = 0; j <= Nt; ++j) {
      u.setQ(i, j, Q[i]);
      u.setP(i, j, u.t_of(j) * dfq);
    }
  }
  return u;
}

StripField adiabatic_seed(const MetricChart& chart, const AdiabaticData& bc, double r, int Ns,
                          int Nt, const Vec2& q0) {
  StripField u = floer_oracle(chart, bc.f.scaled(bc.eps), q0, r, Ns, Nt);
  for (int i = 0; i <= Ns; ++i) {
    Vec2 Q = u.Q(i, 0);
    Vec2 shift = bc.eps * bc.a_form.a(Q);
    for (int j = 0; j <= Nt; ++j) u.setP(i, j, Vec2(u.P(i, j) + shift));
  }
  return u;
}

StripField floer_twist(const StripField& u, const MorseData& f, double eps, int direction) {
  StripField v = u;
  for (int i = 0; i <= u.Ns; ++i)
    for (int j = 0; j <= u.Nt; ++j) {
      Vec2 dfq = f.df(u.Q(i, j));
      v.setP(i, j, Vec2(u.P(i, j) - direction * u.t_of(j) * eps * dfq));
    }
  return v;
}

double field_sup_distance(const StripField& a, const StripField& b, int dim) {
  double m = 0.0;
  for (int c = 0; c < dim; ++c) {
    m = std::max(m, (a.q[c] - b.q[c]).abs().maxCoeff());
    m = std::max(m, (a.p[c] - b.p[c]).abs().maxCoeff());
  }
  return m;
}

}  // namespace adia
