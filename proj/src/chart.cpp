#include "adia/chart.hpp"

#include <Eigen/Eigenvalues>

namespace adia {

Mat2 MetricChart::metric_inv(const Vec2& q) const {
  Mat2 gq = g(q);
  Mat2 inv = Mat2::Identity();
  if (dim == 1) {
    if (gq(0, 0) <= 0.0) throw DegenerateMetricError("metric not positive at sample point");
    inv(0, 0) = 1.0 / gq(0, 0);
  } else {
    double det = gq(0, 0) * gq(1, 1) - gq(0, 1) * gq(1, 0);
    if (det <= 0.0 || gq(0, 0) <= 0.0)
      throw DegenerateMetricError("metric not positive definite at sample point");
    inv(0, 0) = gq(1, 1) / det;
    inv(1, 1) = gq(0, 0) / det;
    inv(0, 1) = -gq(0, 1) / det;
    inv(1, 0) = -gq(1, 0) / det;
  }
  return inv;
}

double MetricChart::conorm2(const Vec2& q, const Vec2& v) const {
  Mat2 gi = metric_inv(q);
  return v.dot(gi * v);
}

double MetricChart::norm2(const Vec2& q, const Vec2& h) const {
  Mat2 gq = g(q);
  return h.dot(gq * h);
}

Christoffel christoffel(const MetricChart& chart, const Vec2& q) {
  const int d = chart.dim;
  Mat2 gi = chart.metric_inv(q);  // throws on degenerate metric
  std::array<Mat2, 2> dgq = chart.dg(q);

  Christoffel out;
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) {
          s += gi(k, l) * (dgq[i](j, l) + dgq[j](i, l) - dgq[l](i, j));
        }
        out[k](i, j) = 0.5 * s;
        out[k](j, i) = out[k](i, j);
      }
    }
  }
  return out;
}

CotangentVec j0_apply(const MetricChart& chart, const Vec2& q, const CotangentVec& X) {
  Mat2 gq = chart.g(q);
  Mat2 gi = chart.metric_inv(q);
  CotangentVec out;
  out.h = -(gi * X.v);
  out.v = gq * X.h;
  if (chart.dim == 1) {
    out.h[1] = 0.0;
    out.v[1] = 0.0;
  }
  return out;
}

double metric_pair(const MetricChart& chart, const Vec2& q, const CotangentVec& X,
                   const CotangentVec& Y) {
  Mat2 gq = chart.g(q);
  Mat2 gi = chart.metric_inv(q);
  return X.h.dot(gq * Y.h) + X.v.dot(gi * Y.v);
}

std::vector<Vec2> path_derivative(const std::vector<Vec2>& f, double step) {
  const int n = static_cast<int>(f.size());
  if (n < 3) throw GridError("path_derivative: need at least 3 samples");
  std::vector<Vec2> df(n);
  df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * step);
  df[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * step);
  for (int i = 1; i + 1 < n; ++i) df[i] = (f[i + 1] - f[i - 1]) / (2.0 * step);
  return df;
}

Vec2 christoffel_contract_covector(const Christoffel& G, const Vec2& dQ, const Vec2& P, int dim) {
  Vec2 out = Vec2::Zero();
  for (int j = 0; j < dim; ++j) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) s += G[k](i, j) * dQ[i] * P[k];
    out[j] = s;
  }
  return out;
}

std::vector<Vec2> covariant_t(const MetricChart& chart, const std::vector<Vec2>& Q,
                              const std::vector<Vec2>& P, double step) {
  if (Q.size() != P.size()) throw GridError("covariant_t: Q and P sample counts differ");
  const int n = static_cast<int>(Q.size());
  if (n < 3) throw GridError("covariant_t: need at least 3 samples");
  std::vector<Vec2> dP = path_derivative(P, step);
  std::vector<Vec2> dQ = path_derivative(Q, step);
  std::vector<Vec2> out(n);
  for (int i = 0; i < n; ++i) {
    Christoffel G = christoffel(chart, Q[i]);
    out[i] = dP[i] - christoffel_contract_covector(G, dQ[i], P[i], chart.dim);
  }
  return out;
}

}  // namespace adia
