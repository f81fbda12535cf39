#ifndef ADIA_CHART_HPP
#define ADIA_CHART_HPP

#include <array>
#include <functional>
#include <vector>

#include "adia/types.hpp"

namespace adia {

/// A flat-torus chart R^d/(period Z)^d, d in {1,2}, carrying a smooth
/// periodic Riemannian metric g and its first partial derivatives dg.
/// All fields are stored padded to 2x2; for dim==1 the metric is
/// [[g11,0],[0,1]] and derivatives vanish in the padded slot.
struct MetricChart {
  int dim = 1;
  double period = 1.0;
  std::function<Mat2(const Vec2&)> g;                  // symmetric positive definite
  std::function<std::array<Mat2, 2>(const Vec2&)> dg;  // dg[i] = d g / d q_i

  Mat2 metric(const Vec2& q) const { return g(q); }

  /// Inverse metric, restricted to the chart dimension (padded slot stays 1).
  Mat2 metric_inv(const Vec2& q) const;

  /// Covector norm |v|^2 = v^T g^{-1} v.
  double conorm2(const Vec2& q, const Vec2& v) const;
  /// Tangent norm |h|^2 = h^T g h.
  double norm2(const Vec2& q, const Vec2& h) const;
};

/// Tangent vector of T(T*L) in the connection splitting: horizontal
/// (tangent to L) and vertical (covector) components.
struct CotangentVec {
  Vec2 h = Vec2::Zero();
  Vec2 v = Vec2::Zero();
};

/// Christoffel symbols Gamma^k_{ij}; G[k](i,j), symmetric in (i,j).
struct Christoffel {
  std::array<Mat2, 2> G{Mat2::Zero(), Mat2::Zero()};
  const Mat2& operator[](int k) const { return G[k]; }
  Mat2& operator[](int k) { return G[k]; }
};

/// Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}).
/// Throws DegenerateMetricError if g(q) is not positive definite.
Christoffel christoffel(const MetricChart& chart, const Vec2& q);

/// The Levi-Civita complex structure: (h,v) -> (-g^{-1} v, g h).
CotangentVec j0_apply(const MetricChart& chart, const Vec2& q, const CotangentVec& X);

/// Symplectic pairing omega((h1,v1),(h2,v2)) = <h1,v2> - <h2,v1>.
inline double omega_pair(const CotangentVec& X, const CotangentVec& Y) {
  return X.h.dot(Y.v) - Y.h.dot(X.v);
}

/// Metric pairing g(X,Y) = <h1, g h2> + <v1, g^{-1} v2> on T(T*L).
double metric_pair(const MetricChart& chart, const Vec2& q, const CotangentVec& X,
                   const CotangentVec& Y);

// ---------------------------------------------------------------------------
// Discrete covariant derivatives along sampled paths.
//
// Covector convention: (nabla_t P)_j = dP_j/dt - Gamma^k_{ij} (dQ/dt)^i P_k.
// Central differences interior, second-order one-sided at the ends.
// ---------------------------------------------------------------------------

/// Plain second-order derivative of a sampled curve of Vec2 values.
std::vector<Vec2> path_derivative(const std::vector<Vec2>& f, double step);

/// Covariant t-derivative of a covector path P over the base path Q.
/// Throws GridError when fewer than 3 samples are given.
std::vector<Vec2> covariant_t(const MetricChart& chart, const std::vector<Vec2>& Q,
                              const std::vector<Vec2>& P, double step);

/// Contraction (Gamma . dQ . P)_j = Gamma^k_{ij} dQ^i P_k used by covariant_t.
Vec2 christoffel_contract_covector(const Christoffel& G, const Vec2& dQ, const Vec2& P, int dim);

}  // namespace adia

#endif
