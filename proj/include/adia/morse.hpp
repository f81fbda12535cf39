#ifndef ADIA_MORSE_HPP
#define ADIA_MORSE_HPP

#include <functional>
#include <vector>

#include "adia/chart.hpp"

namespace adia {

struct CriticalPoint {
  Vec2 location = Vec2::Zero();
  int index = 0;       // number of negative Hessian eigenvalues
  double tolerance = 0.0;  // |df| at the stored root
};

/// A periodic scalar field with analytic differential and Hessian.
struct MorseData {
  std::function<double(const Vec2&)> f;
  std::function<Vec2(const Vec2&)> df;
  std::function<Mat2(const Vec2&)> hess;
  std::vector<CriticalPoint> critical_points;

  /// Returns a copy with f, df, hess multiplied by the given factor.
  MorseData scaled(double factor) const;
};

inline MorseData MorseData::scaled(double factor) const {
  MorseData out;
  auto f0 = f;
  auto df0 = df;
  auto h0 = hess;
  out.f = [f0, factor](const Vec2& q) { return factor * f0(q); };
  out.df = [df0, factor](const Vec2& q) { return Vec2(factor * df0(q)); };
  out.hess = [h0, factor](const Vec2& q) { return Mat2(factor * h0(q)); };
  out.critical_points = critical_points;  // critical set is scale invariant
  return out;
}

/// Hamiltonian vector field of f in splitting coordinates: X_f = (0, df(q)).
/// Its fiberwise flow is phi_t(q,p) = (q, p + t df(q)).
inline CotangentVec hamiltonian_field(const MetricChart& chart, const MorseData& f,
                                      const Vec2& q) {
  (void)chart;
  CotangentVec out;
  out.v = f.df(q);
  return out;
}

}  // namespace adia

#endif
