#ifndef ADIA_TYPES_HPP
#define ADIA_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

namespace adia {

// Points, tangents and covectors live in a fixed 2-slot container; charts of
// dimension 1 keep the second slot at exactly 0, so norms and contractions
// are unaffected. Operations that are dimension-sensitive (eigenvalues,
// inverses, index counts) must restrict to the leading dim x dim block.
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct DegenerateMetricError : std::runtime_error {
  explicit DegenerateMetricError(const std::string& what) : std::runtime_error(what) {}
};

struct NonMorseError : std::runtime_error {
  explicit NonMorseError(const std::string& what) : std::runtime_error(what) {}
};

struct GridError : std::runtime_error {
  explicit GridError(const std::string& what) : std::runtime_error(what) {}
};

struct InconsistentLimitError : std::runtime_error {
  explicit InconsistentLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Wrap a coordinate into [0, period).
inline double wrap_coord(double x, double period) {
  double y = std::fmod(x, period);
  if (y < 0.0) y += period;
  return y;
}

/// Signed distance of minimal absolute value between two coordinates mod period.
inline double wrap_diff(double a, double b, double period) {
  double d = std::fmod(a - b, period);
  if (d > 0.5 * period) d -= period;
  if (d < -0.5 * period) d += period;
  return d;
}

/// Euclidean-coordinate distance on the torus (chart units, not metric units).
inline double torus_dist(const Vec2& a, const Vec2& b, int dim, double period) {
  double s = 0.0;
  for (int c = 0; c < dim; ++c) {
    double d = wrap_diff(a[c], b[c], period);
    s += d * d;
  }
  return std::sqrt(s);
}

inline Vec2 wrap_point(const Vec2& q, int dim, double period) {
  Vec2 w = Vec2::Zero();
  for (int c = 0; c < dim; ++c) w[c] = wrap_coord(q[c], period);
  return w;
}

}  // namespace adia

#endif
