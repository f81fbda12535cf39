#ifndef ADIA_MORSE_FLOW_HPP
#define ADIA_MORSE_FLOW_HPP

#include <optional>
#include <string>
#include <vector>

#include "adia/catalog.hpp"
#include "adia/chart.hpp"
#include "adia/morse.hpp"

namespace adia {

constexpr double kCpTol = 1e-7;    // critical point tolerance, chart units
constexpr double kMinSep = 1e-3;   // deduplication separation for criticals

struct FlowSegment {
  std::vector<Vec2> samples;  // Q on a uniform sigma grid
  double step = 0.0;
  Vec2 start = Vec2::Zero();
  Vec2 end = Vec2::Zero();
  bool captured = false;  // terminated early at a critical point
};

enum class FlowKind { finite, half_infinite_pos, half_infinite_neg, bi_infinite, broken };

/// A (possibly broken) gradient flow line; consecutive segments meet at the
/// crossed critical points, and f strictly increases along each segment
/// (flow convention dQ/ds = +grad f).
struct FlowPath {
  std::vector<FlowSegment> segments;
  std::vector<CriticalPoint> crossed_criticals;  // y^0 ... y^k
  Vec2 x_minus = Vec2::Zero();
  Vec2 x_plus = Vec2::Zero();
  FlowKind kind = FlowKind::finite;
  std::string diagnostic;  // filled when assembly fails or degrades
};

/// RK4 integration of dQ/ds = g^{-1} df(Q) from q0 over the given length.
/// Terminates early (captured flag) when |df(Q)| < cp_tol/10.
FlowSegment integrate_flow(const MetricChart& chart, const MorseData& f, const Vec2& q0,
                           double length, double step, double cp_tol = kCpTol);

/// Same vector field integrated backwards in sigma.
FlowSegment integrate_flow_backward(const MetricChart& chart, const MorseData& f, const Vec2& q0,
                                    double length, double step, double cp_tol = kCpTol);

/// Integration for orbits departing a critical point: critical-point capture
/// stays disarmed until the orbit clears 10*min_sep from its start.
FlowSegment integrate_flow_from_critical(const MetricChart& chart, const MorseData& f,
                                         const Vec2& q0, double length, double step,
                                         double cp_tol = kCpTol);

/// Newton on df = 0 from a 32^dim seed grid, deduplicated at min_sep.
/// Throws NonMorseError when a root has |det hess| < 1e-8.
std::vector<CriticalPoint> find_criticals(const MetricChart& chart, const MorseData& f,
                                          double cp_tol = kCpTol, double min_sep = kMinSep);

/// Broken flow line from x_minus to x_plus: forward capture, backward source,
/// then a chain of connecting orbits through criticals with f increasing.
/// Returns nullopt (with no side effects) when no chain exists within
/// max_breaks; the failure reason is reported through `diagnostic` if given.
std::optional<FlowPath> assemble_broken(const MetricChart& chart, const MorseData& f,
                                        const Vec2& x_minus, const Vec2& x_plus, int max_breaks,
                                        std::string* diagnostic = nullptr);

/// inf { f(y+) - f(y-) : nonconstant connecting flow line y- -> y+ }, the
/// Morse-energy quantum of the function; 0 when no connection exists.
double morse_energy_gap(const MetricChart& chart, const MorseData& f);

/// Distinct connecting orbits between critical points (indices into the
/// find_criticals ordering). d=2 searches index-difference-one pairs by
/// unstable-direction shooting with angle bisection.
std::vector<std::array<int, 2>> connecting_orbits(const MetricChart& chart, const MorseData& f);

/// Fill critical_points on a MorseData via find_criticals.
void attach_criticals(const MetricChart& chart, MorseData& f);

/// Evaluate a FlowPath at arc parameter sigma relative to its first segment,
/// extending by constant values past the recorded samples.
Vec2 flowpath_eval(const FlowPath& path, double sigma);

}  // namespace adia

#endif
