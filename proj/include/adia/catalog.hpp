#ifndef ADIA_CATALOG_HPP
#define ADIA_CATALOG_HPP

#include <map>
#include <string>
#include <vector>

#include "adia/chart.hpp"
#include "adia/morse.hpp"

namespace adia {

/// A one-form on L together with its coordinate derivative, da[i](j) = d_i a_j.
struct OneForm {
  std::function<Vec2(const Vec2&)> a;
  std::function<std::array<Vec2, 2>(const Vec2&)> da;
};

MetricChart chart_flat(int dim);
/// g(q) = exp(2 phi(q)) with phi(q) = amplitude * cos(2 pi (q - phase)).
MetricChart chart_conformal_1d(double amplitude, double phase);
/// g(q) = I + amplitude * diag(sin 2 pi q1, cos 2 pi q2).
MetricChart chart_diag_perturbed_2d(double amplitude);

/// Cosine-well Morse function, C^2 size = amplitude:
///   f(q) = -amplitude * cos(2 pi wells (q - phase)) / (2 pi wells)^2 per axis.
MorseData morse_cosine_1d(double amplitude, int wells, double phase);
MorseData morse_cosine_2d(double amp1, int wells1, double phase1, double amp2, int wells2,
                          double phase2);
MorseData morse_constant();

OneForm aform_zero();
OneForm aform_constant(double c1, double c2);

// --- config-driven construction -------------------------------------------

using ParamMap = std::map<std::string, std::string>;

struct ConfigValueError : std::runtime_error {
  explicit ConfigValueError(const std::string& what) : std::runtime_error(what) {}
};

MetricChart make_chart(const std::string& id, const ParamMap& params);
MorseData make_morse(const std::string& id, const ParamMap& params);
OneForm make_aform(const std::string& id, const ParamMap& params);
int chart_dim_of(const std::string& id);

/// Catalog listing for the `catalog` CLI command: (kind, id, parameter help).
std::vector<std::array<std::string, 3>> catalog_entries();

}  // namespace adia

#endif
