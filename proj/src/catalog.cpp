#include "adia/catalog.hpp"

#include <cmath>
#include <cstdlib>

#include "adia/spectral.hpp"

namespace adia {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double get_num(const ParamMap& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  if (it == p.end()) return fallback;
  char* end = nullptr;
  double v = std::strtod(it->second.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw ConfigValueError("parameter '" + key + "' is not a number: " + it->second);
  return v;
}

int get_int(const ParamMap& p, const std::string& key, int fallback) {
  double v = get_num(p, key, fallback);
  return static_cast<int>(v);
}
}  // namespace

MetricChart chart_flat(int dim) {
  MetricChart c;
  c.dim = dim;
  c.g = [](const Vec2&) { return Mat2::Identity(); };
  c.dg = [](const Vec2&) { return std::array<Mat2, 2>{Mat2::Zero(), Mat2::Zero()}; };
  return c;
}

MetricChart chart_conformal_1d(double amplitude, double phase) {
  MetricChart c;
  c.dim = 1;
  auto phi = [amplitude, phase](double q) { return amplitude * std::cos(kTwoPi * (q - phase)); };
  auto dphi = [amplitude, phase](double q) {
    return -amplitude * kTwoPi * std::sin(kTwoPi * (q - phase));
  };
  c.g = [phi](const Vec2& q) {
    Mat2 m = Mat2::Identity();
    m(0, 0) = std::exp(2.0 * phi(q[0]));
    return m;
  };
  c.dg = [phi, dphi](const Vec2& q) {
    std::array<Mat2, 2> d{Mat2::Zero(), Mat2::Zero()};
    d[0](0, 0) = 2.0 * dphi(q[0]) * std::exp(2.0 * phi(q[0]));
    return d;
  };
  return c;
}

MetricChart chart_diag_perturbed_2d(double amplitude) {
  MetricChart c;
  c.dim = 2;
  c.g = [amplitude](const Vec2& q) {
    Mat2 m = Mat2::Identity();
    m(0, 0) += amplitude * std::sin(kTwoPi * q[0]);
    m(1, 1) += amplitude * std::cos(kTwoPi * q[1]);
    return m;
  };
  c.dg = [amplitude](const Vec2& q) {
    std::array<Mat2, 2> d{Mat2::Zero(), Mat2::Zero()};
    d[0](0, 0) = amplitude * kTwoPi * std::cos(kTwoPi * q[0]);
    d[1](1, 1) = -amplitude * kTwoPi * std::sin(kTwoPi * q[1]);
    return d;
  };
  return c;
}

MorseData morse_cosine_1d(double amplitude, int wells, double phase) {
  MorseData m;
  const double w = kTwoPi * wells;
  m.f = [amplitude, w, phase](const Vec2& q) {
    return -amplitude * std::cos(w * (q[0] - phase)) / (w * w);
  };
  m.df = [amplitude, w, phase](const Vec2& q) {
    Vec2 v = Vec2::Zero();
    v[0] = amplitude * std::sin(w * (q[0] - phase)) / w;
    return v;
  };
  m.hess = [amplitude, w, phase](const Vec2& q) {
    Mat2 h = Mat2::Zero();
    h(0, 0) = amplitude * std::cos(w * (q[0] - phase));
    return h;
  };
  return m;
}

MorseData morse_cosine_2d(double amp1, int wells1, double phase1, double amp2, int wells2,
                          double phase2) {
  MorseData m;
  const double w1 = kTwoPi * wells1, w2 = kTwoPi * wells2;
  m.f = [=](const Vec2& q) {
    return -amp1 * std::cos(w1 * (q[0] - phase1)) / (w1 * w1) -
           amp2 * std::cos(w2 * (q[1] - phase2)) / (w2 * w2);
  };
  m.df = [=](const Vec2& q) {
    Vec2 v;
    v[0] = amp1 * std::sin(w1 * (q[0] - phase1)) / w1;
    v[1] = amp2 * std::sin(w2 * (q[1] - phase2)) / w2;
    return v;
  };
  m.hess = [=](const Vec2& q) {
    Mat2 h = Mat2::Zero();
    h(0, 0) = amp1 * std::cos(w1 * (q[0] - phase1));
    h(1, 1) = amp2 * std::cos(w2 * (q[1] - phase2));
    return h;
  };
  return m;
}

MorseData morse_constant() {
  MorseData m;
  m.f = [](const Vec2&) { return 0.0; };
  m.df = [](const Vec2&) { return Vec2(Vec2::Zero()); };
  m.hess = [](const Vec2&) { return Mat2(Mat2::Zero()); };
  return m;
}

OneForm aform_zero() {
  OneForm a;
  a.a = [](const Vec2&) { return Vec2(Vec2::Zero()); };
  a.da = [](const Vec2&) { return std::array<Vec2, 2>{Vec2::Zero(), Vec2::Zero()}; };
  return a;
}

OneForm aform_constant(double c1, double c2) {
  OneForm a;
  Vec2 v(c1, c2);
  a.a = [v](const Vec2&) { return v; };
  a.da = [](const Vec2&) { return std::array<Vec2, 2>{Vec2::Zero(), Vec2::Zero()}; };
  return a;
}

MetricChart make_chart(const std::string& id, const ParamMap& params) {
  MetricChart c;
  if (id == "flat") {
    c = chart_flat(get_int(params, "dim", 1));
  } else if (id == "conformal-1d") {
    c = chart_conformal_1d(get_num(params, "amplitude", 0.1), get_num(params, "phase", 0.0));
  } else if (id == "diag-perturbed-2d") {
    c = chart_diag_perturbed_2d(get_num(params, "amplitude", 0.1));
  } else {
    throw ConfigValueError("unknown chart id: " + id);
  }
  if (get_int(params, "spectral_dg", 0) != 0) {
    c.dg = spectral_metric_derivative(c.g, c.dim, c.period);
  }
  return c;
}

int chart_dim_of(const std::string& id) {
  if (id == "diag-perturbed-2d") return 2;
  return 1;  // flat defaults to 1 unless dim parameter says otherwise
}

MorseData make_morse(const std::string& id, const ParamMap& params) {
  if (id == "constant") return morse_constant();
  if (id == "cosine") {
    int dim = get_int(params, "dim", 1);
    if (dim == 1) {
      return morse_cosine_1d(get_num(params, "amplitude", 0.1), get_int(params, "wells", 1),
                             get_num(params, "phase", 0.0));
    }
    return morse_cosine_2d(get_num(params, "amplitude", 0.1), get_int(params, "wells", 1),
                           get_num(params, "phase", 0.0), get_num(params, "amplitude2", 0.1),
                           get_int(params, "wells2", 1), get_num(params, "phase2", 0.0));
  }
  throw ConfigValueError("unknown morse id: " + id);
}

OneForm make_aform(const std::string& id, const ParamMap& params) {
  if (id == "zero") return aform_zero();
  if (id == "constant")
    return aform_constant(get_num(params, "c1", 0.0), get_num(params, "c2", 0.0));
  throw ConfigValueError("unknown aform id: " + id);
}

std::vector<std::array<std::string, 3>> catalog_entries() {
  return {
      {"chart", "flat", "dim=1|2, spectral_dg=0|1"},
      {"chart", "conformal-1d", "amplitude, phase, spectral_dg=0|1"},
      {"chart", "diag-perturbed-2d", "amplitude, spectral_dg=0|1"},
      {"morse", "cosine", "dim, amplitude, wells, phase [, amplitude2, wells2, phase2]"},
      {"morse", "constant", ""},
      {"aform", "zero", ""},
      {"aform", "constant", "c1, c2"},
  };
}

}  // namespace adia
