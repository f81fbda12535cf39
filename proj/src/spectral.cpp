#include "adia/spectral.hpp"

#include <cmath>

namespace adia {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Frequency index for DFT bin k of an n-point transform (negative half mapped down).
int freq_of(int k, int n) { return (k <= n / 2) ? k : k - n; }
}  // namespace

SpectralField1D::SpectralField1D(const std::vector<double>& samples, double period)
    : period_(period), n_(static_cast<int>(samples.size())) {
  coeff_.assign(n_, {0.0, 0.0});
  for (int k = 0; k < n_; ++k) {
    std::complex<double> c(0.0, 0.0);
    for (int j = 0; j < n_; ++j) {
      double ang = -kTwoPi * k * j / n_;
      c += samples[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    coeff_[k] = c / static_cast<double>(n_);
  }
  // Nyquist bin carries no usable derivative phase; drop it for odd symmetry.
  if (n_ % 2 == 0) coeff_[n_ / 2] = 0.5 * (coeff_[n_ / 2] + std::conj(coeff_[n_ / 2]));
}

double SpectralField1D::eval(double x) const {
  double u = x / period_;
  std::complex<double> s(0.0, 0.0);
  for (int k = 0; k < n_; ++k) {
    double m = freq_of(k, n_);
    double ang = kTwoPi * m * u;
    s += coeff_[k] * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return s.real();
}

double SpectralField1D::deriv(double x) const {
  double u = x / period_;
  std::complex<double> s(0.0, 0.0);
  for (int k = 0; k < n_; ++k) {
    double m = freq_of(k, n_);
    if (n_ % 2 == 0 && k == n_ / 2) continue;
    double ang = kTwoPi * m * u;
    std::complex<double> e(std::cos(ang), std::sin(ang));
    s += coeff_[k] * e * std::complex<double>(0.0, kTwoPi * m / period_);
  }
  return s.real();
}

SpectralField2D::SpectralField2D(const std::vector<double>& samples, int n, double period)
    : period_(period), n_(n) {
  coeff_.assign(static_cast<size_t>(n) * n, {0.0, 0.0});
  for (int k1 = 0; k1 < n; ++k1) {
    for (int k2 = 0; k2 < n; ++k2) {
      std::complex<double> c(0.0, 0.0);
      for (int j1 = 0; j1 < n; ++j1) {
        for (int j2 = 0; j2 < n; ++j2) {
          double ang = -kTwoPi * (static_cast<double>(k1) * j1 + static_cast<double>(k2) * j2) / n;
          c += samples[static_cast<size_t>(j1) * n + j2] *
               std::complex<double>(std::cos(ang), std::sin(ang));
        }
      }
      coeff_[static_cast<size_t>(k1) * n + k2] = c / static_cast<double>(n * n);
    }
  }
}

double SpectralField2D::eval(const Vec2& q) const {
  double u1 = q[0] / period_, u2 = q[1] / period_;
  std::complex<double> s(0.0, 0.0);
  for (int k1 = 0; k1 < n_; ++k1) {
    double m1 = freq_of(k1, n_);
    for (int k2 = 0; k2 < n_; ++k2) {
      double m2 = freq_of(k2, n_);
      double ang = kTwoPi * (m1 * u1 + m2 * u2);
      s += coeff_[static_cast<size_t>(k1) * n_ + k2] *
           std::complex<double>(std::cos(ang), std::sin(ang));
    }
  }
  return s.real();
}

double SpectralField2D::deriv(const Vec2& q, int axis) const {
  double u1 = q[0] / period_, u2 = q[1] / period_;
  std::complex<double> s(0.0, 0.0);
  for (int k1 = 0; k1 < n_; ++k1) {
    double m1 = freq_of(k1, n_);
    if (axis == 0 && n_ % 2 == 0 && k1 == n_ / 2) continue;
    for (int k2 = 0; k2 < n_; ++k2) {
      double m2 = freq_of(k2, n_);
      if (axis == 1 && n_ % 2 == 0 && k2 == n_ / 2) continue;
      double ang = kTwoPi * (m1 * u1 + m2 * u2);
      std::complex<double> e(std::cos(ang), std::sin(ang));
      double m = (axis == 0) ? m1 : m2;
      s += coeff_[static_cast<size_t>(k1) * n_ + k2] * e *
           std::complex<double>(0.0, kTwoPi * m / period_);
    }
  }
  return s.real();
}

std::function<std::array<Mat2, 2>(const Vec2&)> spectral_metric_derivative(
    const std::function<Mat2(const Vec2&)>& g, int dim, double period, int samples) {
  const int n = samples;
  if (dim == 1) {
    std::array<std::array<SpectralField1D, 2>, 2> entries;
    for (int a = 0; a < 2; ++a) {
      for (int b = a; b < 2; ++b) {
        std::vector<double> vals(n);
        for (int j = 0; j < n; ++j) {
          Vec2 q(period * j / n, 0.0);
          vals[j] = g(q)(a, b);
        }
        entries[a][b] = SpectralField1D(vals, period);
      }
    }
    return [entries](const Vec2& q) {
      std::array<Mat2, 2> dg{Mat2::Zero(), Mat2::Zero()};
      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
          double v = entries[a][b].deriv(q[0]);
          dg[0](a, b) = v;
          dg[0](b, a) = v;
        }
      return dg;
    };
  }

  std::array<std::array<SpectralField2D, 2>, 2> entries;
  for (int a = 0; a < 2; ++a) {
    for (int b = a; b < 2; ++b) {
      std::vector<double> vals(static_cast<size_t>(n) * n);
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
          Vec2 q(period * j1 / n, period * j2 / n);
          vals[static_cast<size_t>(j1) * n + j2] = g(q)(a, b);
        }
      entries[a][b] = SpectralField2D(vals, n, period);
    }
  }
  return [entries](const Vec2& q) {
    std::array<Mat2, 2> dg{Mat2::Zero(), Mat2::Zero()};
    for (int axis = 0; axis < 2; ++axis)
      for (int a = 0; a < 2; ++a)
        for (int b = a; b < 2; ++b) {
          double v = entries[a][b].deriv(q, axis);
          dg[axis](a, b) = v;
          dg[axis](b, a) = v;
        }
    return dg;
  };
}

}  // namespace adia
