#ifndef ADIA_SPECTRAL_HPP
#define ADIA_SPECTRAL_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "adia/types.hpp"

namespace adia {

// Trigonometric interpolation of a periodic field sampled on a uniform grid.
// Grids are small and fixed (64 per axis), so coefficients come from a plain
// DFT and evaluation sums the series directly; derivatives multiply by ik.

/// Periodic scalar field on [0,period) sampled at n uniform points (1-d).
class SpectralField1D {
 public:
  SpectralField1D() = default;
  SpectralField1D(const std::vector<double>& samples, double period);

  double eval(double x) const;
  double deriv(double x) const;

 private:
  std::vector<std::complex<double>> coeff_;
  double period_ = 1.0;
  int n_ = 0;
};

/// Periodic scalar field on [0,period)^2 sampled on an n x n uniform grid.
class SpectralField2D {
 public:
  SpectralField2D() = default;
  SpectralField2D(const std::vector<double>& samples, int n, double period);

  double eval(const Vec2& q) const;
  double deriv(const Vec2& q, int axis) const;

 private:
  std::vector<std::complex<double>> coeff_;  // row-major n x n
  double period_ = 1.0;
  int n_ = 0;
};

/// Build a dg callable by sampling g on a 64^dim periodic grid and
/// differentiating spectrally. Used when no analytic dg is supplied.
std::function<std::array<Mat2, 2>(const Vec2&)> spectral_metric_derivative(
    const std::function<Mat2(const Vec2&)>& g, int dim, double period, int samples = 64);

}  // namespace adia

#endif
