#include "metapop/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace metapop {

namespace {

Complex polish(Complex x, double a, double b, double c) {
  const Complex p = ((x + a) * x + b) * x + c;
  const Complex dp = (3.0 * x + 2.0 * a) * x + b;
  if (std::abs(dp) == 0.0) return x;
  const Complex y = x - p / dp;
  const Complex py = ((y + a) * y + b) * y + c;
  return std::abs(py) < std::abs(p) ? y : x;
}

}  // namespace

std::array<Complex, 3> cubic_roots(double a, double b, double c) {
  // x = t - a/3 turns the cubic into t^3 + p t + q.
  const double shift = a / 3.0;
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  std::array<Complex, 3> roots;
  if (disc > 0.0) {
    // One real root, one complex pair.
    const double s = std::sqrt(disc);
    const double u = -std::copysign(std::cbrt(std::abs(q) / 2.0 + s), q);
    const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
    const double re = -(u + v) / 2.0;
    const double im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
    roots = {Complex(u + v - shift, 0.0), Complex(re - shift, im), Complex(re - shift, -im)};
  } else if (p == 0.0) {
    roots = {Complex(-shift), Complex(-shift), Complex(-shift)};
  } else {
    // Three real roots (trigonometric form); p < 0 here.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots[k] = Complex(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift, 0.0);
    }
  }

  for (auto& r : roots) {
    const bool real = r.imag() == 0.0;
    r = polish(r, a, b, c);
    if (real) r = Complex(r.real(), 0.0);
  }
  // Keep conjugate pairs exact.
  if (roots[1].imag() != 0.0) roots[2] = std::conj(roots[1]);

  std::sort(roots.begin(), roots.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return roots;
}

CharacteristicCoefficients characteristic(const Mat3& j) {
  CharacteristicCoefficients c;
  c.trace = j.trace();
  c.minor_sum = (j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0)) + (j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0)) +
                (j(1, 1) * j(2, 2) - j(1, 2) * j(2, 1));
  c.det = j.determinant();
  return c;
}

std::array<Complex, 3> eigenvalues_3x3(const Mat3& j) {
  const auto c = characteristic(j);
  return cubic_roots(-c.trace, c.minor_sum, -c.det);
}

}  // namespace metapop
