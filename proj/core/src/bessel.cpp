#include "isac/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "isac/linalg.hpp"

namespace isac {

namespace {

double series(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// J0(x) = (1/pi) int_0^pi cos(x sin t) dt. The integrand is smooth and
// pi-periodic, so the trapezoid rule converges geometrically once the node
// count exceeds x.
double trapezoid(double x) {
  const int n = std::max(32, static_cast<int>(x) + 40);
  const double h = kPi / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += std::cos(x * std::sin(k * h));
  return sum / n;
}

}  // namespace

double bessel_j0(double x) {
  x = std::abs(x);
  if (x < 8.0) return series(x);
  return trapezoid(x);
}

}  // namespace isac
