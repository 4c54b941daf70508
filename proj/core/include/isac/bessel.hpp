#pragma once

namespace isac {

/// Bessel function of the first kind, order zero. Ascending series below
/// |x| = 8, periodic trapezoid rule on the integral representation above.
/// Absolute accuracy is about 1e-13 over the range used by the simulator.
double bessel_j0(double x);

}  // namespace isac
