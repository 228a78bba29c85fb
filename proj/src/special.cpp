#include "kramers/special.hpp"

#include <cmath>
#include <string>

#include "kramers/error.hpp"

namespace kramers {

double digamma(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw DomainError("digamma needs a finite z > 0 (got " + std::to_string(z) + ")");
  }
  // psi(z) = psi(z + 1) - 1/z until the asymptotic series is accurate.
  double shift = 0.0;
  while (z < 10.0) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  // ln z - 1/(2z) - sum_{n=1..7} B_2n / (2n z^2n)
  constexpr double kCoeff[] = {
      1.0 / 12.0,     // B2 / 2
      -1.0 / 120.0,   // B4 / 4
      1.0 / 252.0,    // B6 / 6
      -1.0 / 240.0,   // B8 / 8
      1.0 / 132.0,    // B10 / 10
      -691.0 / 32760.0,  // B12 / 12
      1.0 / 12.0,     // B14 / 14
  };
  const double w = 1.0 / (z * z);
  double series = 0.0;
  for (int n = 6; n >= 0; --n) series = series * w + kCoeff[n];
  series *= w;
  return shift + std::log(z) - 0.5 / z - series;
}

}  // namespace kramers
