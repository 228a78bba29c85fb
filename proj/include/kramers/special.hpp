#pragma once

namespace kramers {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Digamma psi(z) for z > 0, absolute error below 1e-12 on [1e-3, 1e3].
// Throws DomainError for z <= 0 or non-finite z.
double digamma(double z);

}  // namespace kramers
