#include "kramers/simd/kernels.hpp"

namespace kramers::simd {
namespace {

inline double horner(const double* c, std::size_t n, double x) {
  if (n == 0) return 0.0;
  double acc = c[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) acc = acc * x + c[k];
  return acc;
}

void poly_eval_scalar(const double* coeffs, std::size_t n_coeffs,
                      const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = horner(coeffs, n_coeffs, x[i]);
}

void overdamped_step_scalar(const StepParams& p, double* x, const double* z,
                            std::size_t n) {
  const double* c = p.force_coeffs.data();
  const std::size_t nc = p.force_coeffs.size();
  const double two_refl = 2.0 * p.x_refl;
  for (std::size_t i = 0; i < n; ++i) {
    const double force = horner(c, nc, x[i]);
    double xn = (x[i] - p.drift_scale * force) + p.noise_scale * z[i];
    if (xn < p.x_refl) xn = two_refl - xn;
    x[i] = xn;
  }
}

const KernelTable kScalarTable{"scalar", &poly_eval_scalar,
                               &overdamped_step_scalar};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace kramers::simd
