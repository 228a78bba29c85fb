// Compiled with -mavx2 only; never called unless the CPU reports AVX2.
#include <immintrin.h>

#include "kramers/simd/kernels.hpp"

namespace kramers::simd {
namespace {

inline double horner1(const double* c, std::size_t n, double x) {
  if (n == 0) return 0.0;
  double acc = c[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) acc = acc * x + c[k];
  return acc;
}

inline __m256d horner4(const double* c, std::size_t n, __m256d x) {
  if (n == 0) return _mm256_setzero_pd();
  __m256d acc = _mm256_set1_pd(c[n - 1]);
  for (std::size_t k = n - 1; k-- > 0;)
    acc = _mm256_add_pd(_mm256_mul_pd(acc, x), _mm256_set1_pd(c[k]));
  return acc;
}

void poly_eval_avx2(const double* coeffs, std::size_t n_coeffs, const double* x,
                    double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, horner4(coeffs, n_coeffs, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) out[i] = horner1(coeffs, n_coeffs, x[i]);
}

void overdamped_step_avx2(const StepParams& p, double* x, const double* z,
                          std::size_t n) {
  const double* c = p.force_coeffs.data();
  const std::size_t nc = p.force_coeffs.size();
  const double two_refl_s = 2.0 * p.x_refl;
  const __m256d drift = _mm256_set1_pd(p.drift_scale);
  const __m256d noise = _mm256_set1_pd(p.noise_scale);
  const __m256d refl = _mm256_set1_pd(p.x_refl);
  const __m256d two_refl = _mm256_set1_pd(two_refl_s);

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d force = horner4(c, nc, xv);
    __m256d xn = _mm256_add_pd(_mm256_sub_pd(xv, _mm256_mul_pd(drift, force)),
                               _mm256_mul_pd(noise, _mm256_loadu_pd(z + i)));
    const __m256d below = _mm256_cmp_pd(xn, refl, _CMP_LT_OQ);
    xn = _mm256_blendv_pd(xn, _mm256_sub_pd(two_refl, xn), below);
    _mm256_storeu_pd(x + i, xn);
  }
  for (; i < n; ++i) {
    const double force = horner1(c, nc, x[i]);
    double xn = (x[i] - p.drift_scale * force) + p.noise_scale * z[i];
    if (xn < p.x_refl) xn = two_refl_s - xn;
    x[i] = xn;
  }
}

}  // namespace

namespace detail {
const KernelTable kAvx2Table{"avx2", &poly_eval_avx2, &overdamped_step_avx2};
}  // namespace detail

}  // namespace kramers::simd
