#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kramers::simd {

// Constants of one Euler-Maruyama overdamped step, shared by a whole batch:
//   x' = (x - drift_scale * V'(x)) + noise_scale * z, reflected at x_refl.
struct StepParams {
  std::span<const double> force_coeffs;  // ascending coefficients of V'
  double drift_scale = 0.0;              // dt / (M gamma)
  double noise_scale = 0.0;              // sqrt(2 D dt)
  double x_refl = 0.0;                   // -inf disables reflection
};

// A variant of the data-parallel kernels. Every variant evaluates the same
// operations in the same order without FMA contraction, so all variants are
// bitwise interchangeable.
struct KernelTable {
  std::string_view name;
  // out[i] = sum_k coeffs[k] * x[i]^k (Horner, highest degree first).
  void (*poly_eval)(const double* coeffs, std::size_t n_coeffs, const double* x,
                    double* out, std::size_t n);
  // In-place step of n independent positions with their normal draws.
  void (*overdamped_step)(const StepParams& p, double* x, const double* z,
                          std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels();

// Widest supported variant, unless KRAMERS_SIMD=scalar is set in the
// environment. Resolved once.
const KernelTable& active_kernels();

// All variants usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

inline void poly_eval(const KernelTable& k, std::span<const double> coeffs,
                      std::span<const double> x, std::span<double> out) {
  k.poly_eval(coeffs.data(), coeffs.size(), x.data(), out.data(), x.size());
}

inline void overdamped_step(const KernelTable& k, const StepParams& p,
                            std::span<double> x, std::span<const double> z) {
  k.overdamped_step(p, x.data(), z.data(), x.size());
}

namespace detail {
#if defined(KRAMERS_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif
}  // namespace detail

}  // namespace kramers::simd
