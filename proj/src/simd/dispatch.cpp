#include <cstdlib>
#include <string_view>

#include "kramers/simd/kernels.hpp"

namespace kramers::simd {

const KernelTable* avx2_kernels() {
#if defined(KRAMERS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* env = std::getenv("KRAMERS_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") {
      return scalar_kernels();
    }
    if (const KernelTable* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const KernelTable* k = avx2_kernels()) out.push_back(k);
  return out;
}

}  // namespace kramers::simd
