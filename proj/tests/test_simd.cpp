#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "kramers/potential.hpp"
#include "kramers/simd/kernels.hpp"

using namespace kramers;
using namespace kramers::simd;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_SUITE("simd") {

TEST_CASE("scalar poly_eval matches Potential::eval") {
  const auto v = Potential::double_well(1.3, 1.7);
  std::mt19937_64 rng(1);
  const auto xs = random_vector(rng, 257, -2.0, 4.0);
  std::vector<double> out(xs.size());
  for (int order = 0; order <= 2; ++order) {
    const auto c = v.derivative_coefficients(order);
    poly_eval(scalar_kernels(), c, xs, out);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(out[i] == v.eval(xs[i], order));
    }
  }
}

TEST_CASE("scalar overdamped step arithmetic") {
  const std::vector<double> force{0.0, 2.0};  // V' = 2x
  StepParams p{force, 0.1, 0.5, -1.0};
  std::vector<double> x{1.0, 0.0, -0.9};
  const std::vector<double> z{0.0, 1.0, -1.0};
  overdamped_step(scalar_kernels(), p, x, z);
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(0.5));
  // -0.9 + 0.18 - 0.5 = -1.22, mirrored about -1.
  CHECK(x[2] == doctest::Approx(-0.78));

  p.x_refl = -std::numeric_limits<double>::infinity();
  std::vector<double> y{-0.9};
  overdamped_step(scalar_kernels(), p, y, std::vector<double>{-1.0});
  CHECK(y[0] == doctest::Approx(-1.22));
}

TEST_CASE("active kernels honour the scalar override") {
  const auto all = available_kernels();
  REQUIRE_FALSE(all.empty());
  CHECK(all.front() == &scalar_kernels());
  const KernelTable& active = active_kernels();
  bool listed = false;
  for (const KernelTable* k : all) listed = listed || k == &active;
  CHECK(listed);
}

TEST_CASE("all variants give bit-identical poly_eval") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> degree(0, 12);
  const auto variants = available_kernels();
  for (int trial = 0; trial < 200; ++trial) {
    const auto coeffs = random_vector(rng, static_cast<std::size_t>(degree(rng)) + 1, -3.0, 3.0);
    // Lengths cover empty, pure tail, and full vectors plus tail.
    const std::size_t n = static_cast<std::size_t>(trial % 37);
    const auto xs = random_vector(rng, n, -2.0, 2.0);
    std::vector<double> ref(n);
    poly_eval(scalar_kernels(), coeffs, xs, ref);
    for (const KernelTable* k : variants) {
      std::vector<double> out(n);
      poly_eval(*k, coeffs, xs, out);
      CHECK_MESSAGE(same_bits(ref, out), k->name);
    }
  }
}

TEST_CASE("all variants give bit-identical overdamped steps") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const auto variants = available_kernels();
  const auto v = Potential::double_well(1.0, 2.0);
  const auto force = v.derivative_coefficients(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(trial % 41);
    auto x = random_vector(rng, n, -1.2, 2.5);
    std::vector<double> z(n);
    for (double& zi : z) zi = 3.0 * normal(rng);
    const bool reflect = trial % 3 != 0;
    const StepParams p{force, 0.005 / 20.0, 0.2,
                       reflect ? -1.0 : -std::numeric_limits<double>::infinity()};
    auto ref = x;
    overdamped_step(scalar_kernels(), p, ref, z);
    for (const KernelTable* k : variants) {
      auto out = x;
      overdamped_step(*k, p, out, z);
      CHECK_MESSAGE(same_bits(ref, out), k->name);
    }
    if (reflect) {
      for (double xi : ref) CHECK(xi >= -1.0);
    }
  }
}

}  // TEST_SUITE
