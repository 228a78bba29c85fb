#include <doctest.h>

#include <cmath>
#include <random>

#include "kramers/error.hpp"
#include "kramers/potential.hpp"

using namespace kramers;

TEST_SUITE("potentials") {

TEST_CASE("eval of the model potentials") {
  const auto cubic = Potential::cubic(1.0, 1.0);
  CHECK(cubic.eval(0.5, 0) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(cubic.eval(0.5, 2) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cubic.eval(0.5, 4) == 0.0);
  CHECK(cubic.eval(0.3, 3) == doctest::Approx(-6.0));

  const auto dw = Potential::double_well(1.0, 1.0);
  CHECK(dw(0.5) == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(dw.eval(0.5, 1) == doctest::Approx(0.0).scale(1.0));
  CHECK(dw.eval(2.0, 4) == doctest::Approx(24.0));
}

TEST_CASE("derivative order outside 0..4 is an argument error") {
  const auto cubic = Potential::cubic(1.0, 1.0);
  CHECK_THROWS_AS(cubic.eval(0.0, 5), ArgumentError);
  CHECK_THROWS_AS(cubic.eval(0.0, -1), ArgumentError);
}

TEST_CASE("constructor invariants") {
  CHECK_THROWS_AS(Potential::cubic(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(Potential::cubic(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(Potential::double_well(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Potential::polynomial(std::vector<double>(14, 1.0)), ArgumentError);
  CHECK_NOTHROW(Potential::polynomial(std::vector<double>(13, 1.0)));
  CHECK_THROWS_AS(Potential::polynomial({}), ArgumentError);
  CHECK_THROWS_AS(Potential::polynomial({1.0, NAN}), ArgumentError);
}

TEST_CASE("analytic derivatives agree with central differences") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), xs(-2.0, 2.0);
  std::uniform_int_distribution<int> deg(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (double& v : c) v = coef(rng);
    const auto v = Potential::polynomial(c);
    // Magnitude scale of each derivative: the same polynomial with |c_k|.
    std::vector<double> abs_c(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) abs_c[k] = std::abs(c[k]);
    const auto mag = Potential::polynomial(abs_c);
    for (int i = 0; i < 10; ++i) {
      const double x = xs(rng);
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      for (int k = 0; k <= 3; ++k) {
        const double fd = (v.eval(x + h, k) - v.eval(x - h, k)) / (2.0 * h);
        const double exact = v.eval(x, k + 1);
        const double scale = std::max(std::abs(exact), mag.eval(std::abs(x), k + 1));
        CHECK(std::abs(fd - exact) <= 1e-6 * scale);
      }
    }
  }
}

TEST_CASE("stationary points of the cubic") {
  const auto a = find_stationary_points(Potential::cubic(1.0, 1.0), 1.0, {-1.0, 2.0});
  CHECK(a.x0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(a.xb == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(a.xm.has_value());
  CHECK(a.barrier == doctest::Approx(4.0 / 27.0).epsilon(1e-12));
  CHECK(a.omega0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(a.omegab == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("stationary points of the double well") {
  const auto a = find_stationary_points(Potential::double_well(1.0, 1.0), 1.0, {-0.5, 1.5});
  CHECK(a.x0 == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(a.xb == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(a.xm.has_value());
  CHECK(*a.xm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.barrier == doctest::Approx(0.0625).epsilon(1e-12));
  CHECK(a.omega0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(a.omegab == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary invariants hold over random cubic and double-well shapes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> par(0.2, 5.0), mass(0.5, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double A = par(rng), B = par(rng), M = mass(rng);
    const auto cubic = Potential::cubic(A, B);
    const double xb = 2.0 * A / (3.0 * B);
    const auto c = find_stationary_points(cubic, M, {-xb, 2.0 * xb});
    CHECK(std::abs(cubic.eval(c.x0, 1)) <= 1e-10);
    CHECK(std::abs(cubic.eval(c.xb, 1)) <= 1e-10);
    CHECK(cubic.eval(c.x0, 2) > 0.0);
    CHECK(cubic.eval(c.xb, 2) < 0.0);
    // omega0 = omegab for every cubic.
    CHECK(c.omega0 == doctest::Approx(c.omegab).epsilon(1e-10));
    CHECK(c.barrier == doctest::Approx(4.0 * A * A * A / (27.0 * B * B)).epsilon(1e-10));

    const auto dw = Potential::double_well(A, B);
    const auto d = find_stationary_points(dw, M, {-0.5 * B, 1.5 * B});
    CHECK(std::abs(dw.eval(d.x0, 1)) <= 1e-10);
    CHECK(std::abs(dw.eval(d.xb, 1)) <= 1e-10);
    CHECK(d.barrier == doctest::Approx(A * B * B * B * B / 16.0).epsilon(1e-10));
    REQUIRE(d.xm.has_value());
    CHECK(*d.xm == doctest::Approx(B).epsilon(1e-10));
  }
}

TEST_CASE("bracket without structure raises a structure error") {
  const auto cubic = Potential::cubic(1.0, 1.0);
  // V' > 0 throughout (0.1, 0.5): no sign change.
  CHECK_THROWS_AS(find_stationary_points(cubic, 1.0, {0.1, 0.5}), StructureError);
  // Only the maximum is bracketed.
  CHECK_THROWS_AS(find_stationary_points(cubic, 1.0, {0.3, 1.0}), StructureError);
  // Only the minimum.
  CHECK_THROWS_AS(find_stationary_points(cubic, 1.0, {-1.0, 0.3}), StructureError);
  CHECK_THROWS_AS(find_stationary_points(cubic, 1.0, {1.0, -1.0}), ArgumentError);
}

TEST_CASE("effective cubic roots") {
  // V + hbar[1/(8G) + G V''/2] for A = B = 1, hbar = 0.1, G = 0.3535534:
  // V' - 0.106066 = 0 has roots of 3x^2 - 2x + 0.106066.
  const double G = 1.0 / (2.0 * std::sqrt(2.0));
  const double shift = 0.5 * 0.1 * G * 6.0;
  const double disc = std::sqrt(4.0 - 12.0 * shift);
  const auto vhat = Potential::polynomial({0.1 / (8.0 * G) + 0.1 * G, -shift, 1.0, -1.0});
  const auto a = find_stationary_points(vhat, 1.0, {-1.0, 2.0});
  CHECK(a.x0 == doctest::Approx((2.0 - disc) / 6.0).epsilon(1e-12));
  CHECK(a.xb == doctest::Approx((2.0 + disc) / 6.0).epsilon(1e-12));
  CHECK(a.x0 == doctest::Approx(0.0580952).epsilon(1e-5));
  CHECK(a.xb == doctest::Approx(0.6085717).epsilon(1e-6));
}

}  // TEST_SUITE
