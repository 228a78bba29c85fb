#include <doctest.h>

#include <bit>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "kramers/langevin.hpp"
#include "kramers/rates.hpp"

using namespace kramers;

namespace {

const Potential kFlat = Potential::polynomial({0.0});
const PhysParams kUnitDiffusion(1.0, 1.0, 1.0);  // D = 1

const Interval kDoubleWellBracket{-1.0, 3.0};

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

// Double-well geometry with a barrier low enough for quick ensembles.
EscapeConfig quick_double_well(double dt, std::size_t n_traj) {
  EscapeConfig c;
  c.x_refl = -1.0;
  c.x_init = 0.0;
  c.x_abs = 2.0;
  c.dt = dt;
  c.max_time = 1e5;
  c.n_traj = n_traj;
  return c;
}

}  // namespace

TEST_SUITE("langevin") {

TEST_CASE("overdamped step examples") {
  const auto cubic = Potential::cubic(1.0, 1.0);
  // Huge beta makes the noise term negligible.
  const PhysParams cold(1.0, 20.0, 1e300);
  CHECK(overdamped_step(0.5, cubic, cold, 0.01, 0.0) == doctest::Approx(0.499875).epsilon(1e-12));
  CHECK(overdamped_step(0.0, kFlat, kUnitDiffusion, 0.01, 1.0) ==
        doctest::Approx(0.1414214).epsilon(1e-7));
  const auto dw = Potential::double_well(1.0, 2.0);
  CHECK(overdamped_step(0.0, dw, {1, 20, 6}, 0.01, 0.0) == 0.0);
  CHECK(overdamped_step(2.0, dw, {1, 20, 6}, 0.01, 0.0) == 2.0);
}

TEST_CASE("inertial step examples") {
  const PhysParams p(1.0, 20.0, 1.0);
  const PhaseSpacePoint s = inertial_step({0.0, 1.0}, kFlat, p, 0.001, 0.0);
  CHECK(s.v == doctest::Approx(0.98).epsilon(1e-12));
  CHECK(s.x == doctest::Approx(0.001).epsilon(1e-12));
  const auto dw = Potential::double_well(1.0, 2.0);
  const PhaseSpacePoint r = inertial_step({2.0, 0.0}, dw, p, 0.001, 0.0);
  CHECK(r.x == 2.0);
  CHECK(r.v == 0.0);
}

TEST_CASE("noise increments have the prescribed statistics") {
  const NoiseModel noise{0.3, 42};
  const double dt = 0.01;
  NoiseStream stream(noise.master_seed, 0);
  constexpr std::size_t n = 1000000;
  std::vector<double> xs(n), sq(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = stream.increment(noise, dt);
  const double mean = pairwise_sum(xs.data(), n) / n;
  for (std::size_t i = 0; i < n; ++i) sq[i] = (xs[i] - mean) * (xs[i] - mean);
  const double var = pairwise_sum(sq.data(), n) / (n - 1.0);
  const double target = 2.0 * noise.diffusion * dt;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(target / n));
  CHECK(std::abs(var - target) / target < 0.01);
}

TEST_CASE("streams depend only on seed and index") {
  NoiseStream a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  bool differ_index = false, differ_seed = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differ_index = differ_index || x != c.normal();
    differ_seed = differ_seed || x != d.normal();
  }
  CHECK(differ_index);
  CHECK(differ_seed);
}

TEST_CASE("inertial dynamics reach equipartition") {
  const PhysParams p(1.0, 20.0, 2.0);
  const double dt = 2e-4;
  NoiseStream stream(5, 0);
  PhaseSpacePoint s{0.0, 0.0};
  for (int i = 0; i < 5000; ++i) s = inertial_step(s, kFlat, p, dt, stream.normal());
  constexpr std::size_t n = 100000;
  std::vector<double> sq(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (int i = 0; i < 500; ++i) s = inertial_step(s, kFlat, p, dt, stream.normal());
    sq[k] = s.v * s.v;
  }
  const double var = pairwise_sum(sq.data(), n) / n;
  CHECK(std::abs(var - 1.0 / (p.beta() * p.mass())) * p.beta() * p.mass() < 0.02);
}

TEST_CASE("escape configuration validation") {
  EscapeConfig c;
  CHECK_NOTHROW(c.validate());
  c.x_refl = 0.0;  // reflecting at the start point is allowed
  CHECK_NOTHROW(c.validate());
  c.x_refl = 0.1;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = EscapeConfig{};
  c.x_abs = c.x_init;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = EscapeConfig{};
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = EscapeConfig{};
  c.n_traj = 0;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c = EscapeConfig{};
  c.max_time = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("default escape configuration") {
  const auto v = Potential::double_well(1.0, 2.0);
  const PhysParams p(1, 20, 6);
  const auto a = find_stationary_points(v, 1.0, kDoubleWellBracket);
  const EscapeConfig c = default_escape_config(v, a, p, 123);
  CHECK(c.x_init == doctest::Approx(0.0));
  CHECK(c.x_abs == doctest::Approx(2.0));
  CHECK(c.x_refl == doctest::Approx(-5.0 / (a.omega0 * std::sqrt(6.0))));
  // max |V''| on the interval is at the left edge.
  const double curv = v.eval(c.x_refl, 2);
  CHECK(c.dt == doctest::Approx(0.01 * 20.0 / curv).epsilon(1e-12));
  CHECK(c.max_time == doctest::Approx(50.0 / classical_rate(a, p).rate));
  CHECK(c.n_traj == 123);
  CHECK_NOTHROW(c.validate());

  const auto cubic = Potential::cubic(1.0, 1.0);
  const auto ac = find_stationary_points(cubic, 1.0, {-1.0, 2.0});
  const EscapeConfig cc = default_escape_config(cubic, ac, {1, 20, 60});
  CHECK(cc.x_abs == doctest::Approx(ac.xb + 3.0 / (ac.omegab * std::sqrt(60.0))));
}

TEST_CASE("flat-potential mean first passage time") {
  EscapeConfig c;
  c.x_refl = 0.0;
  c.x_init = 0.0;
  c.x_abs = 1.0;
  c.dt = 2.5e-5;
  c.max_time = 100.0;
  c.n_traj = 10000;
  const EnsembleResult r = mfpt_ensemble(kFlat, kUnitDiffusion, c, {2024, 1});
  CHECK(r.n_escaped + r.n_censored == c.n_traj);
  CHECK(r.n_censored == 0);
  CHECK(std::abs(r.mfpt_mean - 0.5) < 3.0 * r.mfpt_stderr);
  CHECK(r.escape_times.size() == c.n_traj);
  std::size_t counted = 0;
  for (std::size_t k : r.histogram.counts) counted += k;
  CHECK(counted == r.n_escaped);
}

TEST_CASE("ensemble is deterministic across workers and kernels") {
  const auto v = Potential::double_well(1.0, 2.0);
  const PhysParams p(1, 20, 3);
  const EscapeConfig c = quick_double_well(0.01, 300);
  const EnsembleResult ref = mfpt_ensemble(v, p, c, {99, 1, &simd::scalar_kernels()});
  for (const simd::KernelTable* k : simd::available_kernels()) {
    for (unsigned w : {1u, 4u, 8u}) {
      const EnsembleResult r = mfpt_ensemble(v, p, c, {99, w, k});
      CHECK(same_bits(ref.escape_times, r.escape_times));
      CHECK(std::bit_cast<std::uint64_t>(r.mfpt_mean) == std::bit_cast<std::uint64_t>(ref.mfpt_mean));
      CHECK(std::bit_cast<std::uint64_t>(r.mfpt_stderr) ==
            std::bit_cast<std::uint64_t>(ref.mfpt_stderr));
      CHECK(r.histogram.counts == ref.histogram.counts);
    }
  }
  const EnsembleResult other = mfpt_ensemble(v, p, c, {100, 1});
  CHECK_FALSE(same_bits(ref.escape_times, other.escape_times));
}

TEST_CASE("censoring is reported") {
  EscapeConfig c;
  c.n_traj = 1;
  c.max_time = 0.0;
  try {
    (void)mfpt_ensemble(kFlat, kUnitDiffusion, c);
    FAIL("expected EstimationError");
  } catch (const EstimationError& e) {
    CHECK(e.partial().n_censored == 1);
    CHECK(e.partial().n_escaped == 0);
  }

  // Partial censoring keeps the result and counts the stragglers.
  EscapeConfig s = quick_double_well(0.01, 64);
  s.max_time = 50.0;
  const EnsembleResult r = mfpt_ensemble(Potential::double_well(1.0, 2.0), {1, 20, 3}, s);
  CHECK(r.n_censored > 0);
  CHECK(r.n_escaped + r.n_censored == 64);
}

TEST_CASE("non-finite positions raise a numeric error") {
  // A steep octic pushes the walker past overflow in one step.
  const auto steep = Potential::polynomial({0, 0, 0, 0, 0, 0, 0, 0, -1e300});
  EscapeConfig c;
  c.x_init = 10.0;
  c.x_abs = 1e308;
  c.x_refl = 0.0;
  c.n_traj = 3;
  CHECK_THROWS_AS(mfpt_ensemble(steep, kUnitDiffusion, c), NumericError);
}

TEST_CASE("quadrature closed forms") {
  CHECK(mfpt_quadrature(kFlat, kUnitDiffusion, 0.0, 1.0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
  // (b^2 - x^2) / 2D, D = 1/3.
  const PhysParams p(1.0, 1.0, 3.0);
  CHECK(mfpt_quadrature(kFlat, p, 0.0, 2.0, 0.5) ==
        doctest::Approx(3.0 * (4.0 - 0.25) / 2.0).epsilon(1e-10));
  CHECK(mfpt_quadrature(kFlat, kUnitDiffusion, 0.0, 1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(mfpt_quadrature(kFlat, kUnitDiffusion, 0.5, 1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(mfpt_quadrature(kFlat, kUnitDiffusion, 0.0, 1.0, 0.0, 32), ArgumentError);
}

TEST_CASE("quadrature approaches the Kramers rate") {
  const auto v = Potential::double_well(1.0, 2.0);
  const auto a = find_stationary_points(v, 1.0, kDoubleWellBracket);
  const auto gap = [&](double beta) {
    const PhysParams p(1, 20, beta);
    const double q = 1.0 / mfpt_quadrature(v, p, -1.0, 2.0, 0.0);
    return std::abs(q - classical_rate(a, p).rate) / classical_rate(a, p).rate;
  };
  const double g6 = gap(6.0), g10 = gap(10.0);
  CHECK(g6 < 0.25);
  CHECK(g10 < 0.15);
  CHECK(g10 < g6);
}

TEST_CASE("quadrature rate is insensitive to the absorbing point") {
  // Scale the default offset beyond the barrier by +-20%.
  const auto check = [](const Potential& v, const PhysParams& p, Interval bracket) {
    const auto a = find_stationary_points(v, p.mass(), bracket);
    const EscapeConfig c = default_escape_config(v, a, p);
    const double ref = 1.0 / mfpt_quadrature(v, p, c.x_refl, c.x_abs, c.x_init);
    for (double f : {0.8, 1.2}) {
      const double x_abs = a.xb + f * (c.x_abs - a.xb);
      const double r = 1.0 / mfpt_quadrature(v, p, c.x_refl, x_abs, c.x_init);
      CHECK(std::abs(r - ref) / ref < 0.01);
    }
  };
  check(Potential::double_well(1.0, 2.0), {1, 20, 6}, kDoubleWellBracket);
  check(Potential::cubic(1.0, 1.0), {1, 20, 60}, {-1.0, 2.0});
}

TEST_CASE("effective potential transfers the semiclassical enhancement") {
  const auto v = Potential::double_well(1.0, 2.0);
  const PhysParams p(1, 20, 6, 0.01);
  const auto a = find_stationary_points(v, 1.0, kDoubleWellBracket);
  const Potential vhat = effective_potential(v, quasi_stationary_G(v, a.x0, p), p);
  const double ratio = mfpt_quadrature(v, p, -1.0, 2.0, 0.0) / mfpt_quadrature(vhat, p, -1.0, 2.0, 0.0);
  const double factor = std::exp(enhancement_exponent(semiclassical_rate_approx(a, p), a, p));
  CHECK(factor == doctest::Approx(1.06571).epsilon(1e-5));
  CHECK(std::abs(ratio - factor) / factor < 0.10);
}

TEST_CASE("ensemble agrees with quadrature and is stable under dt halving") {
  const auto v = Potential::double_well(1.0, 2.0);
  const PhysParams p(1, 20, 3);
  const double tau = mfpt_quadrature(v, p, -1.0, 2.0, 0.0);
  const EnsembleResult coarse = mfpt_ensemble(v, p, quick_double_well(0.01, 1000), {1});
  const EnsembleResult fine = mfpt_ensemble(v, p, quick_double_well(0.005, 1000), {2});
  // Rate stderr from the delta method.
  CHECK(std::abs(1.0 / fine.mfpt_mean - 1.0 / tau) <
        3.0 * fine.mfpt_stderr / (fine.mfpt_mean * fine.mfpt_mean));
  CHECK(std::abs(coarse.mfpt_mean - fine.mfpt_mean) <
        2.0 * std::hypot(coarse.mfpt_stderr, fine.mfpt_stderr));
}

TEST_CASE("equilibrium sampling of a harmonic well") {
  const double omega = 1.5;
  const PhysParams p(1.0, 2.0, 1.0);
  const auto h = Potential::harmonic(p.mass(), omega);
  const double relax = p.gamma() / (omega * omega);
  const SampleSet s = equilibrium_sample(h, p, 0.0, 20.0 * relax, 100000, 3.0 * relax, 17);
  const double target = 1.0 / (p.beta() * p.mass() * omega * omega);
  CHECK(std::abs(s.variance() - target) / target < 0.02);
  CHECK(std::abs(s.mean()) < 3.0 * std::sqrt(s.variance() / s.positions.size()));

  // Chi-square against the Boltzmann density: 30 bins on +-3 sigma plus tails.
  const double sigma = std::sqrt(target);
  constexpr int bins = 30;
  const double lo = -3.0 * sigma, width = 6.0 * sigma / bins;
  std::vector<double> observed(bins + 2, 0.0);
  for (double x : s.positions) {
    if (x < lo) {
      observed[0] += 1;
    } else if (x >= -lo) {
      observed[bins + 1] += 1;
    } else {
      observed[1 + std::min(bins - 1, static_cast<int>((x - lo) / width))] += 1;
    }
  }
  const auto cdf = [&](double x) { return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2)); };
  const double n = static_cast<double>(s.positions.size());
  double chi2 = 0.0;
  for (int b = 0; b < bins + 2; ++b) {
    const double left = b == 0 ? 0.0 : cdf(lo + (b - 1) * width);
    const double right = b == bins + 1 ? 1.0 : cdf(lo + b * width);
    const double expected = n * (right - left);
    chi2 += (observed[b] - expected) * (observed[b] - expected) / expected;
  }
  const double p_value = boost::math::gamma_q((bins + 1) / 2.0, chi2 / 2.0);
  CHECK(p_value > 0.01);
}

TEST_CASE("pairwise sum") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v.data(), v.size()) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(v.data(), 0) == 0.0);
}

}  // TEST_SUITE
