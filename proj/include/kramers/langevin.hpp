#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "kramers/error.hpp"
#include "kramers/potential.hpp"
#include "kramers/semiclassical.hpp"
#include "kramers/simd/kernels.hpp"

namespace kramers {

// White noise of intensity D: increments over dt are N(0, 2 D dt).
struct NoiseModel {
  double diffusion = 0.0;
  std::uint64_t master_seed = 0;
};

// Independent normal stream for one trajectory, derived from
// (master_seed, stream index) only, so results do not depend on scheduling.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t index);

  double normal() { return normal_(engine_); }
  double uniform() { return boost::random::uniform_01<double>()(engine_); }
  // sqrt(2 D dt) * z
  double increment(const NoiseModel& noise, double dt) {
    return std::sqrt(2.0 * noise.diffusion * dt) * normal();
  }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};  // ziggurat
};

// Euler-Maruyama for x' = -V'(x)/(M gamma) + xi.
double overdamped_step(double x, const Potential& v, const PhysParams& params, double dt,
                       double z);

struct PhaseSpacePoint {
  double x = 0.0;
  double v = 0.0;
};

// Euler-Maruyama for the inertial equation; force noise variance
// 2 M gamma / beta per unit time.
PhaseSpacePoint inertial_step(PhaseSpacePoint s, const Potential& v, const PhysParams& params,
                              double dt, double z);

struct EscapeConfig {
  double x_init = 0.0;
  double x_abs = 1.0;
  double x_refl = -std::numeric_limits<double>::infinity();
  double dt = 1e-3;
  double max_time = 1e4;
  std::size_t n_traj = 1000;

  // Throws ArgumentError unless x_refl <= x_init < x_abs, dt > 0,
  // 0 <= max_time < inf and n_traj >= 1.
  void validate() const;
};

// Boundary and step conventions for a bracketed potential:
// x_abs = xm when a second minimum exists, else xb + 3/(omegab sqrt(beta M));
// x_refl = x0 - 5/(omega0 sqrt(beta M)); dt = 0.01 min(M gamma / |V''|) over
// [x_refl, x_abs]; max_time = 50 / r_c.
EscapeConfig default_escape_config(const Potential& v, const StationaryAnalysis& a,
                                   const PhysParams& params, std::size_t n_traj = 1000);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const { return counts.empty() ? 0.0 : (hi - lo) / counts.size(); }
};

Histogram make_histogram(const std::vector<double>& values, double lo, double hi,
                         std::size_t bins);

struct EnsembleResult {
  double mfpt_mean = 0.0;
  double mfpt_stderr = 0.0;
  std::size_t n_escaped = 0;
  std::size_t n_censored = 0;
  std::vector<double> escape_times;  // by trajectory index; NaN when censored
  Histogram histogram;               // of escape times, 40 bins on [0, max]
};

class EstimationError : public Error {
 public:
  EstimationError(const std::string& what, EnsembleResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const EnsembleResult& partial() const { return partial_; }

 private:
  EnsembleResult partial_;
};

struct EnsembleOptions {
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  const simd::KernelTable* kernels = nullptr;  // nullptr: active_kernels()
};

// Independent overdamped trajectories from x_init until the first crossing
// of x_abs (time interpolated linearly within the step). Reflection at
// x_refl mirrors the overshoot. Bit-identical for a given seed under any
// worker count and kernel variant.
EnsembleResult mfpt_ensemble(const Potential& v, const PhysParams& params,
                             const EscapeConfig& config, const EnsembleOptions& options = {});

// (1/D) int_{x_init}^{x_abs} dy e^{beta V(y)} int_{x_refl}^{y} dz e^{-beta V(z)}
// by composite Simpson with Richardson extrapolation, doubling from n_panels
// until successive estimates agree to 1e-8 relative.
double mfpt_quadrature(const Potential& v, const PhysParams& params, double x_refl,
                       double x_abs, double x_init, std::size_t n_panels = 256);

struct SampleSet {
  std::vector<double> positions;
  double dt = 0.0;

  double mean() const;
  double variance() const;  // unbiased
};

// Single overdamped chain: discard burn_in, then keep one position every
// `thin` time units. dt defaults to 0.01 M gamma / V''(x_start), which
// must then be positive.
SampleSet equilibrium_sample(const Potential& v, const PhysParams& params, double x_start,
                             double burn_in, std::size_t n_samples, double thin,
                             std::uint64_t seed, std::optional<double> dt = std::nullopt);

// Pairwise (cascade) summation; fixed reduction tree for any input order.
double pairwise_sum(const double* values, std::size_t n);

}  // namespace kramers
