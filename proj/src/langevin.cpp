#include "kramers/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "kramers/rates.hpp"

namespace kramers {
namespace {

constexpr std::size_t kBlockSize = 64;
constexpr std::size_t kHistogramBins = 40;
constexpr std::size_t kMaxQuadraturePanels = std::size_t{1} << 23;

std::seed_seq make_seed(std::uint64_t master, std::uint64_t index) {
  return std::seed_seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                       static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
}

// Mean and standard error of the finite entries, fixed reduction order.
void summarize(EnsembleResult& r) {
  std::vector<double> done;
  done.reserve(r.escape_times.size());
  for (double t : r.escape_times) {
    if (!std::isnan(t)) done.push_back(t);
  }
  r.n_escaped = done.size();
  r.n_censored = r.escape_times.size() - done.size();
  if (done.empty()) return;
  const double n = static_cast<double>(done.size());
  r.mfpt_mean = pairwise_sum(done.data(), done.size()) / n;
  if (done.size() > 1) {
    std::vector<double> sq(done.size());
    for (std::size_t i = 0; i < done.size(); ++i) {
      const double d = done[i] - r.mfpt_mean;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq.data(), sq.size()) / (n - 1.0);
    r.mfpt_stderr = std::sqrt(var / n);
  }
  const double hi = *std::max_element(done.begin(), done.end());
  r.histogram = make_histogram(done, 0.0, hi > 0.0 ? hi : 1.0, kHistogramBins);
}

struct BlockFailure {
  std::size_t trajectory;
  std::size_t step;
};

// Runs trajectories [first, last) to absorption or censoring.
std::optional<BlockFailure> run_block(const simd::StepParams& step, const simd::KernelTable& k,
                                      const EscapeConfig& cfg, std::uint64_t seed,
                                      std::size_t first, std::size_t last,
                                      std::uint64_t max_steps, double* times) {
  const std::size_t n = last - first;
  std::vector<NoiseStream> streams;
  streams.reserve(n);
  for (std::size_t i = first; i < last; ++i) streams.emplace_back(seed, i);

  std::vector<double> x(n, cfg.x_init), prev(n), z(n);
  std::vector<std::size_t> id(n);
  for (std::size_t j = 0; j < n; ++j) id[j] = j;
  std::size_t active = n;

  for (std::uint64_t s = 0; s < max_steps && active > 0; ++s) {
    for (std::size_t j = 0; j < active; ++j) z[j] = streams[id[j]].normal();
    std::copy_n(x.begin(), active, prev.begin());
    k.overdamped_step(step, x.data(), z.data(), active);
    for (std::size_t j = active; j-- > 0;) {
      const double xn = x[j];
      if (!std::isfinite(xn)) return BlockFailure{first + id[j], static_cast<std::size_t>(s + 1)};
      if (xn >= cfg.x_abs) {
        const double frac = (cfg.x_abs - prev[j]) / (xn - prev[j]);
        times[id[j]] = (static_cast<double>(s) + frac) * cfg.dt;
        --active;
        x[j] = x[active];
        prev[j] = prev[active];
        id[j] = id[active];
      }
    }
  }
  return std::nullopt;
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t index) {
  std::seed_seq seq = make_seed(master_seed, index);
  engine_.seed(seq);
}

double overdamped_step(double x, const Potential& v, const PhysParams& params, double dt,
                       double z) {
  const double drift_scale = dt / (params.mass() * params.gamma());
  const double noise_scale = std::sqrt(2.0 * params.diffusion() * dt);
  return (x - drift_scale * v.eval(x, 1)) + noise_scale * z;
}

PhaseSpacePoint inertial_step(PhaseSpacePoint s, const Potential& v, const PhysParams& params,
                              double dt, double z) {
  const double g = params.gamma();
  PhaseSpacePoint out;
  out.v = s.v + dt * (-g * s.v - v.eval(s.x, 1) / params.mass()) +
          g * std::sqrt(2.0 * params.diffusion() * dt) * z;
  out.x = s.x + dt * s.v;
  return out;
}

void EscapeConfig::validate() const {
  if (!(x_refl <= x_init)) throw ArgumentError("escape.x_refl: must be <= x_init");
  if (!(x_init < x_abs) || !std::isfinite(x_abs)) throw ArgumentError("escape.x_abs: must be > x_init");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("escape.dt: must be > 0");
  if (!(max_time >= 0.0) || !std::isfinite(max_time)) {
    throw ArgumentError("escape.max_time: must be finite and >= 0");
  }
  if (n_traj < 1) throw ArgumentError("escape.n_traj: must be >= 1");
}

EscapeConfig default_escape_config(const Potential& v, const StationaryAnalysis& a,
                                   const PhysParams& params, std::size_t n_traj) {
  const double thermal = std::sqrt(params.beta() * params.mass());
  EscapeConfig c;
  c.x_init = a.x0;
  c.x_refl = a.x0 - 5.0 / (a.omega0 * thermal);
  c.x_abs = a.xm ? *a.xm : a.xb + 3.0 / (a.omegab * thermal);
  double max_curv = 0.0;
  constexpr int kProbe = 512;
  for (int i = 0; i < kProbe; ++i) {
    const double x = c.x_refl + (c.x_abs - c.x_refl) * i / (kProbe - 1);
    max_curv = std::max(max_curv, std::abs(v.eval(x, 2)));
  }
  c.dt = 0.01 * params.mass() * params.gamma() / max_curv;
  c.max_time = 50.0 / classical_rate(a, params).rate;
  c.n_traj = n_traj;
  return c;
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi,
                         std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw ArgumentError("histogram needs hi > lo and bins >= 1");
  Histogram h{lo, hi, std::vector<std::size_t>(bins, 0)};
  const double scale = static_cast<double>(bins) / (hi - lo);
  for (double v : values) {
    if (!(v >= lo && v <= hi)) continue;
    auto b = static_cast<std::size_t>((v - lo) * scale);
    if (b >= bins) b = bins - 1;
    ++h.counts[b];
  }
  return h;
}

double pairwise_sum(const double* values, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += values[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, n - half);
}

EnsembleResult mfpt_ensemble(const Potential& v, const PhysParams& params,
                             const EscapeConfig& config, const EnsembleOptions& options) {
  config.validate();
  const simd::KernelTable& kernels =
      options.kernels != nullptr ? *options.kernels : simd::active_kernels();

  simd::StepParams step;
  step.force_coeffs = v.derivative_coefficients(1);
  step.drift_scale = config.dt / (params.mass() * params.gamma());
  step.noise_scale = std::sqrt(2.0 * params.diffusion() * config.dt);
  step.x_refl = config.x_refl;

  const auto max_steps = static_cast<std::uint64_t>(std::ceil(config.max_time / config.dt));

  EnsembleResult result;
  result.escape_times.assign(config.n_traj, std::numeric_limits<double>::quiet_NaN());

  const std::size_t n_blocks = (config.n_traj + kBlockSize - 1) / kBlockSize;
  std::vector<std::optional<BlockFailure>> failures(n_blocks);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
      const std::size_t first = b * kBlockSize;
      const std::size_t last = std::min(config.n_traj, first + kBlockSize);
      failures[b] = run_block(step, kernels, config, options.master_seed, first, last, max_steps,
                              result.escape_times.data() + first);
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, n_blocks));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (const auto& f : failures) {
    if (f) {
      throw NumericError("non-finite position in trajectory " + std::to_string(f->trajectory) +
                         " at step " + std::to_string(f->step));
    }
  }
  summarize(result);
  if (result.n_escaped == 0) {
    throw EstimationError("all " + std::to_string(result.n_censored) +
                              " trajectories censored at max_time " +
                              std::to_string(config.max_time),
                          std::move(result));
  }
  return result;
}

namespace {

struct QuadratureGrid {
  std::size_t n_left;
  std::size_t n_right;
};

// One Simpson estimate of the double integral divided by exp(scale).
struct ScaledEstimate {
  double value;
  double log_scale;
};

ScaledEstimate simpson_mfpt(const Potential& v, double beta, double x_refl, double x_init,
                            double x_abs, QuadratureGrid g) {
  const std::size_t nodes = g.n_left + g.n_right + 1;
  std::vector<double> x(nodes), bv(nodes);
  const double hl = g.n_left > 0 ? (x_init - x_refl) / static_cast<double>(g.n_left) : 0.0;
  const double hr = (x_abs - x_init) / static_cast<double>(g.n_right);
  for (std::size_t j = 0; j < g.n_left; ++j) x[j] = x_refl + static_cast<double>(j) * hl;
  for (std::size_t j = 0; j <= g.n_right; ++j) {
    x[g.n_left + j] = j == g.n_right ? x_abs : x_init + static_cast<double>(j) * hr;
  }
  simd::poly_eval(simd::active_kernels(), v.coefficients(), x, bv);
  for (double& e : bv) e *= beta;

  const double e_min = *std::min_element(bv.begin(), bv.end());
  const double e_max = *std::max_element(bv.begin() + static_cast<std::ptrdiff_t>(g.n_left), bv.end());

  // Inner cumulative integral of exp(-(beta V - e_min)).
  std::vector<double> f(nodes), inner(nodes, 0.0);
  for (std::size_t j = 0; j < nodes; ++j) f[j] = std::exp(-(bv[j] - e_min));
  const auto accumulate = [&](std::size_t base, std::size_t n, double h) {
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t i = base + j;
      if (j % 2 == 0) {
        inner[i] = inner[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
      } else {
        inner[i] = inner[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
      }
    }
  };
  if (g.n_left > 0) accumulate(0, g.n_left, hl);
  accumulate(g.n_left, g.n_right, hr);

  double odd = 0.0, even = 0.0;
  for (std::size_t j = 1; j < g.n_right; ++j) {
    const std::size_t i = g.n_left + j;
    const double term = std::exp(bv[i] - e_max) * inner[i];
    (j % 2 == 1 ? odd : even) += term;
  }
  const std::size_t a = g.n_left, b = g.n_left + g.n_right;
  const double ends = std::exp(bv[a] - e_max) * inner[a] + std::exp(bv[b] - e_max) * inner[b];
  return {hr / 3.0 * (ends + 4.0 * odd + 2.0 * even), e_max - e_min};
}

}  // namespace

double mfpt_quadrature(const Potential& v, const PhysParams& params, double x_refl,
                       double x_abs, double x_init, std::size_t n_panels) {
  if (!(x_refl <= x_init && x_init <= x_abs) || !std::isfinite(x_refl) || !std::isfinite(x_abs)) {
    throw ArgumentError("mfpt_quadrature needs finite x_refl <= x_init <= x_abs");
  }
  if (n_panels < 64) throw ArgumentError("mfpt_quadrature needs n_panels >= 64");
  if (x_init == x_abs) return 0.0;

  const double total = x_abs - x_refl;
  QuadratureGrid g{0, 0};
  if (x_init > x_refl) {
    const double share = (x_init - x_refl) / total * static_cast<double>(n_panels);
    g.n_left = std::max<std::size_t>(2, 2 * static_cast<std::size_t>(std::llround(share / 2.0)));
  }
  g.n_right = std::max<std::size_t>(2, n_panels > g.n_left + 2 ? n_panels - g.n_left : 2);
  g.n_right += g.n_right % 2;

  const double beta = params.beta();
  const auto estimate = [&](QuadratureGrid grid) {
    return simpson_mfpt(v, beta, x_refl, x_init, x_abs, grid);
  };
  // All estimates are brought to the log scale of the finest one seen.
  ScaledEstimate coarse = estimate(g);
  double previous = std::numeric_limits<double>::quiet_NaN();
  double prev_scale = 0.0;
  while (g.n_left + g.n_right < kMaxQuadraturePanels) {
    g.n_left *= 2;
    g.n_right *= 2;
    const ScaledEstimate fine = estimate(g);
    const double c = coarse.value * std::exp(coarse.log_scale - fine.log_scale);
    const double extrapolated = fine.value + (fine.value - c) / 15.0;
    if (!std::isnan(previous)) {
      const double p = previous * std::exp(prev_scale - fine.log_scale);
      if (std::abs(extrapolated - p) <= 1e-8 * std::abs(extrapolated)) {
        const double tau = extrapolated * std::exp(fine.log_scale) / params.diffusion();
        if (!std::isfinite(tau)) {
          throw QuadratureError("mean first passage time overflows (log tau = " +
                                std::to_string(std::log(extrapolated) + fine.log_scale -
                                               std::log(params.diffusion())) + ")");
        }
        return tau;
      }
    }
    previous = extrapolated;
    prev_scale = fine.log_scale;
    coarse = fine;
  }
  throw QuadratureError("MFPT quadrature did not converge to 1e-8 relative");
}

double SampleSet::mean() const {
  if (positions.empty()) return 0.0;
  return pairwise_sum(positions.data(), positions.size()) / static_cast<double>(positions.size());
}

double SampleSet::variance() const {
  if (positions.size() < 2) return 0.0;
  const double m = mean();
  std::vector<double> sq(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) sq[i] = (positions[i] - m) * (positions[i] - m);
  return pairwise_sum(sq.data(), sq.size()) / static_cast<double>(positions.size() - 1);
}

SampleSet equilibrium_sample(const Potential& v, const PhysParams& params, double x_start,
                             double burn_in, std::size_t n_samples, double thin,
                             std::uint64_t seed, std::optional<double> dt) {
  double step = 0.0;
  if (dt) {
    step = *dt;
  } else {
    const double curv = v.eval(x_start, 2);
    if (!(curv > 0.0)) throw ArgumentError("equilibrium_sample needs V''(x_start) > 0 or an explicit dt");
    step = 0.01 * params.mass() * params.gamma() / curv;
  }
  if (!(step > 0.0)) throw ArgumentError("equilibrium_sample dt must be > 0");
  if (!(thin > 0.0) || !(burn_in >= 0.0)) throw ArgumentError("equilibrium_sample needs thin > 0, burn_in >= 0");

  NoiseStream noise(seed, 0);
  const auto burn_steps = static_cast<std::uint64_t>(std::ceil(burn_in / step));
  const auto thin_steps = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(thin / step)));

  SampleSet out;
  out.dt = step;
  out.positions.reserve(n_samples);
  double x = x_start;
  for (std::uint64_t s = 0; s < burn_steps; ++s) x = overdamped_step(x, v, params, step, noise.normal());
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::uint64_t s = 0; s < thin_steps; ++s) x = overdamped_step(x, v, params, step, noise.normal());
    if (!std::isfinite(x)) throw NumericError("equilibrium chain diverged at sample " + std::to_string(i));
    out.positions.push_back(x);
  }
  return out;
}

}  // namespace kramers
