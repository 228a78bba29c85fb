#include "kramers/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kramers/error.hpp"
#include "kramers/simd/kernels.hpp"

namespace kramers {
namespace {

// Bernoulli function z / (e^z - 1).
double bernoulli(double z) {
  if (z == 0.0) return 1.0;
  return z / std::expm1(z);
}

}  // namespace

double GridDensity::mass() const {
  double s = 0.0;
  for (double p : values) s += p;
  return s * dx;
}

std::vector<double> TransitionOperator::apply(const std::vector<double>& p) const {
  std::vector<double> out(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    double r = diag[i] * p[i];
    if (i > 0) r += lower[i] * p[i - 1];
    if (i + 1 < n_cells) r += upper[i] * p[i + 1];
    out[i] = r;
  }
  return out;
}

std::vector<double> TransitionOperator::column_sums() const {
  std::vector<double> out(n_cells);
  for (std::size_t j = 0; j < n_cells; ++j) {
    double s = diag[j];
    if (j > 0) s += upper[j - 1];
    if (j + 1 < n_cells) s += lower[j + 1];
    out[j] = s;
  }
  return out;
}

TransitionOperator discretize(const Potential& v, const PhysParams& params, double x_left,
                              double x_right, std::size_t n_cells, RightBoundary right) {
  if (n_cells < 64) throw ArgumentError("discretize needs n_cells >= 64");
  if (!(x_left < x_right) || !std::isfinite(x_left) || !std::isfinite(x_right)) {
    throw ArgumentError("discretize needs finite x_left < x_right");
  }
  TransitionOperator op;
  op.x_left = x_left;
  op.x_right = x_right;
  op.n_cells = n_cells;
  op.dx = (x_right - x_left) / static_cast<double>(n_cells);
  op.right = right;
  op.lower.assign(n_cells, 0.0);
  op.diag.assign(n_cells, 0.0);
  op.upper.assign(n_cells, 0.0);

  std::vector<double> x(n_cells + 1), pot(n_cells + 1), force(n_cells + 1);
  for (std::size_t i = 0; i < n_cells; ++i) x[i] = x_left + (static_cast<double>(i) + 0.5) * op.dx;
  x[n_cells] = x_right;
  const auto& k = simd::active_kernels();
  simd::poly_eval(k, v.coefficients(), x, pot);
  simd::poly_eval(k, v.derivative_coefficients(1), x, force);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    if (!std::isfinite(force[i]) || !std::isfinite(pot[i])) {
      throw NumericError("non-finite V' at x = " + std::to_string(x[i]));
    }
  }

  const double beta = params.beta();
  const double w = params.diffusion() / (op.dx * op.dx);
  for (std::size_t i = 0; i + 1 < n_cells; ++i) {
    const double z = beta * (pot[i] - pot[i + 1]);
    const double out_right = w * bernoulli(-z);  // P_i -> P_{i+1}
    const double out_left = w * bernoulli(z);    // P_{i+1} -> P_i
    op.diag[i] -= out_right;
    op.lower[i + 1] += out_right;
    op.diag[i + 1] -= out_left;
    op.upper[i] += out_left;
  }
  if (right == RightBoundary::absorbing) {
    const double z = beta * (pot[n_cells - 1] - pot[n_cells]);
    op.diag[n_cells - 1] -= 2.0 * w * bernoulli(-z);
  }
  return op;
}

GridDensity make_density(const TransitionOperator& op, std::vector<double> values) {
  if (values.size() != op.n_cells) throw ArgumentError("density size does not match the grid");
  for (double p : values) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ArgumentError("density values must be finite and >= 0");
  }
  return {op.x_left, op.x_right, op.n_cells, op.dx, std::move(values), op.right};
}

GridDensity boltzmann_density(const TransitionOperator& op, const Potential& v, double beta,
                              double x_cut) {
  std::vector<double> e(op.n_cells);
  double e_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < op.n_cells; ++i) {
    e[i] = beta * v.eval(op.x_left + (static_cast<double>(i) + 0.5) * op.dx, 0);
    e_min = std::min(e_min, e[i]);
  }
  std::vector<double> p(op.n_cells, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < op.n_cells; ++i) {
    const double x = op.x_left + (static_cast<double>(i) + 0.5) * op.dx;
    if (x < x_cut) {
      p[i] = std::exp(-(e[i] - e_min));
      total += p[i];
    }
  }
  if (!(total > 0.0)) throw ArgumentError("no grid cells below x_cut");
  for (double& q : p) q /= total * op.dx;
  return make_density(op, std::move(p));
}

EvolveResult evolve(const TransitionOperator& op, const GridDensity& initial, double dt,
                    std::size_t steps) {
  if (!(dt > 0.0)) throw ArgumentError("evolve needs dt > 0");
  if (initial.n_cells != op.n_cells) throw ArgumentError("density does not match the operator grid");
  const std::size_t n = op.n_cells;

  // Thomas factorisation of (I - dt L), reused every step.
  std::vector<double> cprime(n), inv_denom(n), a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = -dt * op.lower[i];
  double denom = 1.0 - dt * op.diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) denom = (1.0 - dt * op.diag[i]) - a[i] * cprime[i - 1];
    if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) {
      throw NumericError("tridiagonal solve failed at row " + std::to_string(i));
    }
    inv_denom[i] = 1.0 / denom;
    cprime[i] = (i + 1 < n) ? -dt * op.upper[i] * inv_denom[i] : 0.0;
  }

  EvolveResult out;
  out.density = initial;
  out.survival.t.reserve(steps + 1);
  out.survival.S.reserve(steps + 1);
  out.survival.t.push_back(0.0);
  out.survival.S.push_back(initial.mass());

  std::vector<double>& p = out.density.values;
  for (std::size_t s = 1; s <= steps; ++s) {
    p[0] = p[0] * inv_denom[0];
    for (std::size_t i = 1; i < n; ++i) p[i] = (p[i] - a[i] * p[i - 1]) * inv_denom[i];
    for (std::size_t i = n - 1; i-- > 0;) p[i] -= cprime[i] * p[i + 1];
    const double S = out.density.mass();
    if (!std::isfinite(S)) throw NumericError("non-finite survival at step " + std::to_string(s));
    out.survival.t.push_back(static_cast<double>(s) * dt);
    out.survival.S.push_back(S);
  }
  return out;
}

DecayFit decay_rate(const SurvivalSeries& series, FitWindow window) {
  if (series.t.size() != series.S.size()) throw ArgumentError("survival series length mismatch");
  std::vector<double> t, y;
  bool started = false;
  for (std::size_t i = 0; i < series.S.size(); ++i) {
    const double S = series.S[i];
    if (!started && S < window.upper) started = true;
    if (!started) continue;
    if (S < window.lower || !(S > 0.0)) break;
    t.push_back(series.t[i]);
    y.push_back(std::log(S));
  }
  if (t.size() < 3) {
    throw ExtractionError("fit window holds " + std::to_string(t.size()) +
                          " points; decay too fast or too slow for the horizon");
  }
  const double n = static_cast<double>(t.size());
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  const double slope = sty / stt;
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = y[i] - (my + slope * (t[i] - mt));
    ss += r * r;
  }
  return {-slope, std::sqrt(ss / n), t.size()};
}

}  // namespace kramers
