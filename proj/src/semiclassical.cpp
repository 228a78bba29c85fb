#include "kramers/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kramers {
namespace {

void require_width(double G) {
  if (!(G > 0.0)) throw DomainError("width G must be > 0 (got " + std::to_string(G) + ")");
}

VariationalState advance(const VariationalState& s, const StateRate& r, double h) {
  return {s.x + h * r.dx, s.p + h * r.dp, s.G + h * r.dG, s.Pi + h * r.dPi};
}

}  // namespace

PhysParams::PhysParams(double mass, double gamma, double beta, double hbar)
    : mass_(mass), gamma_(gamma), beta_(beta), hbar_(hbar) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("params.mass: must be > 0");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("params.gamma: must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("params.beta: must be > 0");
  if (!(hbar >= 0.0) || !std::isfinite(hbar)) throw DomainError("params.hbar: must be >= 0");
}

double semiclassical_hamiltonian(const VariationalState& s, const Potential& v,
                                 const PhysParams& params) {
  require_width(s.G);
  const double m = params.mass();
  const double quantum = 1.0 / (8.0 * m * s.G) + (2.0 / m) * s.G * s.Pi * s.Pi +
                         0.5 * s.G * v.eval(s.x, 2);
  return s.p * s.p / (2.0 * m) + v.eval(s.x, 0) + params.hbar() * quantum;
}

Moments expectation_values(const VariationalState& s, double hbar) {
  require_width(s.G);
  return {s.x, s.p, hbar * s.G, 4.0 * hbar * s.G * s.Pi * s.Pi + hbar / (4.0 * s.G)};
}

double uncertainty_product(const VariationalState& s, double hbar) {
  require_width(s.G);
  const double q = 4.0 * s.G * s.Pi;
  return 0.5 * hbar * std::sqrt(1.0 + q * q);
}

StateRate eom_rhs(const VariationalState& s, const Potential& v, const PhysParams& params) {
  require_width(s.G);
  const double m = params.mass();
  StateRate r;
  r.dx = s.p / m;
  r.dG = 4.0 * s.G * s.Pi / m;
  r.dp = -v.eval(s.x, 1) - 0.5 * params.hbar() * s.G * v.eval(s.x, 3);
  r.dPi = 1.0 / (8.0 * m * s.G * s.G) - 2.0 * s.Pi * s.Pi / m - 0.5 * v.eval(s.x, 2);
  return r;
}

double quasi_stationary_G(const Potential& v, double x0, const PhysParams& params) {
  const double curv = v.eval(x0, 2);
  if (!(curv > 0.0)) {
    throw DomainError("quasi-stationary width needs V''(x0) > 0 (got " + std::to_string(curv) + ")");
  }
  return 1.0 / (2.0 * std::sqrt(params.mass() * curv));
}

Potential effective_potential(const Potential& v, double G, const PhysParams& params) {
  require_width(G);
  const double hbar = params.hbar();
  std::vector<double> c(v.coefficients().begin(), v.coefficients().end());
  c[0] += hbar / (8.0 * params.mass() * G);
  const auto curv = v.derivative_coefficients(2);
  const double scale = 0.5 * hbar * G;
  for (std::size_t k = 0; k < curv.size(); ++k) c[k] += scale * curv[k];
  return Potential::polynomial(std::move(c));
}

double width_residual(const Potential& v, double x, double G, const PhysParams& params) {
  require_width(G);
  return 1.0 / (8.0 * params.mass() * G * G) - 0.5 * v.eval(x, 2);
}

double Trajectory::relative_energy_drift() const {
  if (samples.empty()) return 0.0;
  const double e0 = samples.front().energy;
  double worst = 0.0;
  for (const auto& s : samples) worst = std::max(worst, std::abs(s.energy - e0));
  return e0 != 0.0 ? worst / std::abs(e0) : worst;
}

Trajectory integrate_eom(const VariationalState& initial, const Potential& v,
                         const PhysParams& params, double dt, std::size_t steps,
                         std::size_t record_every) {
  if (!(dt > 0.0)) throw ArgumentError("dt must be > 0");
  if (record_every == 0) record_every = 1;
  require_width(initial.G);

  Trajectory traj;
  traj.samples.reserve(steps / record_every + 2);
  const auto record = [&](std::size_t step, const VariationalState& s) {
    const StateRate r = eom_rhs(s, v, params);
    traj.samples.push_back({step, static_cast<double>(step) * dt, s,
                            semiclassical_hamiltonian(s, v, params),
                            uncertainty_product(s, params.hbar()), r.dG});
  };
  record(0, initial);

  VariationalState s = initial;
  for (std::size_t n = 1; n <= steps; ++n) {
    try {
      const StateRate k1 = eom_rhs(s, v, params);
      const StateRate k2 = eom_rhs(advance(s, k1, 0.5 * dt), v, params);
      const StateRate k3 = eom_rhs(advance(s, k2, 0.5 * dt), v, params);
      const StateRate k4 = eom_rhs(advance(s, k3, dt), v, params);
      s.x += dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
      s.p += dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
      s.G += dt / 6.0 * (k1.dG + 2.0 * k2.dG + 2.0 * k3.dG + k4.dG);
      s.Pi += dt / 6.0 * (k1.dPi + 2.0 * k2.dPi + 2.0 * k3.dPi + k4.dPi);
      require_width(s.G);
    } catch (const DomainError&) {
      throw IntegrationError("width G left the positive domain at step " + std::to_string(n), n);
    }
    if (!std::isfinite(s.x) || !std::isfinite(s.p) || !std::isfinite(s.Pi)) {
      throw IntegrationError("non-finite state at step " + std::to_string(n), n);
    }
    if (n % record_every == 0 || n == steps) record(n, s);
  }
  return traj;
}

}  // namespace kramers
