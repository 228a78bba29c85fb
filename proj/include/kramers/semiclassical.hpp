#pragma once

#include <cstddef>
#include <vector>

#include "kramers/error.hpp"
#include "kramers/potential.hpp"

namespace kramers {

// Physical parameters with k_B = 1; temperature enters only through beta.
class PhysParams {
 public:
  // Throws DomainError unless mass, gamma, beta > 0 and hbar >= 0.
  PhysParams(double mass, double gamma, double beta, double hbar = 0.0);

  double mass() const { return mass_; }
  double gamma() const { return gamma_; }
  double beta() const { return beta_; }
  double hbar() const { return hbar_; }
  double temperature() const { return 1.0 / beta_; }
  // D = 1 / (beta M gamma).
  double diffusion() const { return 1.0 / (beta_ * mass_ * gamma_); }

  PhysParams with_hbar(double hbar) const { return {mass_, gamma_, beta_, hbar}; }
  PhysParams with_beta(double beta) const { return {mass_, gamma_, beta, hbar_}; }
  PhysParams with_gamma(double gamma) const { return {mass_, gamma, beta_, hbar_}; }

  bool operator==(const PhysParams&) const = default;

 private:
  double mass_;
  double gamma_;
  double beta_;
  double hbar_;
};

// Gaussian wavepacket parameters: mean position and momentum, width G
// (position variance is hbar*G) and Pi, the conjugate of hbar*G.
struct VariationalState {
  double x = 0.0;
  double p = 0.0;
  double G = 1.0;
  double Pi = 0.0;

  bool operator==(const VariationalState&) const = default;
};

struct Moments {
  double mean_q = 0.0;
  double mean_p = 0.0;
  double var_q = 0.0;
  double var_p = 0.0;
};

// Time derivative (x', p', G', Pi') of a VariationalState.
struct StateRate {
  double dx = 0.0;
  double dp = 0.0;
  double dG = 0.0;
  double dPi = 0.0;
};

// p^2/2M + V(x) + hbar [1/(8MG) + (2/M) G Pi^2 + G V''(x)/2].
double semiclassical_hamiltonian(const VariationalState& s, const Potential& v,
                                 const PhysParams& params);

Moments expectation_values(const VariationalState& s, double hbar);

// Delta Q * Delta P = (hbar/2) sqrt(1 + (4 G Pi)^2).
double uncertainty_product(const VariationalState& s, double hbar);

StateRate eom_rhs(const VariationalState& s, const Potential& v,
                  const PhysParams& params);

// Width that makes G' = Pi' = 0 with Pi = 0 at the minimum x0:
// G = 1 / (2 sqrt(M V''(x0))).
double quasi_stationary_G(const Potential& v, double x0, const PhysParams& params);

// V(x) + hbar [1/(8MG) + G V''(x)/2] with G held fixed, returned as a
// polynomial of the same degree.
Potential effective_potential(const Potential& v, double G, const PhysParams& params);

// Pi' at (x, p, G, 0): 1/(8 M G^2) - V''(x)/2. Zero at the bare minimum for
// the quasi-stationary G; at the minimum of the effective potential it
// measures how far the fixed-G prescription is from a joint fixed point.
double width_residual(const Potential& v, double x, double G, const PhysParams& params);

struct TrajectorySample {
  std::size_t step = 0;
  double t = 0.0;
  VariationalState state;
  double energy = 0.0;       // semiclassical_hamiltonian
  double uncertainty = 0.0;  // uncertainty_product
  double dG = 0.0;           // G' evaluated at this sample
};

struct Trajectory {
  std::vector<TrajectorySample> samples;

  // max |H(t) - H(0)| / |H(0)|, or absolute drift when H(0) == 0.
  double relative_energy_drift() const;
};

// Thrown when an RK4 stage produces G <= 0; carries the offending step.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// Classical RK4 over `steps` steps of size dt; records the initial state and
// every record_every-th step (the final step is always recorded).
Trajectory integrate_eom(const VariationalState& initial, const Potential& v,
                         const PhysParams& params, double dt, std::size_t steps,
                         std::size_t record_every = 1);

}  // namespace kramers
