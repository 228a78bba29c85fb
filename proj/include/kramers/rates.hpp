#pragma once

#include <string_view>

#include "kramers/potential.hpp"
#include "kramers/semiclassical.hpp"

namespace kramers {

enum class RateMethod {
  classical,
  semiclassical_approx,
  semiclassical_exact,
  quantum_smoluchowski,
  doubled_exponent,
};

std::string_view to_string(RateMethod m);

// rate = prefactor * exp(-exponent). For quantum-corrected methods the
// exponent is beta * barrier minus the enhancement.
struct RateResult {
  double rate = 0.0;
  double prefactor = 0.0;
  double exponent = 0.0;
  RateMethod method = RateMethod::classical;
};

RateResult make_rate(double prefactor, double exponent, RateMethod method);

// Overdamped Kramers: (omega0 omegab / 2 pi gamma) exp(-beta dV).
RateResult classical_rate(const StationaryAnalysis& a, const PhysParams& params);

// Both algebraic forms of the quantum enhancement of the approximate
// semiclassical rate:
//   curvature form  beta hbar G [V''(x0) + |V''(xb)|] / 2,  G = 1/(2 sqrt(M V''(x0)))
//   frequency form  hbar beta (omega0^2 + omegab^2) / (4 omega0)
struct EnhancementForms {
  double curvature_form = 0.0;
  double frequency_form = 0.0;
};
EnhancementForms semiclassical_enhancement(const StationaryAnalysis& a,
                                           const PhysParams& params);

// r_c times exp(curvature form). Throws NumericError if the two forms
// disagree beyond 1e-12 relative.
RateResult semiclassical_rate_approx(const StationaryAnalysis& a, const PhysParams& params);

// Kramers rate of the effective potential itself, using its own stationary
// points and curvatures. The bare well is located first (in the same
// bracket) to fix G.
RateResult semiclassical_rate_exact(const Potential& v, const PhysParams& params,
                                    Interval bracket);

// r_c exp{ hbar beta (omega0^2 + omegab^2) / (2 pi gamma)
//          * [psi(1 + hbar beta gamma / 2 pi) - psi(1)] }.
RateResult quantum_smoluchowski_rate(const StationaryAnalysis& a, const PhysParams& params);

// Twice the approximate semiclassical enhancement.
RateResult doubled_exponent_rate(const StationaryAnalysis& a, const PhysParams& params);

// Quantum enhancement carried by a result: beta*barrier - exponent.
double enhancement_exponent(const RateResult& r, const StationaryAnalysis& a,
                            const PhysParams& params);

// D_q = D / (1 - lambda beta V''(x)). Throws SingularityError when the
// denominator is <= 0.
double quantum_diffusion(double x, const Potential& v, double lambda,
                         const PhysParams& params);

struct ValidityThresholds {
  double min_beta_barrier = 5.0;
  double max_hbar_beta_omega0 = 0.5;
  double min_gamma_over_omegab = 5.0;

  bool operator==(const ValidityThresholds&) const = default;
};

struct ValidityReport {
  double beta_barrier = 0.0;
  double hbar_beta_omega0 = 0.0;
  double gamma_over_omegab = 0.0;
  bool beta_barrier_ok = false;
  bool hbar_beta_omega0_ok = false;
  bool gamma_over_omegab_ok = false;

  bool all_ok() const { return beta_barrier_ok && hbar_beta_omega0_ok && gamma_over_omegab_ok; }
};

ValidityReport validity_report(const StationaryAnalysis& a, const PhysParams& params,
                               const ValidityThresholds& thresholds = {});

}  // namespace kramers
