#include "kramers/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kramers/error.hpp"
#include "kramers/special.hpp"

namespace kramers {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double kramers_prefactor(const StationaryAnalysis& a, const PhysParams& params) {
  return a.omega0 * a.omegab / (kTwoPi * params.gamma());
}

RateResult enhanced(const StationaryAnalysis& a, const PhysParams& params,
                    double enhancement, RateMethod method) {
  return make_rate(kramers_prefactor(a, params),
                   params.beta() * a.barrier - enhancement, method);
}

}  // namespace

std::string_view to_string(RateMethod m) {
  switch (m) {
    case RateMethod::classical: return "classical";
    case RateMethod::semiclassical_approx: return "semiclassical_approx";
    case RateMethod::semiclassical_exact: return "semiclassical_exact";
    case RateMethod::quantum_smoluchowski: return "quantum_smoluchowski";
    case RateMethod::doubled_exponent: return "doubled_exponent";
  }
  return "unknown";
}

RateResult make_rate(double prefactor, double exponent, RateMethod method) {
  RateResult r;
  r.prefactor = prefactor;
  r.exponent = exponent;
  r.rate = prefactor * std::exp(-exponent);
  r.method = method;
  if (!(r.rate > 0.0) || !std::isfinite(r.rate)) {
    throw NumericError("rate is not a positive finite number (prefactor " +
                       std::to_string(prefactor) + ", exponent " + std::to_string(exponent) + ")");
  }
  return r;
}

RateResult classical_rate(const StationaryAnalysis& a, const PhysParams& params) {
  return make_rate(kramers_prefactor(a, params), params.beta() * a.barrier,
                   RateMethod::classical);
}

EnhancementForms semiclassical_enhancement(const StationaryAnalysis& a,
                                           const PhysParams& params) {
  if (!(a.curvature_well > 0.0)) throw DomainError("semiclassical rate needs V''(x0) > 0");
  const double hb = params.hbar() * params.beta();
  const double G = 1.0 / (2.0 * std::sqrt(a.mass * a.curvature_well));
  EnhancementForms f;
  f.curvature_form = 0.5 * hb * G * (a.curvature_well + std::abs(a.curvature_barrier));
  f.frequency_form =
      hb * (a.omega0 * a.omega0 + a.omegab * a.omegab) / (4.0 * a.omega0);
  return f;
}

RateResult semiclassical_rate_approx(const StationaryAnalysis& a, const PhysParams& params) {
  const EnhancementForms f = semiclassical_enhancement(a, params);
  const double scale = std::max(std::abs(f.curvature_form), std::abs(f.frequency_form));
  if (scale > 0.0 && std::abs(f.curvature_form - f.frequency_form) > 1e-12 * scale) {
    throw NumericError("curvature and frequency forms of the enhancement disagree");
  }
  return enhanced(a, params, f.curvature_form, RateMethod::semiclassical_approx);
}

RateResult semiclassical_rate_exact(const Potential& v, const PhysParams& params,
                                    Interval bracket) {
  const StationaryAnalysis bare = find_stationary_points(v, params.mass(), bracket);
  const double G = quasi_stationary_G(v, bare.x0, params);
  const Potential vhat = effective_potential(v, G, params);
  StationaryAnalysis eff;
  try {
    eff = find_stationary_points(vhat, params.mass(), bracket);
  } catch (const StructureError& e) {
    throw StructureError(std::string("effective potential lost its barrier: ") + e.what());
  }
  return make_rate(kramers_prefactor(eff, params), params.beta() * eff.barrier,
                   RateMethod::semiclassical_exact);
}

RateResult quantum_smoluchowski_rate(const StationaryAnalysis& a, const PhysParams& params) {
  const double hb = params.hbar() * params.beta();
  const double arg = hb * params.gamma() / kTwoPi;
  const double psi_gain = arg > 0.0 ? digamma(1.0 + arg) - digamma(1.0) : 0.0;
  const double enhancement = hb * (a.omega0 * a.omega0 + a.omegab * a.omegab) /
                             (kTwoPi * params.gamma()) * psi_gain;
  return enhanced(a, params, enhancement, RateMethod::quantum_smoluchowski);
}

RateResult doubled_exponent_rate(const StationaryAnalysis& a, const PhysParams& params) {
  const EnhancementForms f = semiclassical_enhancement(a, params);
  return enhanced(a, params, 2.0 * f.curvature_form, RateMethod::doubled_exponent);
}

double enhancement_exponent(const RateResult& r, const StationaryAnalysis& a,
                            const PhysParams& params) {
  return params.beta() * a.barrier - r.exponent;
}

double quantum_diffusion(double x, const Potential& v, double lambda,
                         const PhysParams& params) {
  const double denom = 1.0 - lambda * params.beta() * v.eval(x, 2);
  if (!(denom > 0.0)) {
    throw SingularityError("1 - lambda beta V''(x) = " + std::to_string(denom) +
                           " <= 0 at x = " + std::to_string(x));
  }
  return params.diffusion() / denom;
}

ValidityReport validity_report(const StationaryAnalysis& a, const PhysParams& params,
                               const ValidityThresholds& t) {
  ValidityReport r;
  r.beta_barrier = params.beta() * a.barrier;
  r.hbar_beta_omega0 = params.hbar() * params.beta() * a.omega0;
  r.gamma_over_omegab = params.gamma() / a.omegab;
  r.beta_barrier_ok = r.beta_barrier >= t.min_beta_barrier;
  r.hbar_beta_omega0_ok = r.hbar_beta_omega0 <= t.max_hbar_beta_omega0;
  r.gamma_over_omegab_ok = r.gamma_over_omegab >= t.min_gamma_over_omegab;
  return r;
}

}  // namespace kramers
