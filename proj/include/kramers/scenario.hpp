#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kramers/potential.hpp"
#include "kramers/rates.hpp"
#include "kramers/semiclassical.hpp"

namespace kramers {

enum class Method { classical, sc_approx, sc_exact, qsmolu, doubled, mc, quadrature, pde, eom };

std::string_view to_string(Method m);
std::optional<Method> method_from_string(std::string_view name);
bool is_analytic(Method m);

struct PotentialSpec {
  Potential::Kind kind = Potential::Kind::double_well;
  double A = 1.0;
  double B = 1.0;
  std::vector<double> coefficients;  // polynomial kind only

  Potential build() const;
  bool operator==(const PotentialSpec&) const = default;
};

// Each unset field falls back to default_escape_config.
struct EscapeOverrides {
  std::optional<double> x_init;
  std::optional<double> x_abs;
  std::optional<double> x_refl;
  std::optional<double> dt;
  std::optional<double> max_time;
  std::size_t n_traj = 1000;

  bool operator==(const EscapeOverrides&) const = default;
};

// Domain follows the escape boundaries. Unset dt is 1/(2000 r_c), unset
// steps cover 6/r_c.
struct PdeSettings {
  std::size_t n_cells = 2000;
  std::optional<double> dt;
  std::optional<std::size_t> steps;

  bool operator==(const PdeSettings&) const = default;
};

// Unset initial state is the quasi-stationary point (x0, 0, G*, 0).
struct EomSettings {
  double dt = 1e-3;
  std::size_t steps = 10000;
  std::size_t record_every = 100;
  std::optional<VariationalState> initial;

  bool operator==(const EomSettings&) const = default;
};

struct SweepSpec {
  std::string param;  // hbar | beta | gamma | mass | A | B
  std::vector<double> values;

  bool operator==(const SweepSpec&) const = default;
};

struct OutputSpec {
  std::string json = "report.json";
  std::string csv = "rates.csv";
  std::string trajectory = "trajectory.csv";

  bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
  PotentialSpec potential;
  PhysParams params{1.0, 1.0, 1.0};
  std::optional<Interval> bracket;  // required for polynomial potentials
  std::vector<Method> methods;
  EscapeOverrides escape;
  PdeSettings pde;
  EomSettings eom;
  std::optional<SweepSpec> sweep;
  OutputSpec output;
  std::uint64_t seed = 0;
  ValidityThresholds validity;

  bool operator==(const Scenario&) const = default;
};

// One sweep point with every parameter resolved.
struct ResolvedRun {
  std::optional<double> sweep_value;
  PotentialSpec potential;
  PhysParams params;
  Interval bracket;
};

// Parses a JSON scenario document. Throws ConfigError naming the field
// path, or the nearest valid key for unknown keys.
Scenario parse_scenario(std::string_view text);

// Canonical JSON with every field explicit; parse_scenario inverts it.
std::string emit_scenario(const Scenario& s);

// One entry per sweep value (a single entry without a sweep).
std::vector<ResolvedRun> resolve_runs(const Scenario& s);

// Default search interval: [-2A/3B, 4A/3B] for cubics, [-B/2, 3B/2] for
// double wells.
Interval default_bracket(const PotentialSpec& p);

}  // namespace kramers
