#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kramers/scenario.hpp"

namespace kramers {

// Which methods a front-end command may execute.
enum class RunMode { rates, simulate, pde, evolve, sweep, check };

std::vector<Method> methods_for(RunMode mode, const std::vector<Method>& requested);

struct RunOptions {
  RunMode mode = RunMode::sweep;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;  // overrides Scenario::seed
  bool timing = false;               // fill runtime_seconds
};

struct RunError {
  std::optional<double> sweep_value;
  std::string method;  // "analysis" for failures before any method runs
  std::string kind;    // config | numeric
  std::string message;
};

struct RunReport {
  nlohmann::json json;      // schema 1
  std::string csv;          // one row per (sweep point, method)
  std::string trajectory;   // eom samples, empty without eom
  std::vector<RunError> errors;
  bool validity_ok = true;

  // 0 ok, 2 config error, 3 numeric error, 4 validity (strict only).
  int exit_code(bool strict) const;
};

inline constexpr const char* kCsvHeader =
    "sweep_param,sweep_value,method,rate,prefactor,exponent,stderr,runtime_seconds";

// Shortest round-trip decimal form.
std::string format_double(double v);

// Per-point seed for stochastic methods, so sweep points draw independent
// streams.
std::uint64_t point_seed(std::uint64_t master, std::size_t point);

RunReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Writes the report files under `dir` using the scenario's output names.
void write_report(const RunReport& report, const Scenario& scenario, const std::string& dir);

}  // namespace kramers
