#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kramers/error.hpp"
#include "kramers/runner.hpp"

namespace {

constexpr const char* kDefaults = R"(Scenario file: JSON (comments allowed), schema 1.
  potential  {kind: cubic|double_well, A, B} or {kind: polynomial, coefficients: [c0, c1, ...]}
  params     {mass = 1, gamma, beta, hbar = 0}
  bracket    [lo, hi]; default [-2A/3B, 4A/3B] (cubic), [-B/2, 3B/2] (double_well)
  methods    [classical, sc_approx, sc_exact, qsmolu, doubled, mc, quadrature, pde, eom]
  escape     {x_init = x0, x_abs = xm or xb + 3/(omegab sqrt(beta M)),
              x_refl = x0 - 5/(omega0 sqrt(beta M)), dt = 0.01 M gamma / max|V''|,
              max_time = 50 / r_c, n_traj = 1000}
  pde        {n_cells = 2000, dt = 1/(2000 r_c), steps = 12000}
  eom        {dt = 1e-3, steps = 10000, record_every = 100, initial = {x0, 0, G*, 0}}
  sweep      {param: hbar|beta|gamma|mass|A|B, values: [...]}
  output     {json = report.json, csv = rates.csv, trajectory = trajectory.csv}
  seed = 0
  validity   {min_beta_barrier = 5, max_hbar_beta_omega0 = 0.5, min_gamma_over_omegab = 5}
Exit codes: 0 ok, 2 config error, 3 numeric error, 4 validity violated (--strict).)";

struct Flags {
  std::string scenario;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  bool strict = false;
  bool timing = false;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw kramers::ConfigError("--scenario: cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// A report carrying only the configuration error, so callers always get JSON.
void write_config_failure(const std::string& dir, const std::string& message) {
  nlohmann::json j = {{"schema", 1},
                      {"runs", nlohmann::json::array()},
                      {"errors", {{{"method", "scenario"}, {"kind", "config"}, {"message", message}}}}};
  std::filesystem::create_directories(dir);
  std::ofstream(std::filesystem::path(dir) / "report.json") << j.dump(2) << "\n";
}

int run(kramers::RunMode mode, const Flags& flags) {
  kramers::Scenario scenario;
  try {
    scenario = kramers::parse_scenario(read_file(flags.scenario));
  } catch (const kramers::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    write_config_failure(flags.out, e.what());
    return 2;
  }
  if (mode != kramers::RunMode::check && kramers::methods_for(mode, scenario.methods).empty()) {
    std::cerr << "error: methods: none of the listed methods belong to this command\n";
    return 2;
  }
  kramers::RunOptions options;
  options.mode = mode;
  options.workers = flags.workers;
  options.seed = flags.seed;
  options.timing = flags.timing;
  const kramers::RunReport report = kramers::run_scenario(scenario, options);
  try {
    kramers::write_report(report, scenario, flags.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  for (const kramers::RunError& e : report.errors) {
    std::cerr << "error: " << e.method;
    if (e.sweep_value) std::cerr << " at " << kramers::format_double(*e.sweep_value);
    std::cerr << ": " << e.message << "\n";
  }
  if (mode == kramers::RunMode::check) {
    for (const auto& point : report.json["runs"]) {
      if (!point.contains("validity")) continue;
      const auto& v = point["validity"];
      std::cout << "beta_barrier=" << v["beta_barrier"] << " hbar_beta_omega0=" << v["hbar_beta_omega0"]
                << " gamma_over_omegab=" << v["gamma_over_omegab"]
                << (v["all_ok"].get<bool>() ? " ok" : " VIOLATED") << "\n";
    }
  } else {
    std::cout << report.csv;
  }
  return report.exit_code(flags.strict);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Escape rates for overdamped metastable systems, classical and semiclassical."};
  app.footer(kDefaults);
  app.require_subcommand(1);

  Flags flags;
  struct Command {
    const char* name;
    const char* help;
    kramers::RunMode mode;
  };
  const Command commands[] = {
      {"rates", "analytic rates only", kramers::RunMode::rates},
      {"simulate", "Monte Carlo and quadrature escape times", kramers::RunMode::simulate},
      {"pde", "Fokker-Planck decay rate", kramers::RunMode::pde},
      {"evolve", "variational equations of motion, trajectory dump", kramers::RunMode::evolve},
      {"sweep", "every listed method at every sweep point", kramers::RunMode::sweep},
      {"check", "validity diagnostics only", kramers::RunMode::check},
  };
  kramers::RunMode chosen = kramers::RunMode::sweep;
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--scenario", flags.scenario, "scenario file")->required();
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--seed", flags.seed, "master seed, overrides the scenario");
    sub->add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", flags.strict, "exit 4 when validity thresholds fail");
    sub->add_flag("--timing", flags.timing, "record runtime_seconds");
    sub->callback([&chosen, mode = c.mode] { chosen = mode; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return run(chosen, flags);
}
