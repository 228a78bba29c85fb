#include "kramers/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <thread>

#include "kramers/error.hpp"
#include "kramers/fokker_planck.hpp"
#include "kramers/langevin.hpp"

namespace kramers {
namespace {

using nlohmann::json;

struct Row {
  Method method;
  std::optional<double> rate, prefactor, exponent, stderr_rate;
  double runtime = 0.0;
};

struct PointOutcome {
  json point;
  std::vector<Row> rows;
  std::vector<RunError> errors;
  std::string trajectory;
  bool validity_ok = true;
};

struct PointJob {
  const Scenario* scenario;
  const ResolvedRun* run;
  std::size_t index;
  const std::vector<Method>* methods;
  unsigned workers;
  std::uint64_t master_seed;
  bool timing;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

EscapeConfig escape_config(const Potential& v, const StationaryAnalysis& a, const PhysParams& p,
                           const EscapeOverrides& o) {
  EscapeConfig c = default_escape_config(v, a, p, o.n_traj);
  if (o.x_init) c.x_init = *o.x_init;
  if (o.x_abs) c.x_abs = *o.x_abs;
  if (o.x_refl) c.x_refl = *o.x_refl;
  if (o.dt) c.dt = *o.dt;
  if (o.max_time) c.max_time = *o.max_time;
  return c;
}

json escape_json(const EscapeConfig& c) {
  return {{"x_init", c.x_init}, {"x_abs", c.x_abs},       {"x_refl", c.x_refl},
          {"dt", c.dt},         {"max_time", c.max_time}, {"n_traj", c.n_traj}};
}

json ensemble_json(const EnsembleResult& r) {
  return {{"mfpt_mean", r.mfpt_mean},
          {"mfpt_stderr", r.mfpt_stderr},
          {"n_escaped", r.n_escaped},
          {"n_censored", r.n_censored},
          {"histogram",
           {{"lo", r.histogram.lo}, {"hi", r.histogram.hi}, {"counts", r.histogram.counts}}}};
}

// Simulation rates share the analytic convention: exponent beta dV,
// prefactor rate e^(beta dV).
void fill_barrier_form(Row& row, double rate, const StationaryAnalysis& a, const PhysParams& p) {
  row.rate = rate;
  row.exponent = p.beta() * a.barrier;
  row.prefactor = rate * std::exp(*row.exponent);
}

void fill_rate(Row& row, const RateResult& r) {
  row.rate = r.rate;
  row.prefactor = r.prefactor;
  row.exponent = r.exponent;
}

json run_method(Method m, const PointJob& job, const Potential& v, const StationaryAnalysis& a,
                Row& row, std::string& trajectory) {
  const Scenario& s = *job.scenario;
  const PhysParams& p = job.run->params;
  json oracle = json::object();
  switch (m) {
    case Method::classical:
      fill_rate(row, classical_rate(a, p));
      break;
    case Method::sc_approx: {
      fill_rate(row, semiclassical_rate_approx(a, p));
      const EnhancementForms f = semiclassical_enhancement(a, p);
      oracle = {{"curvature_form", f.curvature_form}, {"frequency_form", f.frequency_form}};
      break;
    }
    case Method::sc_exact: {
      fill_rate(row, semiclassical_rate_exact(v, p, job.run->bracket));
      const double G = quasi_stationary_G(v, a.x0, p);
      const auto eff = find_stationary_points(effective_potential(v, G, p), p.mass(), job.run->bracket);
      oracle = {{"G", G},
                {"x0", eff.x0},
                {"xb", eff.xb},
                {"barrier", eff.barrier},
                {"width_residual_at_x0", width_residual(v, eff.x0, G, p)}};
      break;
    }
    case Method::qsmolu: {
      fill_rate(row, quantum_smoluchowski_rate(a, p));
      const double arg = p.hbar() * p.beta() * p.gamma() / (2.0 * std::numbers::pi);
      const double lambda = p.hbar() * quasi_stationary_G(v, a.x0, p);
      oracle = {{"digamma_argument", 1.0 + arg}, {"lambda", lambda}, {"diffusion", p.diffusion()}};
      try {
        oracle["diffusion_quantum_well"] = quantum_diffusion(a.x0, v, lambda, p);
      } catch (const SingularityError& e) {
        oracle["diffusion_quantum_well"] = nullptr;
        oracle["diffusion_quantum_note"] = e.what();
      }
      break;
    }
    case Method::doubled:
      fill_rate(row, doubled_exponent_rate(a, p));
      break;
    case Method::mc: {
      const EscapeConfig c = escape_config(v, a, p, s.escape);
      const std::uint64_t seed = point_seed(job.master_seed, job.index);
      oracle = {{"escape", escape_json(c)}, {"seed", seed}};
      const EnsembleResult r = mfpt_ensemble(v, p, c, {seed, job.workers});
      fill_barrier_form(row, 1.0 / r.mfpt_mean, a, p);
      row.stderr_rate = r.mfpt_stderr / (r.mfpt_mean * r.mfpt_mean);
      oracle.update(ensemble_json(r));
      break;
    }
    case Method::quadrature: {
      const EscapeConfig c = escape_config(v, a, p, s.escape);
      const double tau = mfpt_quadrature(v, p, c.x_refl, c.x_abs, c.x_init);
      fill_barrier_form(row, 1.0 / tau, a, p);
      oracle = {{"escape", escape_json(c)}, {"mfpt", tau}};
      break;
    }
    case Method::pde: {
      const EscapeConfig c = escape_config(v, a, p, s.escape);
      const double kramers = classical_rate(a, p).rate;
      const double dt = s.pde.dt.value_or(1.0 / (2000.0 * kramers));
      const std::size_t steps = s.pde.steps.value_or(12000);
      const auto op = discretize(v, p, c.x_refl, c.x_abs, s.pde.n_cells);
      const EvolveResult ev = evolve(op, boltzmann_density(op, v, p.beta(), a.xb), dt, steps);
      const DecayFit fit = decay_rate(ev.survival);
      fill_barrier_form(row, fit.rate, a, p);
      oracle = {{"x_left", op.x_left},   {"x_right", op.x_right},   {"n_cells", op.n_cells},
                {"dt", dt},              {"steps", steps},          {"fit_points", fit.points},
                {"fit_residual", fit.residual}, {"final_survival", ev.survival.S.back()}};
      break;
    }
    case Method::eom: {
      const VariationalState start =
          s.eom.initial.value_or(VariationalState{a.x0, 0.0, quasi_stationary_G(v, a.x0, p), 0.0});
      const Trajectory t = integrate_eom(start, v, p, s.eom.dt, s.eom.steps, s.eom.record_every);
      const std::string sv = job.run->sweep_value ? format_double(*job.run->sweep_value) : "";
      for (const TrajectorySample& x : t.samples) {
        trajectory += sv + "," + std::to_string(x.step) + "," + format_double(x.t) + "," +
                      format_double(x.state.x) + "," + format_double(x.state.p) + "," +
                      format_double(x.state.G) + "," + format_double(x.state.Pi) + "," +
                      format_double(x.energy) + "," + format_double(x.uncertainty) + "\n";
      }
      const VariationalState& f = t.samples.back().state;
      oracle = {{"samples", t.samples.size()},
                {"relative_energy_drift", t.relative_energy_drift()},
                {"final", {{"x", f.x}, {"p", f.p}, {"G", f.G}, {"Pi", f.Pi}}}};
      break;
    }
  }
  return oracle;
}

json params_json(const PhysParams& p) {
  return {{"mass", p.mass()}, {"gamma", p.gamma()}, {"beta", p.beta()}, {"hbar", p.hbar()}};
}

json potential_json(const PotentialSpec& p) {
  json j = {{"kind", std::string(to_string(p.kind))}};
  if (p.kind == Potential::Kind::polynomial) {
    j["coefficients"] = p.coefficients;
  } else {
    j["A"] = p.A;
    j["B"] = p.B;
  }
  return j;
}

PointOutcome run_point(const PointJob& job) {
  PointOutcome out;
  const ResolvedRun& r = *job.run;
  out.point = {{"index", job.index},
               {"sweep_value", optional_json(r.sweep_value)},
               {"params", params_json(r.params)},
               {"potential", potential_json(r.potential)},
               {"bracket", {r.bracket.lo, r.bracket.hi}},
               {"results", json::array()}};
  const auto record = [&](const std::string& method, const std::string& kind, const char* what) {
    out.errors.push_back({r.sweep_value, method, kind, what});
  };

  std::optional<Potential> v;
  StationaryAnalysis a;
  try {
    v = r.potential.build();
    a = find_stationary_points(*v, r.params.mass(), r.bracket);
  } catch (const Error& e) {
    record("analysis", dynamic_cast<const ArgumentError*>(&e) ? "config" : "numeric", e.what());
    out.validity_ok = false;
    return out;
  }
  out.point["analysis"] = {{"x0", a.x0},         {"xb", a.xb},         {"xm", optional_json(a.xm)},
                           {"barrier", a.barrier}, {"omega0", a.omega0}, {"omegab", a.omegab}};
  const ValidityReport vr = validity_report(a, r.params, job.scenario->validity);
  out.validity_ok = vr.all_ok();
  out.point["validity"] = {{"beta_barrier", vr.beta_barrier},
                           {"hbar_beta_omega0", vr.hbar_beta_omega0},
                           {"gamma_over_omegab", vr.gamma_over_omegab},
                           {"beta_barrier_ok", vr.beta_barrier_ok},
                           {"hbar_beta_omega0_ok", vr.hbar_beta_omega0_ok},
                           {"gamma_over_omegab_ok", vr.gamma_over_omegab_ok},
                           {"all_ok", vr.all_ok()}};

  for (Method m : *job.methods) {
    Row row;
    row.method = m;
    json result = {{"method", std::string(to_string(m))}};
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    try {
      result["oracle"] = run_method(m, job, *v, a, row, out.trajectory);
    } catch (const EstimationError& e) {
      ok = false;
      result["oracle"] = ensemble_json(e.partial());
      record(std::string(to_string(m)), "numeric", e.what());
    } catch (const ConfigError& e) {
      ok = false;
      record(std::string(to_string(m)), "config", e.what());
    } catch (const ArgumentError& e) {
      ok = false;
      record(std::string(to_string(m)), "config", e.what());
    } catch (const Error& e) {
      ok = false;
      record(std::string(to_string(m)), "numeric", e.what());
    }
    row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!ok) {
      result["failed"] = true;
      out.point["results"].push_back(result);
      continue;
    }
    result["rate"] = optional_json(row.rate);
    result["prefactor"] = optional_json(row.prefactor);
    result["exponent"] = optional_json(row.exponent);
    if (row.stderr_rate) result["stderr"] = *row.stderr_rate;
    if (job.timing) result["runtime_seconds"] = row.runtime;
    out.point["results"].push_back(result);
    out.rows.push_back(row);
  }
  return out;
}

std::string csv_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

std::vector<Method> methods_for(RunMode mode, const std::vector<Method>& requested) {
  std::vector<Method> out;
  for (Method m : requested) {
    bool keep = false;
    switch (mode) {
      case RunMode::rates: keep = is_analytic(m); break;
      case RunMode::simulate: keep = m == Method::mc || m == Method::quadrature; break;
      case RunMode::pde: keep = m == Method::pde; break;
      case RunMode::evolve: keep = m == Method::eom; break;
      case RunMode::sweep: keep = true; break;
      case RunMode::check: keep = false; break;
    }
    if (keep) out.push_back(m);
  }
  return out;
}

int RunReport::exit_code(bool strict) const {
  if (!errors.empty()) {
    const bool numeric = std::any_of(errors.begin(), errors.end(),
                                     [](const RunError& e) { return e.kind == "numeric"; });
    return numeric ? 3 : 2;
  }
  return strict && !validity_ok ? 4 : 0;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t point_seed(std::uint64_t master, std::size_t point) {
  // splitmix64 finaliser
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(point) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  const std::vector<ResolvedRun> runs = resolve_runs(scenario);
  const std::vector<Method> methods = methods_for(options.mode, scenario.methods);
  const std::uint64_t master = options.seed.value_or(scenario.seed);

  const unsigned workers = std::max(1u, options.workers);
  const auto outer = static_cast<unsigned>(std::min<std::size_t>(workers, runs.size()));
  const unsigned inner = std::max(1u, workers / outer);

  std::vector<PointOutcome> outcomes(runs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < runs.size(); i = next.fetch_add(1)) {
      outcomes[i] = run_point({&scenario, &runs[i], i, &methods, inner, master, options.timing});
    }
  };
  if (outer == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < outer; ++w) pool.emplace_back(worker);
  }

  RunReport report;
  report.csv = std::string(kCsvHeader) + "\n";
  json points = json::array();
  const std::string param = scenario.sweep ? scenario.sweep->param : "";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    PointOutcome& o = outcomes[i];
    const std::string sv = runs[i].sweep_value ? format_double(*runs[i].sweep_value) : "";
    for (const Row& row : o.rows) {
      report.csv += param + "," + sv + "," + std::string(to_string(row.method)) + "," +
                    csv_field(row.rate) + "," + csv_field(row.prefactor) + "," +
                    csv_field(row.exponent) + "," + csv_field(row.stderr_rate) + "," +
                    (options.timing ? format_double(row.runtime) : "") + "\n";
    }
    report.trajectory += o.trajectory;
    report.errors.insert(report.errors.end(), o.errors.begin(), o.errors.end());
    report.validity_ok = report.validity_ok && o.validity_ok;
    points.push_back(std::move(o.point));
  }
  if (!report.trajectory.empty()) {
    report.trajectory = "sweep_value,step,t,x,p,G,Pi,energy,uncertainty\n" + report.trajectory;
  }

  json errors = json::array();
  for (const RunError& e : report.errors) {
    errors.push_back({{"sweep_value", optional_json(e.sweep_value)},
                      {"method", e.method},
                      {"kind", e.kind},
                      {"message", e.message}});
  }
  report.json = {{"schema", 1},
                 {"scenario", json::parse(emit_scenario(scenario))},
                 {"seed", master},
                 {"sweep_param", param},
                 {"runs", std::move(points)},
                 {"validity_ok", report.validity_ok},
                 {"errors", std::move(errors)}};
  return report;
}

void write_report(const RunReport& report, const Scenario& scenario, const std::string& dir) {
  const std::filesystem::path root(dir.empty() ? "." : dir);
  std::filesystem::create_directories(root);
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream f(root / name, std::ios::binary);
    if (!f) throw ConfigError("output: cannot write " + (root / name).string());
    f << body;
  };
  write(scenario.output.json, report.json.dump(2) + "\n");
  write(scenario.output.csv, report.csv);
  if (!report.trajectory.empty()) write(scenario.output.trajectory, report.trajectory);
}

}  // namespace kramers
