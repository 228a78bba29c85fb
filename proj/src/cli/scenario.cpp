#include "kramers/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <json.hpp>
#include <limits>

#include "kramers/error.hpp"

namespace kramers {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<Method, std::string_view>, 9> kMethodNames{{
    {Method::classical, "classical"},
    {Method::sc_approx, "sc_approx"},
    {Method::sc_exact, "sc_exact"},
    {Method::qsmolu, "qsmolu"},
    {Method::doubled, "doubled"},
    {Method::mc, "mc"},
    {Method::quadrature, "quadrature"},
    {Method::pde, "pde"},
    {Method::eom, "eom"},
}};

constexpr std::array<std::string_view, 6> kSweepParams{"hbar", "beta", "gamma", "mass", "A", "B"};

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] != b[j - 1] ? 1 : 0)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::string nearest(std::string_view key, std::initializer_list<std::string_view> valid) {
  std::string_view best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (std::string_view v : valid) {
    const std::size_t d = edit_distance(key, v);
    if (d < best_d) {
      best_d = d;
      best = v;
    }
  }
  return std::string(best);
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<std::string_view> valid) {
  if (!obj.is_object()) fail(path.empty() ? "scenario" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(valid.begin(), valid.end(), key) == valid.end()) {
      fail(join(path, key), "unknown key (did you mean '" + nearest(key, valid) + "'?)");
    }
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    fail(path, "expected a non-negative integer");
  }
  return j.get<std::size_t>();
}

std::optional<double> opt_number(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  return number(*it, join(path, key));
}

double number_or(const json& obj, std::string_view key, const std::string& path, double fallback) {
  return opt_number(obj, key, path).value_or(fallback);
}

std::size_t count_or(const json& obj, std::string_view key, const std::string& path,
                     std::size_t fallback) {
  const auto it = obj.find(key);
  return it == obj.end() ? fallback : count(*it, join(path, key));
}

const json& required(const json& obj, std::string_view key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(join(path, key), "required");
  return *it;
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

PotentialSpec parse_potential(const json& j) {
  const std::string path = "potential";
  check_keys(j, path, {"kind", "A", "B", "coefficients"});
  const std::string kind = text(required(j, "kind", path), "potential.kind");
  PotentialSpec p;
  if (kind == "cubic" || kind == "double_well") {
    p.kind = kind == "cubic" ? Potential::Kind::cubic : Potential::Kind::double_well;
    if (j.contains("coefficients")) fail("potential.coefficients", "only valid for kind 'polynomial'");
    p.A = number(required(j, "A", path), "potential.A");
    p.B = number(required(j, "B", path), "potential.B");
    if (!(p.A > 0.0)) fail("potential.A", "must be > 0");
    if (!(p.B > 0.0)) fail("potential.B", "must be > 0");
  } else if (kind == "polynomial") {
    p.kind = Potential::Kind::polynomial;
    if (j.contains("A") || j.contains("B")) fail("potential", "A and B are not used by kind 'polynomial'");
    const json& c = required(j, "coefficients", path);
    if (!c.is_array() || c.empty()) fail("potential.coefficients", "expected a non-empty array");
    for (std::size_t i = 0; i < c.size(); ++i) {
      p.coefficients.push_back(number(c[i], "potential.coefficients[" + std::to_string(i) + "]"));
    }
    try {
      (void)p.build();
    } catch (const Error& e) {
      fail("potential.coefficients", e.what());
    }
  } else {
    fail("potential.kind", "unknown kind '" + kind + "' (did you mean '" +
                               nearest(kind, {"cubic", "double_well", "polynomial"}) + "'?)");
  }
  return p;
}

PhysParams parse_params(const json& j) {
  const std::string path = "params";
  check_keys(j, path, {"mass", "gamma", "beta", "hbar"});
  const double mass = number_or(j, "mass", path, 1.0);
  const double gamma = number(required(j, "gamma", path), "params.gamma");
  const double beta = number(required(j, "beta", path), "params.beta");
  const double hbar = number_or(j, "hbar", path, 0.0);
  try {
    return PhysParams(mass, gamma, beta, hbar);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

Interval parse_bracket(const json& j) {
  if (!j.is_array() || j.size() != 2) fail("bracket", "expected [lo, hi]");
  const Interval b{number(j[0], "bracket[0]"), number(j[1], "bracket[1]")};
  if (!(b.lo < b.hi)) fail("bracket", "lo must be < hi");
  return b;
}

std::vector<Method> parse_methods(const json& j) {
  if (!j.is_array() || j.empty()) fail("methods", "expected a non-empty array");
  std::vector<Method> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = "methods[" + std::to_string(i) + "]";
    const std::string name = text(j[i], path);
    const auto m = method_from_string(name);
    if (!m) {
      fail(path, "unknown method '" + name + "' (did you mean '" +
                     nearest(name, {"classical", "sc_approx", "sc_exact", "qsmolu", "doubled", "mc",
                                    "quadrature", "pde", "eom"}) +
                     "'?)");
    }
    if (std::find(out.begin(), out.end(), *m) != out.end()) fail(path, "duplicate method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

EscapeOverrides parse_escape(const json& j) {
  const std::string path = "escape";
  check_keys(j, path, {"x_init", "x_abs", "x_refl", "dt", "max_time", "n_traj"});
  EscapeOverrides e;
  e.x_init = opt_number(j, "x_init", path);
  e.x_abs = opt_number(j, "x_abs", path);
  e.x_refl = opt_number(j, "x_refl", path);
  e.dt = opt_number(j, "dt", path);
  e.max_time = opt_number(j, "max_time", path);
  e.n_traj = count_or(j, "n_traj", path, e.n_traj);
  return e;
}

PdeSettings parse_pde(const json& j) {
  const std::string path = "pde";
  check_keys(j, path, {"n_cells", "dt", "steps"});
  PdeSettings p;
  p.n_cells = count_or(j, "n_cells", path, p.n_cells);
  p.dt = opt_number(j, "dt", path);
  if (j.contains("steps")) p.steps = count(j["steps"], "pde.steps");
  return p;
}

EomSettings parse_eom(const json& j) {
  const std::string path = "eom";
  check_keys(j, path, {"dt", "steps", "record_every", "initial"});
  EomSettings e;
  e.dt = number_or(j, "dt", path, e.dt);
  if (!(e.dt > 0.0)) fail("eom.dt", "must be > 0");
  e.steps = count_or(j, "steps", path, e.steps);
  e.record_every = count_or(j, "record_every", path, e.record_every);
  if (e.record_every == 0) fail("eom.record_every", "must be >= 1");
  if (j.contains("initial")) {
    const json& s = j["initial"];
    check_keys(s, "eom.initial", {"x", "p", "G", "Pi"});
    VariationalState v;
    v.x = number(required(s, "x", "eom.initial"), "eom.initial.x");
    v.p = number_or(s, "p", "eom.initial", 0.0);
    v.G = number(required(s, "G", "eom.initial"), "eom.initial.G");
    v.Pi = number_or(s, "Pi", "eom.initial", 0.0);
    if (!(v.G > 0.0)) fail("eom.initial.G", "must be > 0");
    e.initial = v;
  }
  return e;
}

SweepSpec parse_sweep(const json& j) {
  check_keys(j, "sweep", {"param", "values"});
  SweepSpec s;
  s.param = text(required(j, "param", "sweep"), "sweep.param");
  if (std::find(kSweepParams.begin(), kSweepParams.end(), s.param) == kSweepParams.end()) {
    fail("sweep.param", "unknown parameter '" + s.param + "' (did you mean '" +
                            nearest(s.param, {"hbar", "beta", "gamma", "mass", "A", "B"}) + "'?)");
  }
  const json& v = required(j, "values", "sweep");
  if (!v.is_array() || v.empty()) fail("sweep.values", "expected a non-empty array");
  for (std::size_t i = 0; i < v.size(); ++i) {
    s.values.push_back(number(v[i], "sweep.values[" + std::to_string(i) + "]"));
  }
  return s;
}

OutputSpec parse_output(const json& j) {
  check_keys(j, "output", {"json", "csv", "trajectory"});
  OutputSpec o;
  if (j.contains("json")) o.json = text(j["json"], "output.json");
  if (j.contains("csv")) o.csv = text(j["csv"], "output.csv");
  if (j.contains("trajectory")) o.trajectory = text(j["trajectory"], "output.trajectory");
  return o;
}

ValidityThresholds parse_validity(const json& j) {
  const std::string path = "validity";
  check_keys(j, path, {"min_beta_barrier", "max_hbar_beta_omega0", "min_gamma_over_omegab"});
  ValidityThresholds v;
  v.min_beta_barrier = number_or(j, "min_beta_barrier", path, v.min_beta_barrier);
  v.max_hbar_beta_omega0 = number_or(j, "max_hbar_beta_omega0", path, v.max_hbar_beta_omega0);
  v.min_gamma_over_omegab = number_or(j, "min_gamma_over_omegab", path, v.min_gamma_over_omegab);
  return v;
}

template <class T>
void put_optional(json& j, std::string_view key, const std::optional<T>& v) {
  if (v) j[std::string(key)] = *v;
}

}  // namespace

std::string_view to_string(Method m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "unknown";
}

std::optional<Method> method_from_string(std::string_view name) {
  for (const auto& [method, n] : kMethodNames) {
    if (n == name) return method;
  }
  return std::nullopt;
}

bool is_analytic(Method m) {
  switch (m) {
    case Method::classical:
    case Method::sc_approx:
    case Method::sc_exact:
    case Method::qsmolu:
    case Method::doubled:
      return true;
    default:
      return false;
  }
}

Potential PotentialSpec::build() const {
  switch (kind) {
    case Potential::Kind::cubic:
      return Potential::cubic(A, B);
    case Potential::Kind::double_well:
      return Potential::double_well(A, B);
    case Potential::Kind::polynomial:
      break;
  }
  return Potential::polynomial(coefficients);
}

Interval default_bracket(const PotentialSpec& p) {
  switch (p.kind) {
    case Potential::Kind::cubic:
      return {-2.0 * p.A / (3.0 * p.B), 4.0 * p.A / (3.0 * p.B)};
    case Potential::Kind::double_well:
      return {-0.5 * p.B, 1.5 * p.B};
    case Potential::Kind::polynomial:
      break;
  }
  throw ConfigError("bracket: required for polynomial potentials");
}

Scenario parse_scenario(std::string_view text_in) {
  json doc;
  try {
    doc = json::parse(text_in.begin(), text_in.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: malformed document: ") + e.what());
  }
  check_keys(doc, "", {"schema", "potential", "params", "bracket", "methods", "escape", "pde",
                       "eom", "sweep", "output", "seed", "validity"});
  if (doc.contains("schema") && !(doc["schema"].is_number_integer() && doc["schema"].get<int>() == 1)) {
    fail("schema", "unsupported version (expected 1)");
  }
  Scenario s;
  s.potential = parse_potential(required(doc, "potential", ""));
  s.params = parse_params(required(doc, "params", ""));
  if (doc.contains("bracket")) s.bracket = parse_bracket(doc["bracket"]);
  s.methods = parse_methods(required(doc, "methods", ""));
  if (doc.contains("escape")) s.escape = parse_escape(doc["escape"]);
  if (doc.contains("pde")) s.pde = parse_pde(doc["pde"]);
  if (doc.contains("eom")) s.eom = parse_eom(doc["eom"]);
  if (doc.contains("sweep")) s.sweep = parse_sweep(doc["sweep"]);
  if (doc.contains("output")) s.output = parse_output(doc["output"]);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) fail("seed", "expected a non-negative integer");
    s.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("validity")) s.validity = parse_validity(doc["validity"]);
  (void)resolve_runs(s);
  return s;
}

std::string emit_scenario(const Scenario& s) {
  json doc;
  doc["schema"] = 1;
  json pot;
  pot["kind"] = std::string(to_string(s.potential.kind));
  if (s.potential.kind == Potential::Kind::polynomial) {
    pot["coefficients"] = s.potential.coefficients;
  } else {
    pot["A"] = s.potential.A;
    pot["B"] = s.potential.B;
  }
  doc["potential"] = pot;
  doc["params"] = {{"mass", s.params.mass()},
                   {"gamma", s.params.gamma()},
                   {"beta", s.params.beta()},
                   {"hbar", s.params.hbar()}};
  if (s.bracket) doc["bracket"] = {s.bracket->lo, s.bracket->hi};
  json methods = json::array();
  for (Method m : s.methods) methods.push_back(std::string(to_string(m)));
  doc["methods"] = methods;
  json esc = json::object();
  put_optional(esc, "x_init", s.escape.x_init);
  put_optional(esc, "x_abs", s.escape.x_abs);
  put_optional(esc, "x_refl", s.escape.x_refl);
  put_optional(esc, "dt", s.escape.dt);
  put_optional(esc, "max_time", s.escape.max_time);
  esc["n_traj"] = s.escape.n_traj;
  doc["escape"] = esc;
  json pde = {{"n_cells", s.pde.n_cells}};
  put_optional(pde, "dt", s.pde.dt);
  put_optional(pde, "steps", s.pde.steps);
  doc["pde"] = pde;
  json eom = {{"dt", s.eom.dt}, {"steps", s.eom.steps}, {"record_every", s.eom.record_every}};
  if (s.eom.initial) {
    const VariationalState& v = *s.eom.initial;
    eom["initial"] = {{"x", v.x}, {"p", v.p}, {"G", v.G}, {"Pi", v.Pi}};
  }
  doc["eom"] = eom;
  if (s.sweep) doc["sweep"] = {{"param", s.sweep->param}, {"values", s.sweep->values}};
  doc["output"] = {{"json", s.output.json}, {"csv", s.output.csv}, {"trajectory", s.output.trajectory}};
  doc["seed"] = s.seed;
  doc["validity"] = {{"min_beta_barrier", s.validity.min_beta_barrier},
                     {"max_hbar_beta_omega0", s.validity.max_hbar_beta_omega0},
                     {"min_gamma_over_omegab", s.validity.min_gamma_over_omegab}};
  return doc.dump(2) + "\n";
}

std::vector<ResolvedRun> resolve_runs(const Scenario& s) {
  const auto resolve = [&](std::optional<double> value, const std::string& path) {
    ResolvedRun r{value, s.potential, s.params, {}};
    if (value) {
      const std::string& name = s.sweep->param;
      const double x = *value;
      try {
        if (name == "hbar") r.params = s.params.with_hbar(x);
        if (name == "beta") r.params = s.params.with_beta(x);
        if (name == "gamma") r.params = s.params.with_gamma(x);
        if (name == "mass") r.params = PhysParams(x, s.params.gamma(), s.params.beta(), s.params.hbar());
      } catch (const Error& e) {
        fail(path, e.what());
      }
      if (name == "A" || name == "B") {
        if (s.potential.kind == Potential::Kind::polynomial) {
          fail("sweep.param", "'" + name + "' needs a cubic or double_well potential");
        }
        if (!(x > 0.0)) fail(path, "potential." + name + " must be > 0");
        (name == "A" ? r.potential.A : r.potential.B) = x;
      }
    }
    r.bracket = s.bracket ? *s.bracket : default_bracket(r.potential);
    return r;
  };
  std::vector<ResolvedRun> runs;
  if (!s.sweep) {
    runs.push_back(resolve(std::nullopt, ""));
    return runs;
  }
  for (std::size_t i = 0; i < s.sweep->values.size(); ++i) {
    runs.push_back(resolve(s.sweep->values[i], "sweep.values[" + std::to_string(i) + "]"));
  }
  return runs;
}

}  // namespace kramers
