#include "ottosim/manifest.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ottosim::cli {

using nlohmann::json;

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::adiabaticity: return "adiabaticity";
    case Experiment::equilibrate: return "equilibrate";
    case Experiment::engine: return "engine";
    case Experiment::benchmark: return "benchmark";
  }
  return "unknown";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::adiabaticity, Experiment::equilibrate, Experiment::engine, Experiment::benchmark}) {
    if (name == to_string(e)) return e;
  }
  return std::nullopt;
}

namespace {

// Reads typed fields out of one JSON object and rejects whatever it did not read.
class Fields {
 public:
  Fields(const json& object, std::string path) : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) fail("", "expected a JSON object");
  }

  bool has(const std::string& key) const { return object_.contains(key); }

  double number(const std::string& key) {
    const json& v = require(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = require(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const json& v = require(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const json& v = require(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "expected a non-empty array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    const json& v = require(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (const json& x : v) {
      if (!x.is_string()) fail(key, "expected a non-empty array of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }

  const json& require(const std::string& key) {
    if (!has(key)) fail(key, "missing required key");
    used_.insert(key);
    return object_.at(key);
  }

  // Marks the key read without interpreting it (for nested objects).
  const json& take(const std::string& key) { return require(key); }

  void finish() const {
    for (const auto& item : object_.items()) {
      if (!used_.count(item.key())) fail(item.key(), "unknown key");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(qualified(key) + ": " + what);
  }

  std::string qualified(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  void check(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

 private:
  const json& object_;
  std::string path_;
  std::set<std::string> used_;
};

std::string show(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

double positive(Fields& f, const std::string& key, double value) {
  f.check(value > 0.0, key, "must be > 0 (got " + show(value) + ")");
  return value;
}

int levels(Fields& f, const std::string& key, int fallback) {
  const int n = f.integer(key, fallback);
  f.check(n >= 2, key, "must be >= 2 (got " + std::to_string(n) + ")");
  return n;
}

EngineConfig read_engine(Fields& f, json& normalized) {
  EngineConfig c;
  c.omega = f.number("omega");
  f.check(c.omega > 1.0, "omega", "must be > 1 for an engine (got " + show(c.omega) + ")");
  c.tau_stroke = positive(f, "tau_stroke", f.number("tau_stroke"));
  c.tau_contact = positive(f, "tau_contact", f.number("tau_contact"));
  c.omega_T_hot = Temperature(positive(f, "omega_T_hot", f.number("omega_T_hot")));
  c.omega_T_cold = Temperature(positive(f, "omega_T_cold", f.number("omega_T_cold")));
  c.n_levels = levels(f, "n_levels", 41);
  c.coupling.phi0 = f.number("phi0", 1.0);
  c.coupling.sigma = positive(f, "sigma", f.number("sigma", 1.0));
  c.coupling.x0 = f.number("x0", 1.0);
  f.check(c.coupling.x0 >= 0.0, "x0", "must be >= 0");
  c.n_cycles = f.integer("n_cycles", 50);
  f.check(c.n_cycles >= 1, "n_cycles", "must be >= 1");
  c.step_divisor = positive(f, "step_divisor", f.number("step_divisor", 5.0));
  normalized = {{"omega", c.omega},
                {"tau_stroke", c.tau_stroke},
                {"tau_contact", c.tau_contact},
                {"omega_T_hot", c.omega_T_hot.omega_T()},
                {"omega_T_cold", c.omega_T_cold.omega_T()},
                {"n_levels", c.n_levels},
                {"phi0", c.coupling.phi0},
                {"sigma", c.coupling.sigma},
                {"x0", c.coupling.x0},
                {"n_cycles", c.n_cycles},
                {"step_divisor", c.step_divisor}};
  return c;
}

EquilibrateParameters read_equilibrate(Fields& f, json& normalized) {
  EquilibrateParameters p;
  BathSequenceConfig& c = p.sequence;
  c.alpha = f.number("alpha");
  f.check(c.alpha >= 0.0, "alpha", "must be >= 0 (got " + show(c.alpha) + ")");
  c.omega_T_gas_initial = Temperature(positive(f, "omega_T_gas", f.number("omega_T_gas")));
  c.omega_T_bath = Temperature(positive(f, "omega_T_bath", f.number("omega_T_bath")));
  c.n_levels = levels(f, "n_levels", 41);
  c.sigma = positive(f, "sigma", f.number("sigma", 1.0));
  c.x0 = f.number("x0", 1.0);
  f.check(c.x0 >= 0.0, "x0", "must be >= 0");
  if (f.has("segments")) {
    const json& list = f.take("segments");
    f.check(list.is_array() && !list.empty(), "segments", "expected a non-empty array");
    c.segments.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      Fields s(list[i], f.qualified("segments") + "[" + std::to_string(i) + "]");
      BathSegment seg{};
      seg.phi0 = s.number("phi0");
      seg.n_baths = s.integer("n_baths", 0);
      s.check(seg.n_baths >= 1, "n_baths", "must be an integer >= 1");
      seg.n_steps = s.integer("n_steps", 0);
      s.check(seg.n_steps >= 1, "n_steps", "must be an integer >= 1");
      seg.dtau = positive(s, "dtau", s.number("dtau"));
      s.finish();
      c.segments.push_back(seg);
    }
  }
  p.scan_min = positive(f, "scan_min", f.number("scan_min", p.scan_min));
  p.scan_max = f.number("scan_max", p.scan_max);
  f.check(p.scan_max >= p.scan_min, "scan_max", "must be >= scan_min");
  p.scan_step = positive(f, "scan_step", f.number("scan_step", p.scan_step));

  json segments = json::array();
  for (const BathSegment& s : c.segments) {
    segments.push_back({{"phi0", s.phi0}, {"n_baths", s.n_baths}, {"n_steps", s.n_steps}, {"dtau", s.dtau}});
  }
  normalized = {{"alpha", c.alpha},
                {"omega_T_gas", c.omega_T_gas_initial.omega_T()},
                {"omega_T_bath", c.omega_T_bath.omega_T()},
                {"n_levels", c.n_levels},
                {"sigma", c.sigma},
                {"x0", c.x0},
                {"segments", segments},
                {"scan_min", p.scan_min},
                {"scan_max", p.scan_max},
                {"scan_step", p.scan_step}};
  return p;
}

AdiabaticityGrid read_adiabaticity(Fields& f, json& normalized) {
  AdiabaticityGrid g = AdiabaticityGrid::defaults();
  g.omegas = f.numbers("omegas", g.omegas);
  for (double w : g.omegas) f.check(w >= 1.0, "omegas", "every omega must be >= 1 (got " + show(w) + ")");
  g.tau_alphas = f.numbers("tau_alphas", g.tau_alphas);
  for (double t : g.tau_alphas) f.check(t > 0.0, "tau_alphas", "every tau_alpha must be > 0");
  g.omega_Ts = f.numbers("omega_Ts", g.omega_Ts);
  for (double t : g.omega_Ts) f.check(t > 0.0, "omega_Ts", "every omega_T must be > 0 (got " + show(t) + ")");
  if (f.has("directions")) {
    g.directions.clear();
    for (const std::string& d : f.strings("directions")) {
      if (d == "compression") {
        g.directions.push_back(StrokeDirection::compression);
      } else if (d == "expansion") {
        g.directions.push_back(StrokeDirection::expansion);
      } else {
        f.fail("directions", "unknown direction '" + d + "'");
      }
    }
  }
  g.n_levels = levels(f, "n_levels", g.n_levels);
  g.step_divisor = positive(f, "step_divisor", f.number("step_divisor", g.step_divisor));
  json directions = json::array();
  for (StrokeDirection d : g.directions) directions.push_back(to_string(d));
  normalized = {{"omegas", g.omegas},         {"tau_alphas", g.tau_alphas}, {"omega_Ts", g.omega_Ts},
                {"directions", directions},   {"n_levels", g.n_levels},     {"step_divisor", g.step_divisor}};
  return g;
}

BenchmarkConfig read_benchmark(Fields& f, json& normalized) {
  BenchmarkConfig c;
  c.n_levels = levels(f, "n_levels", c.n_levels);
  c.omega_T = Temperature(positive(f, "omega_T", f.number("omega_T", c.omega_T.omega_T())));
  c.alpha_targets = f.numbers("alpha_targets", c.alpha_targets);
  for (double a : c.alpha_targets) f.check(a >= 0.0, "alpha_targets", "every alpha must be >= 0");
  c.tau_final = positive(f, "tau_final", f.number("tau_final", c.tau_final));
  c.divisors = f.numbers("divisors", c.divisors);
  for (double d : c.divisors) f.check(d > 0.0, "divisors", "every divisor must be > 0");
  const auto [lo, hi] = std::minmax_element(c.divisors.begin(), c.divisors.end());
  f.check(*lo <= 3.0 && *hi >= 16.0, "divisors", "must span at least [3, 16]");
  if (f.has("modes")) {
    c.modes.clear();
    for (const std::string& m : f.strings("modes")) {
      if (m == "fixed") {
        c.modes.push_back(BenchmarkMode::fixed);
      } else if (m == "ramp") {
        c.modes.push_back(BenchmarkMode::ramp);
      } else {
        f.fail("modes", "unknown mode '" + m + "'");
      }
    }
  }
  json modes = json::array();
  for (BenchmarkMode m : c.modes) modes.push_back(to_string(m));
  normalized = {{"n_levels", c.n_levels},   {"omega_T", c.omega_T.omega_T()}, {"alpha_targets", c.alpha_targets},
                {"tau_final", c.tau_final}, {"divisors", c.divisors},         {"modes", modes}};
  return c;
}

}  // namespace

RunManifest parse_manifest_text(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  Fields top(root, "");
  const std::string name = top.string("experiment");
  const std::optional<Experiment> experiment = parse_experiment(name);
  if (!experiment) top.fail("experiment", "unknown experiment '" + name + "'");

  RunManifest manifest{*experiment, EngineConfig{}, json::object(), std::nullopt};
  if (top.has("output_dir")) manifest.output_dir = top.string("output_dir");

  Fields params(top.take("parameters"), "parameters");
  switch (*experiment) {
    case Experiment::engine: manifest.parameters = read_engine(params, manifest.normalized); break;
    case Experiment::equilibrate: manifest.parameters = read_equilibrate(params, manifest.normalized); break;
    case Experiment::adiabaticity: manifest.parameters = read_adiabaticity(params, manifest.normalized); break;
    case Experiment::benchmark: manifest.parameters = read_benchmark(params, manifest.normalized); break;
  }
  params.finish();
  top.finish();
  return manifest;
}

RunManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest_text(buffer.str());
}

}  // namespace ottosim::cli
