#include "fbve/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "fbve/errors.hpp"

namespace fbve::io {

using nlohmann::json;

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t k = 0; k < n; ++k) {
    h ^= p[k];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s[k] == '"') in_str = !in_str;
    if (s[k] == '#' && !in_str) return s.substr(0, k);
  }
  return s;
}

double parse_number(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double x = 0.0;
  in >> x;
  if (in.fail() || !in.eof()) throw ConfigError(where + ": expected a number, got '" + text + "'");
  return x;
}

json parse_value(const std::string& raw, const std::string& where) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError(where + ": missing value");
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError(where + ": unterminated string");
    return v.substr(1, v.size() - 2);
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError(where + ": unterminated array");
    json arr = json::array();
    std::stringstream items(v.substr(1, v.size() - 2));
    std::string item;
    while (std::getline(items, item, ',')) {
      item = trim(item);
      if (!item.empty()) arr.push_back(parse_number(item, where));
    }
    return arr;
  }
  return parse_number(v, where);
}

json parse_toml(const std::string& text) {
  json doc = json::object();
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (doc.contains(section)) throw ConfigError(where + ": duplicate section [" + section + "]");
      doc[section] = json::object();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    const std::string key = trim(line.substr(0, eq));
    if (doc[section].contains(key)) throw ConfigError(section + "." + key + ": duplicate key");
    doc[section][key] = parse_value(line.substr(eq + 1), section + "." + key);
  }
  return doc;
}

/// Reads typed keys out of one section and rejects anything left over.
class SectionReader {
 public:
  SectionReader(const json& doc, const std::string& name) : name_(name) {
    if (doc.contains(name)) obj_ = doc.at(name);
  }

  void num(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "must be a number");
      out = v->get<double>();
    }
  }
  void integer(const std::string& key, int& out) {
    double x = out;
    num(key, x);
    if (x != std::floor(x) || std::abs(x) > 2e9) fail(key, "must be an integer");
    out = static_cast<int>(x);
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
        return;
      }
      if (!v->is_number()) fail(key, "must be a non-negative integer");
      const double x = v->get<double>();
      if (x < 0.0 || x != std::floor(x) || x >= 9.007199254740992e15)
        fail(key, "must be a non-negative integer");
      out = static_cast<std::uint64_t>(x);
    }
  }
  void boolean(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "must be true or false");
      out = v->get<bool>();
    }
  }
  void str(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "must be a string");
      out = v->get<std::string>();
    }
  }
  void nums(const std::string& key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "must be an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(key, "must be an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }
  void ints(const std::string& key, std::vector<int>& out) {
    std::vector<double> xs(out.begin(), out.end());
    nums(key, xs);
    out.clear();
    for (double x : xs) {
      if (x != std::floor(x) || std::abs(x) > 2e9) fail(key, "must be an array of integers");
      out.push_back(static_cast<int>(x));
    }
  }
  bool has(const std::string& key) const { return obj_.contains(key); }

  void finish() const {
    for (const auto& [k, v] : obj_.items())
      if (!seen_.count(k)) throw ConfigError(name_ + "." + k + ": unknown key");
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(name_ + "." + key + ": " + what);
  }

 private:
  const json* take(const std::string& key) {
    seen_[key] = true;
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string name_;
  json obj_ = json::object();
  std::map<std::string, bool> seen_;
};

const char* integrator_name(Integrator k) { return k == Integrator::rk4 ? "rk4" : "euler"; }

Config from_document(const json& doc) {
  static const char* kSections[] = {"grid", "material", "run", "experiment", "diagnostics"};
  for (const auto& [k, v] : doc.items()) {
    bool known = false;
    for (const char* s : kSections) known = known || k == s;
    if (!known) throw ConfigError("[" + k + "]: unknown section");
  }
  if (!doc.contains("grid")) throw ConfigError("[grid]: section is required");

  Config c;
  {
    SectionReader r(doc, "grid");
    if (!r.has("n1") || !r.has("n2")) throw ConfigError("grid: n1 and n2 are required");
    int n1 = 0, n2 = 0;
    r.integer("n1", n1);
    r.integer("n2", n2);
    r.finish();
    try {
      c.run.grid = Grid(n1, n2);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("grid: ") + e.what());
    }
  }
  {
    SectionReader r(doc, "material");
    auto& p = c.params;
    r.num("gamma", p.gamma);
    r.num("A_pressure", p.A_pressure);
    r.num("mu", p.mu);
    r.num("lambda", p.lambda);
    r.num("epsilon", p.epsilon);
    r.num("sigma", p.sigma);
    r.num("p_e", p.p_e);
    r.num("c0", p.c0);
    r.num("C0", p.C0);
    r.num("rho0", c.rho0_value);
    r.boolean("elastic", p.elastic);
    r.finish();
  }
  {
    SectionReader r(doc, "run");
    r.num("t_end", c.run.t_end);
    r.num("cfl", c.run.cfl);
    std::string integ = integrator_name(c.run.integrator);
    r.str("integrator", integ);
    if (integ == "rk4")
      c.run.integrator = Integrator::rk4;
    else if (integ == "euler")
      c.run.integrator = Integrator::euler;
    else
      r.fail("integrator", "must be \"rk4\" or \"euler\"");
    r.num("dt", c.run.dt);
    r.integer("output_every", c.run.output_every);
    r.integer("history_depth", c.run.history_depth);
    r.num("j_floor", c.run.j_floor);
    r.num("piola_tolerance", c.run.piola_tolerance);
    std::string initial = c.equilibrium_initial ? "equilibrium" : "perturbed";
    r.str("initial", initial);
    if (initial == "equilibrium")
      c.equilibrium_initial = true;
    else if (initial == "perturbed")
      c.equilibrium_initial = false;
    else
      r.fail("initial", "must be \"equilibrium\" or \"perturbed\"");
    r.num("amplitude", c.perturbation.amplitude);
    r.num("interior", c.perturbation.interior);
    r.integer("mode", c.perturbation.mode);
    r.u64("seed", c.perturbation.seed);
    r.finish();
  }
  {
    SectionReader r(doc, "experiment");
    auto& e = c.experiment;
    r.nums("epsilons", e.epsilons);
    r.integer("threads", e.threads);
    r.num("layer_delta", e.layer_delta);
    r.num("r_bound", e.r_bound);
    r.num("alpha_min", e.alpha_min);
    r.num("r2_min", e.r2_min);
    r.num("noise_floor", e.noise_floor);
    r.boolean("ablation", e.ablation);
    r.ints("mms_n1", e.mms_n1);
    r.num("mms_t_end", e.mms_t_end);
    r.num("mms_amplitude", e.mms_amplitude);
    r.num("mms_omega", e.mms_omega);
    r.boolean("mms_discrete", e.mms_discrete);
    r.num("order_min", e.order_min);
    r.num("order_max", e.order_max);
    r.finish();
    if (e.threads < 1) r.fail("threads", "must be at least 1");
    if (!(e.layer_delta > 0.0 && e.layer_delta < 0.25)) r.fail("layer_delta", "must lie in (0, 1/4)");
    if (!(e.r_bound > 0.0)) r.fail("r_bound", "must be positive");
    if (e.epsilons.empty() || e.epsilons.back() != 0.0) r.fail("epsilons", "must end with 0");
    for (std::size_t k = 1; k < e.epsilons.size(); ++k)
      if (!(e.epsilons[k] < e.epsilons[k - 1])) r.fail("epsilons", "must be strictly decreasing");
  }
  {
    SectionReader r(doc, "diagnostics");
    r.integer("m_diag", c.diagnostics.m_diag);
    r.integer("every", c.diagnostics.every);
    r.num("trace_ratio_limit", c.monitors.trace_ratio);
    r.num("korn_ratio_limit", c.monitors.korn_ratio);
    r.finish();
    if (c.diagnostics.m_diag < 1 || c.diagnostics.m_diag > 3) r.fail("m_diag", "must be 1, 2 or 3");
    if (c.diagnostics.every < 1) r.fail("every", "must be at least 1");
  }

  c.params.rho0 = ScalarField(c.run.grid, c.rho0_value);
  c.run.validate();
  c.params.validate();
  if (c.perturbation.mode < 1) throw ConfigError("run.mode: must be at least 1");
  if (!(c.perturbation.amplitude >= 0.0)) throw ConfigError("run.amplitude: must be non-negative");
  return c;
}

json to_document(const Config& c) {
  json doc;
  doc["grid"] = {{"n1", c.run.grid.n1}, {"n2", c.run.grid.n2}};
  const auto& p = c.params;
  doc["material"] = {{"gamma", p.gamma},     {"A_pressure", p.A_pressure}, {"mu", p.mu},
                     {"lambda", p.lambda},   {"epsilon", p.epsilon},       {"sigma", p.sigma},
                     {"p_e", p.p_e},         {"c0", p.c0},                 {"C0", p.C0},
                     {"rho0", c.rho0_value}, {"elastic", p.elastic}};
  doc["run"] = {{"t_end", c.run.t_end},
                {"cfl", c.run.cfl},
                {"integrator", integrator_name(c.run.integrator)},
                {"dt", c.run.dt},
                {"output_every", c.run.output_every},
                {"history_depth", c.run.history_depth},
                {"j_floor", c.run.j_floor},
                {"piola_tolerance", c.run.piola_tolerance},
                {"initial", c.equilibrium_initial ? "equilibrium" : "perturbed"},
                {"amplitude", c.perturbation.amplitude},
                {"interior", c.perturbation.interior},
                {"mode", c.perturbation.mode},
                {"seed", c.perturbation.seed}};
  const auto& e = c.experiment;
  doc["experiment"] = {{"epsilons", e.epsilons},
                       {"threads", e.threads},
                       {"layer_delta", e.layer_delta},
                       {"r_bound", e.r_bound},
                       {"alpha_min", e.alpha_min},
                       {"r2_min", e.r2_min},
                       {"noise_floor", e.noise_floor},
                       {"ablation", e.ablation},
                       {"mms_n1", e.mms_n1},
                       {"mms_t_end", e.mms_t_end},
                       {"mms_amplitude", e.mms_amplitude},
                       {"mms_omega", e.mms_omega},
                       {"mms_discrete", e.mms_discrete},
                       {"order_min", e.order_min},
                       {"order_max", e.order_max}};
  doc["diagnostics"] = {{"m_diag", c.diagnostics.m_diag},
                        {"every", c.diagnostics.every},
                        {"trace_ratio_limit", c.monitors.trace_ratio},
                        {"korn_ratio_limit", c.monitors.korn_ratio}};
  return doc;
}

std::string toml_scalar(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return "\"" + v.get<std::string>() + "\"";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
  return buf;
}

}  // namespace

std::string Config::to_json() const { return to_document(*this).dump(); }

std::string Config::to_toml() const {
  const json doc = to_document(*this);
  std::string out;
  for (const char* s : {"grid", "material", "run", "experiment", "diagnostics"}) {
    out += std::string("[") + s + "]\n";
    for (const auto& [k, v] : doc.at(s).items()) {
      out += k + " = ";
      if (v.is_array()) {
        out += "[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + toml_scalar(v[i]);
        out += "]";
      } else {
        out += toml_scalar(v);
      }
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

std::uint64_t Config::hash() const {
  const std::string j = to_json();
  return fnv1a64(j.data(), j.size());
}

experiments::SweepConfig Config::sweep_config() const {
  experiments::SweepConfig s;
  s.run = run;
  s.params = params;
  s.perturbation = perturbation;
  s.epsilons = experiment.epsilons;
  s.equilibrium_initial = equilibrium_initial;
  s.threads = experiment.threads;
  s.m_diag = diagnostics.m_diag;
  s.diag_every = diagnostics.every;
  s.layer_delta = experiment.layer_delta;
  s.r_bound = experiment.r_bound;
  s.noise_floor = experiment.noise_floor;
  return s;
}

experiments::MmsConfig Config::mms_config() const {
  experiments::MmsConfig m;
  m.params = params;
  m.t_end = experiment.mms_t_end;
  m.cfl = run.cfl;
  m.amplitude = experiment.mms_amplitude;
  m.omega = experiment.mms_omega;
  m.discrete = experiment.mms_discrete;
  m.n1 = experiment.mms_n1;
  m.threads = experiment.threads;
  return m;
}

FlowState Config::initial_state() const {
  return equilibrium_initial ? initial_data::equilibrium(run.grid)
                             : initial_data::well_prepared(run.grid, params, perturbation);
}

Config parse_config_text(const std::string& text) { return from_document(parse_toml(text)); }

Config parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

Config config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("embedded config: ") + e.what());
  }
  return from_document(doc);
}

}  // namespace fbve::io
