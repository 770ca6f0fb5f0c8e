#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "accrete/cylinder.hpp"
#include "accrete/errors.hpp"
#include "accrete/material.hpp"
#include "accrete/rate.hpp"
#include "accrete/sphere.hpp"

namespace accrete {

enum class Problem { sphere, cylinder };

inline const char* to_string(Problem p) { return p == Problem::sphere ? "sphere" : "cylinder"; }

/// Shortest decimal form that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

/// Locale-independent strict parse; the whole token must be consumed.
inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Whitespace or comma separated tokens.
inline std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == ',') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

/// Parses `constant c`, `ramp a b`, `poly c0 c1 ...`, `table t:v t:v ...`
/// or a bare number.
inline RateFunction parse_rate(std::string_view text) {
  const auto tok = detail::tokens(text);
  if (tok.empty()) throw DomainError("empty rate expression");
  auto num = [](const std::string& s) {
    const auto x = parse_double(s);
    if (!x || !std::isfinite(*x)) throw DomainError("'" + s + "' is not a finite number");
    return *x;
  };
  const std::string& kind = tok[0];
  const std::size_t n = tok.size() - 1;
  if (tok.size() == 1 && parse_double(kind)) return RateFunction::constant(num(kind));
  if (kind == "constant") {
    if (n != 1) throw DomainError("constant takes one value");
    return RateFunction::constant(num(tok[1]));
  }
  if (kind == "ramp") {
    if (n != 2) throw DomainError("ramp takes two values (a b for a + b t)");
    return RateFunction::ramp(num(tok[1]), num(tok[2]));
  }
  if (kind == "poly") {
    if (n < 1) throw DomainError("poly needs at least one coefficient");
    std::vector<double> c;
    for (std::size_t i = 1; i < tok.size(); ++i) c.push_back(num(tok[i]));
    return RateFunction::poly(std::move(c));
  }
  if (kind == "table") {
    if (n < 1) throw DomainError("table needs at least one t:v point");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      const auto colon = tok[i].find(':');
      if (colon == std::string::npos) throw DomainError("table point '" + tok[i] + "' is not t:v");
      pts.emplace_back(num(tok[i].substr(0, colon)), num(tok[i].substr(colon + 1)));
    }
    return RateFunction::table(std::move(pts));
  }
  throw DomainError("unknown rate form '" + kind + "'");
}

inline std::string render_rate(const RateFunction& f) {
  return std::visit(
      [](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        std::string s;
        if constexpr (std::is_same_v<T, RateFunction::Constant>) {
          s = "constant " + format_double(g.c);
        } else if constexpr (std::is_same_v<T, RateFunction::Ramp>) {
          s = "ramp " + format_double(g.a) + " " + format_double(g.b);
        } else if constexpr (std::is_same_v<T, RateFunction::Poly>) {
          s = "poly";
          for (double c : g.coeffs) s += " " + format_double(c);
        } else {
          s = "table";
          for (const auto& [t, v] : g.points) s += " " + format_double(t) + ":" + format_double(v);
        }
        return s;
      },
      f.form());
}

enum class MaterialChoice { neo_hookean, mooney_rivlin, general };

struct MaterialSpec {
  MaterialChoice model = MaterialChoice::neo_hookean;
  double G = 1.0;
  double c1 = 0.5, c2 = 0.0;
  // dW/dI1 as a function of I1 and dW/dI2 as a function of I2
  std::optional<RateFunction> dW_dI1, dW_dI2;
  double rho = 1.0;

  MaterialModel build() const {
    switch (model) {
      case MaterialChoice::neo_hookean:
        return MaterialModel::neo_hookean(G);
      case MaterialChoice::mooney_rivlin:
        return MaterialModel::mooney_rivlin(c1, c2);
      case MaterialChoice::general: {
        const RateFunction w1 = dW_dI1.value_or(RateFunction::constant(0.0));
        const RateFunction w2 = dW_dI2.value_or(RateFunction::constant(0.0));
        return MaterialModel::general([w1](double I1, double) { return w1(I1); },
                                      [w2](double, double I2) { return w2(I2); });
      }
    }
    throw DomainError("unknown material model");
  }
};

struct NumericsSpec {
  double dt = 0.01;           // cylinder geometry step
  int n_cells = 128;          // grid solver resolution
  double cfl = 0.9;
  double quad_tol = 1e-12;    // units of G
  double root_tol = 1e-12;    // units of G
  int steps_per_unit = 1000;  // RK4 steps per unit time
  std::optional<double> transport_t0;  // sphere grid solver start time
  double det_tol = 1e-12;
  double stress_tol = 1e-10;  // units of G
  double invariant_tol = 1e-8;
  double linf_coefficient = 2.0;  // compare bound is this over n_cells
};

struct OutputSpec {
  std::vector<double> times;
  int radial_samples = 21;
  bool emit_stress = true;
  bool emit_tau = true;
};

/// Validated scenario. Lengths in m, times in s, moduli in Pa.
struct ScenarioConfig {
  Problem problem = Problem::sphere;
  double r0 = 1.0;
  std::optional<double> r1_initial;
  double R0 = 1.0, R1 = 2.0;
  RateFunction Z0dot = RateFunction::constant(-1.0);
  Ablation ablation = Ablation::none();
  RateFunction u_g = RateFunction::constant(0.1);
  RateFunction p_i = RateFunction::constant(0.0);
  MaterialSpec material;
  NumericsSpec numerics;
  OutputSpec outputs;

  double t_end() const {
    return outputs.times.empty() ? 0.0 : *std::max_element(outputs.times.begin(), outputs.times.end());
  }

  SphereScenario sphere() const {
    SphereScenario s;
    s.r0 = r0;
    s.Z0dot = Z0dot;
    s.ablation = ablation;
    s.rho = material.rho;
    s.mat = material.build();
    if (r1_initial) s.initial_body = InitialBody{*r1_initial};
    return s;
  }

  CylinderScenario cylinder() const {
    CylinderScenario s;
    s.R0 = R0;
    s.R1 = R1;
    s.u_g = u_g;
    s.p_i = p_i;
    s.rho = material.rho;
    s.mat = material.build();
    return s;
  }
};

namespace detail {

struct RawEntry {
  std::string value;
  int line;
};
using RawSection = std::map<std::string, RawEntry>;

inline const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"", {"problem"}},
      {"geometry", {"r0", "r1_initial", "R0", "R1"}},
      {"rates", {"Z0dot", "Z1dot", "u_g", "p_i"}},
      {"material", {"model", "G", "c1", "c2", "dW_dI1", "dW_dI2", "rho"}},
      {"numerics",
       {"dt", "n_cells", "cfl", "quad_tol", "root_tol", "steps_per_unit", "transport_t0",
        "det_tol", "stress_tol", "invariant_tol", "linf_coefficient"}},
      {"outputs", {"times", "radial_samples", "emit_stress", "emit_tau"}},
  };
  return k;
}

// Keys that only make sense for one problem.
inline std::optional<Problem> key_owner(const std::string& key) {
  static const std::map<std::string, Problem> owner = {
      {"r0", Problem::sphere},       {"r1_initial", Problem::sphere},
      {"Z0dot", Problem::sphere},    {"Z1dot", Problem::sphere},
      {"transport_t0", Problem::sphere},
      {"R0", Problem::cylinder},     {"R1", Problem::cylinder},
      {"u_g", Problem::cylinder},    {"p_i", Problem::cylinder},
      {"dt", Problem::cylinder},
  };
  const auto it = owner.find(key);
  if (it == owner.end()) return std::nullopt;
  return it->second;
}

// Reads typed values out of the raw sections and records every problem.
class Reader {
 public:
  Reader(std::map<std::string, RawSection>& raw, std::vector<std::string>& issues)
      : raw_(raw), issues_(issues) {}

  const RawEntry* find(const std::string& sec, const std::string& key) const {
    const auto s = raw_.find(sec);
    if (s == raw_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string where(const std::string& sec, const std::string& key) const {
    const RawEntry* e = find(sec, key);
    std::string w = sec.empty() ? key : sec + "." + key;
    if (e) w += " (line " + std::to_string(e->line) + ")";
    return w;
  }

  void number(const std::string& sec, const std::string& key, double& out, bool required = false) {
    const RawEntry* e = find(sec, key);
    if (!e) {
      if (required) issues_.push_back("missing required key " + where(sec, key));
      return;
    }
    const auto x = parse_double(trim(e->value));
    if (!x || !std::isfinite(*x))
      issues_.push_back(where(sec, key) + ": '" + e->value + "' is not a finite number");
    else
      out = *x;
  }

  void number(const std::string& sec, const std::string& key, std::optional<double>& out) {
    if (!find(sec, key)) return;
    double x = NAN;
    number(sec, key, x);
    if (!std::isnan(x)) out = x;
  }

  void integer(const std::string& sec, const std::string& key, int& out) {
    const RawEntry* e = find(sec, key);
    if (!e) return;
    const std::string_view s = trim(e->value);
    int x = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
      issues_.push_back(where(sec, key) + ": '" + e->value + "' is not an integer");
    else
      out = x;
  }

  void boolean(const std::string& sec, const std::string& key, bool& out) {
    const RawEntry* e = find(sec, key);
    if (!e) return;
    const std::string_view s = trim(e->value);
    if (s == "true" || s == "yes" || s == "1") out = true;
    else if (s == "false" || s == "no" || s == "0") out = false;
    else issues_.push_back(where(sec, key) + ": '" + e->value + "' is not a boolean");
  }

  void rate(const std::string& sec, const std::string& key, RateFunction& out, bool required) {
    const RawEntry* e = find(sec, key);
    if (!e) {
      if (required) issues_.push_back("missing required key " + where(sec, key));
      return;
    }
    try {
      out = parse_rate(e->value);
    } catch (const DomainError& err) {
      issues_.push_back(where(sec, key) + ": " + err.what());
    }
  }

  void rate(const std::string& sec, const std::string& key, std::optional<RateFunction>& out) {
    if (!find(sec, key)) return;
    RateFunction f;
    const std::size_t before = issues_.size();
    rate(sec, key, f, false);
    if (issues_.size() == before) out = f;
  }

  void list(const std::string& sec, const std::string& key, std::vector<double>& out) {
    const RawEntry* e = find(sec, key);
    if (!e) {
      issues_.push_back("missing required key " + where(sec, key));
      return;
    }
    out.clear();
    for (const auto& t : tokens(e->value)) {
      const auto x = parse_double(t);
      if (!x || !std::isfinite(*x)) {
        issues_.push_back(where(sec, key) + ": '" + t + "' is not a finite number");
        return;
      }
      out.push_back(*x);
    }
  }

 private:
  std::map<std::string, RawSection>& raw_;
  std::vector<std::string>& issues_;
};

inline void check_rate_sign(const RateFunction& f, double t_end, const std::string& name,
                            bool positive, std::vector<std::string>& issues) {
  const auto [lo, hi] = f.range_on(0.0, std::max(t_end, 0.0));
  if (positive && !(lo > 0.0))
    issues.push_back(name + " must be strictly positive on [0, t_end] (minimum " +
                     format_double(lo) + ")");
  if (!positive && !(hi < 0.0))
    issues.push_back(name + " must be strictly negative on [0, t_end] (maximum " +
                     format_double(hi) + ")");
}

}  // namespace detail

/// Parses and validates a scenario. Every problem found is reported in one
/// ConfigError.
inline ScenarioConfig parse_config(std::string_view text) {
  std::vector<std::string> issues;
  std::map<std::string, detail::RawSection> raw;
  raw[""];
  std::string section;
  std::set<std::string> seen_sections = {""};

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back("line " + std::to_string(line_no) + ": malformed section header");
        continue;
      }
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      if (!detail::known_keys().count(section) || section.empty())
        issues.push_back("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
      else if (!seen_sections.insert(section).second)
        issues.push_back("line " + std::to_string(line_no) + ": duplicate section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    const auto known = detail::known_keys().find(section);
    if (known == detail::known_keys().end()) continue;  // already reported
    const std::string qualified = section.empty() ? key : section + "." + key;
    if (!known->second.count(key)) {
      issues.push_back("line " + std::to_string(line_no) + ": unknown key " + qualified);
      continue;
    }
    if (!raw[section].emplace(key, detail::RawEntry{value, line_no}).second)
      issues.push_back("line " + std::to_string(line_no) + ": duplicate key " + qualified);
  }

  ScenarioConfig cfg;
  detail::Reader rd(raw, issues);

  bool problem_ok = false;
  if (const auto* e = rd.find("", "problem")) {
    if (e->value == "sphere") cfg.problem = Problem::sphere, problem_ok = true;
    else if (e->value == "cylinder") cfg.problem = Problem::cylinder, problem_ok = true;
    else issues.push_back("problem must be 'sphere' or 'cylinder', got '" + e->value + "'");
  } else {
    issues.push_back("missing required key problem");
  }

  for (const char* s : {"geometry", "rates", "material", "outputs"})
    if (!seen_sections.count(s)) issues.push_back(std::string("missing section [") + s + "]");

  if (problem_ok) {
    for (const auto& [sec, entries] : raw)
      for (const auto& [key, e] : entries) {
        const auto owner = detail::key_owner(key);
        if (owner && *owner != cfg.problem)
          issues.push_back("line " + std::to_string(e.line) + ": key " + sec + "." + key +
                           " does not apply to a " + to_string(cfg.problem) + " problem");
      }
  }
  const bool sphere = cfg.problem == Problem::sphere;

  // outputs first: t_end is needed to validate the rates
  rd.list("outputs", "times", cfg.outputs.times);
  rd.integer("outputs", "radial_samples", cfg.outputs.radial_samples);
  rd.boolean("outputs", "emit_stress", cfg.outputs.emit_stress);
  rd.boolean("outputs", "emit_tau", cfg.outputs.emit_tau);
  if (rd.find("outputs", "times")) {
    if (cfg.outputs.times.empty()) issues.push_back("outputs.times must list at least one time");
    for (double t : cfg.outputs.times)
      if (t < 0.0) issues.push_back("outputs.times must be non-negative, got " + format_double(t));
    std::sort(cfg.outputs.times.begin(), cfg.outputs.times.end());
    cfg.outputs.times.erase(std::unique(cfg.outputs.times.begin(), cfg.outputs.times.end()),
                            cfg.outputs.times.end());
  }
  if (cfg.outputs.radial_samples < 2) issues.push_back("outputs.radial_samples must be at least 2");
  const double t_end = cfg.t_end();

  if (problem_ok && sphere) {
    rd.number("geometry", "r0", cfg.r0, true);
    rd.number("geometry", "r1_initial", cfg.r1_initial);
    if (!(cfg.r0 > 0.0)) issues.push_back("geometry.r0 must be positive");
    if (cfg.r1_initial && !(*cfg.r1_initial > cfg.r0))
      issues.push_back("geometry.r1_initial must exceed r0");

    const std::size_t before = issues.size();
    rd.rate("rates", "Z0dot", cfg.Z0dot, true);
    if (issues.size() == before && rd.find("rates", "Z0dot"))
      detail::check_rate_sign(cfg.Z0dot, t_end, "rates.Z0dot", false, issues);
    if (const auto* e = rd.find("rates", "Z1dot")) {
      if (e->value == "none") {
        cfg.ablation = Ablation::none();
      } else if (e->value == "treadmill") {
        cfg.ablation = Ablation::treadmill();
        if (!cfg.r1_initial) issues.push_back("rates.Z1dot = treadmill needs geometry.r1_initial");
      } else {
        RateFunction f;
        const std::size_t b = issues.size();
        rd.rate("rates", "Z1dot", f, false);
        if (issues.size() == b) cfg.ablation = Ablation::rate(f);
      }
    }
  } else if (problem_ok) {
    rd.number("geometry", "R0", cfg.R0, true);
    rd.number("geometry", "R1", cfg.R1, true);
    if (!(cfg.R0 > 0.0)) issues.push_back("geometry.R0 must be positive");
    if (!(cfg.R1 > cfg.R0)) issues.push_back("geometry.R1 must exceed R0");

    std::size_t before = issues.size();
    rd.rate("rates", "u_g", cfg.u_g, true);
    if (issues.size() == before && rd.find("rates", "u_g"))
      detail::check_rate_sign(cfg.u_g, t_end, "rates.u_g", true, issues);
    before = issues.size();
    rd.rate("rates", "p_i", cfg.p_i, true);
    if (issues.size() == before && rd.find("rates", "p_i") && cfg.p_i(0.0) != 0.0)
      issues.push_back("rates.p_i: p_i(0) must be 0 (got " + format_double(cfg.p_i(0.0)) +
                       "); the tube starts unloaded");
  }

  MaterialSpec& m = cfg.material;
  if (const auto* e = rd.find("material", "model")) {
    if (e->value == "neo_hookean") m.model = MaterialChoice::neo_hookean;
    else if (e->value == "mooney_rivlin") m.model = MaterialChoice::mooney_rivlin;
    else if (e->value == "general") m.model = MaterialChoice::general;
    else issues.push_back("material.model must be neo_hookean, mooney_rivlin or general");
  }
  rd.number("material", "rho", m.rho);
  if (!(m.rho > 0.0)) issues.push_back("material.rho must be positive");
  auto forbid = [&](const char* key, const char* model) {
    if (rd.find("material", key))
      issues.push_back(std::string("material.") + key + " does not apply to model " + model);
  };
  switch (m.model) {
    case MaterialChoice::neo_hookean:
      rd.number("material", "G", m.G, true);
      if (!(m.G > 0.0)) issues.push_back("material.G must be positive");
      for (const char* k : {"c1", "c2", "dW_dI1", "dW_dI2"}) forbid(k, "neo_hookean");
      break;
    case MaterialChoice::mooney_rivlin:
      rd.number("material", "c1", m.c1, true);
      rd.number("material", "c2", m.c2, true);
      if (!(m.c1 + m.c2 > 0.0)) issues.push_back("material: c1 + c2 must be positive");
      for (const char* k : {"G", "dW_dI1", "dW_dI2"}) forbid(k, "mooney_rivlin");
      m.G = 2.0 * (m.c1 + m.c2);
      break;
    case MaterialChoice::general: {
      rd.rate("material", "dW_dI1", m.dW_dI1);
      rd.rate("material", "dW_dI2", m.dW_dI2);
      if (!rd.find("material", "dW_dI1") && !rd.find("material", "dW_dI2"))
        issues.push_back("material: general model needs dW_dI1 and/or dW_dI2");
      for (const char* k : {"G", "c1", "c2"}) forbid(k, "general");
      const double w = (m.dW_dI1 ? (*m.dW_dI1)(3.0) : 0.0) + (m.dW_dI2 ? (*m.dW_dI2)(3.0) : 0.0);
      m.G = 2.0 * w;
      if (!(m.G > 0.0)) issues.push_back("material: dW_dI1 + dW_dI2 at the identity must be positive");
      break;
    }
  }

  NumericsSpec& n = cfg.numerics;
  rd.number("numerics", "dt", n.dt);
  rd.integer("numerics", "n_cells", n.n_cells);
  rd.number("numerics", "cfl", n.cfl);
  rd.number("numerics", "quad_tol", n.quad_tol);
  rd.number("numerics", "root_tol", n.root_tol);
  rd.integer("numerics", "steps_per_unit", n.steps_per_unit);
  rd.number("numerics", "transport_t0", n.transport_t0);
  rd.number("numerics", "det_tol", n.det_tol);
  rd.number("numerics", "stress_tol", n.stress_tol);
  rd.number("numerics", "invariant_tol", n.invariant_tol);
  rd.number("numerics", "linf_coefficient", n.linf_coefficient);
  if (!(n.dt > 0.0)) issues.push_back("numerics.dt must be positive");
  if (n.n_cells < 8) issues.push_back("numerics.n_cells must be at least 8");
  if (!(n.cfl > 0.0 && n.cfl <= 0.9)) issues.push_back("numerics.cfl must lie in (0, 0.9]");
  const std::pair<const char*, double> positives[] = {
      {"quad_tol", n.quad_tol},   {"root_tol", n.root_tol},
      {"det_tol", n.det_tol},     {"stress_tol", n.stress_tol},
      {"invariant_tol", n.invariant_tol}, {"linf_coefficient", n.linf_coefficient}};
  for (const auto& [name, v] : positives)
    if (!(v > 0.0)) issues.push_back(std::string("numerics.") + name + " must be positive");
  if (n.steps_per_unit < 1) issues.push_back("numerics.steps_per_unit must be at least 1");
  if (n.transport_t0 && !(*n.transport_t0 >= 0.0 && *n.transport_t0 < t_end))
    issues.push_back("numerics.transport_t0 must lie in [0, t_end)");

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

/// Canonical text of a config: every key written explicitly, numbers in
/// shortest round-trip form.
inline std::string render_config(const ScenarioConfig& c) {
  std::ostringstream os;
  const bool sphere = c.problem == Problem::sphere;
  os << "problem = " << to_string(c.problem) << "\n\n[geometry]\n";
  if (sphere) {
    os << "r0 = " << format_double(c.r0) << "\n";
    if (c.r1_initial) os << "r1_initial = " << format_double(*c.r1_initial) << "\n";
  } else {
    os << "R0 = " << format_double(c.R0) << "\nR1 = " << format_double(c.R1) << "\n";
  }
  os << "\n[rates]\n";
  if (sphere) {
    os << "Z0dot = " << render_rate(c.Z0dot) << "\nZ1dot = ";
    switch (c.ablation.kind()) {
      case Ablation::Kind::none: os << "none"; break;
      case Ablation::Kind::treadmill: os << "treadmill"; break;
      case Ablation::Kind::rate: os << render_rate(c.ablation.rate_function()); break;
    }
    os << "\n";
  } else {
    os << "u_g = " << render_rate(c.u_g) << "\np_i = " << render_rate(c.p_i) << "\n";
  }
  const MaterialSpec& m = c.material;
  os << "\n[material]\n";
  switch (m.model) {
    case MaterialChoice::neo_hookean:
      os << "model = neo_hookean\nG = " << format_double(m.G) << "\n";
      break;
    case MaterialChoice::mooney_rivlin:
      os << "model = mooney_rivlin\nc1 = " << format_double(m.c1)
         << "\nc2 = " << format_double(m.c2) << "\n";
      break;
    case MaterialChoice::general:
      os << "model = general\n";
      if (m.dW_dI1) os << "dW_dI1 = " << render_rate(*m.dW_dI1) << "\n";
      if (m.dW_dI2) os << "dW_dI2 = " << render_rate(*m.dW_dI2) << "\n";
      break;
  }
  os << "rho = " << format_double(m.rho) << "\n";

  const NumericsSpec& n = c.numerics;
  os << "\n[numerics]\n";
  if (!sphere) os << "dt = " << format_double(n.dt) << "\n";
  os << "n_cells = " << n.n_cells << "\ncfl = " << format_double(n.cfl)
     << "\nquad_tol = " << format_double(n.quad_tol) << "\nroot_tol = " << format_double(n.root_tol)
     << "\nsteps_per_unit = " << n.steps_per_unit << "\n";
  if (sphere && n.transport_t0) os << "transport_t0 = " << format_double(*n.transport_t0) << "\n";
  os << "det_tol = " << format_double(n.det_tol) << "\nstress_tol = " << format_double(n.stress_tol)
     << "\ninvariant_tol = " << format_double(n.invariant_tol)
     << "\nlinf_coefficient = " << format_double(n.linf_coefficient) << "\n";

  os << "\n[outputs]\ntimes =";
  for (std::size_t i = 0; i < c.outputs.times.size(); ++i)
    os << (i ? ", " : " ") << format_double(c.outputs.times[i]);
  os << "\nradial_samples = " << c.outputs.radial_samples
     << "\nemit_stress = " << (c.outputs.emit_stress ? "true" : "false")
     << "\nemit_tau = " << (c.outputs.emit_tau ? "true" : "false") << "\n";
  return os.str();
}

// ---- result tables ----

enum class RegionTag { boundary, initial };

inline const char* to_string(RegionTag r) { return r == RegionTag::boundary ? "boundary" : "initial"; }

inline RegionTag region_tag(Origin o) {
  return o == Origin::inflowBoundary ? RegionTag::boundary : RegionTag::initial;
}

struct ResultRow {
  double t = 0.0;
  double r = 0.0;
  double F_rr = 1.0;
  double F_tt = 1.0;
  std::optional<double> F_pp;  // sphere only
  std::optional<double> sigma_rr, sigma_tt, sigma_pp, p;
  RegionTag region = RegionTag::boundary;
  std::optional<double> tau;  // attachment time of accreted material

  bool operator==(const ResultRow&) const = default;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  void sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
      return std::tie(a.t, a.r) < std::tie(b.t, b.r);
    });
  }
  bool operator==(const ResultTable&) const = default;
};

inline constexpr std::string_view kResultHeader =
    "t,r,F_rr,F_tt,F_pp,sigma_rr,sigma_tt,sigma_pp,p,region,tau";

/// Writes the table as CSV sorted by (t, r) and returns the byte count.
inline std::size_t write_results(const ResultTable& table, std::ostream& out) {
  std::vector<const ResultRow*> order;
  for (const auto& r : table.rows) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const ResultRow* a, const ResultRow* b) {
    return std::tie(a->t, a->r) < std::tie(b->t, b->r);
  });
  std::string buf(kResultHeader);
  buf += '\n';
  auto opt = [&buf](const std::optional<double>& x) {
    if (x) buf += format_double(*x);
    buf += ',';
  };
  for (const ResultRow* r : order) {
    buf += format_double(r->t) + ',' + format_double(r->r) + ',' + format_double(r->F_rr) + ',' +
           format_double(r->F_tt) + ',';
    opt(r->F_pp);
    opt(r->sigma_rr);
    opt(r->sigma_tt);
    opt(r->sigma_pp);
    opt(r->p);
    buf += to_string(r->region);
    buf += ',';
    if (r->tau) buf += format_double(*r->tau);
    buf += '\n';
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write_results: sink write failed");
  return buf.size();
}

inline ResultTable read_results(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kResultHeader)
    throw IoError("read_results: missing or unexpected header");
  ResultTable table;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = detail::trim(line);
    for (std::size_t c; (c = rest.find(',')) != std::string_view::npos; rest = rest.substr(c + 1))
      f.push_back(rest.substr(0, c));
    f.push_back(rest);
    const std::string at = "read_results line " + std::to_string(line_no);
    if (f.size() != 11) throw IoError(at + ": expected 11 fields");
    auto req = [&](std::string_view s) {
      const auto x = parse_double(s);
      if (!x) throw IoError(at + ": bad number '" + std::string(s) + "'");
      return *x;
    };
    auto opt = [&](std::string_view s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return req(s);
    };
    ResultRow r;
    r.t = req(f[0]);
    r.r = req(f[1]);
    r.F_rr = req(f[2]);
    r.F_tt = req(f[3]);
    r.F_pp = opt(f[4]);
    r.sigma_rr = opt(f[5]);
    r.sigma_tt = opt(f[6]);
    r.sigma_pp = opt(f[7]);
    r.p = opt(f[8]);
    if (f[9] == "boundary") r.region = RegionTag::boundary;
    else if (f[9] == "initial") r.region = RegionTag::initial;
    else throw IoError(at + ": unknown region '" + std::string(f[9]) + "'");
    r.tau = opt(f[10]);
    table.rows.push_back(r);
  }
  return table;
}

}  // namespace accrete
