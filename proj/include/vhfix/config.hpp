#pragma once

/* Line-oriented configuration:
 *
 *   # comment (quote-aware)
 *   [problem]
 *   f = "sin(t)+ln(1+x)+ln(1+y)"
 *   L = 10
 *
 * Sections: [problem] f g a b L x_min, [comparison] psi phi_big phi_density
 * preset, [solver] grid_n tol max_iter mode initial bracket_radius,
 * [mnc] ensemble_size steps hull_count seed tail_fraction.
 *
 * Values are numbers or double-quoted expression strings. Unknown sections
 * and keys are hard errors; duplicate keys report both lines; expressions
 * are parsed eagerly against the key's declared variable set. The preset
 * key expands a named parameter set; explicitly written keys win over it.
 */

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vhfix/comparison.hpp"
#include "vhfix/expr.hpp"
#include "vhfix/mnc.hpp"
#include "vhfix/problem.hpp"
#include "vhfix/solver.hpp"

namespace vhfix {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Config {
  std::optional<Expr> f, g, a, b;
  double length = 10.0;
  double x_min = 0.0;

  ComparisonTriple triple = preset_triple("aghajani");
  std::string preset;

  SolverConfig solver;

  int ensemble_size = kDefaultEnsembleSize;
  int steps = kDefaultDarboSteps;
  int hull_count = 0;  // 0 = automatic (4x ensemble size)
  std::uint64_t seed = kDefaultSeed;
  double tail_fraction = kDefaultTailFraction;

  bool has_problem() const { return f && g && a && b; }

  int resolved_hull_count() const { return hull_count > 0 ? hull_count : 4 * ensemble_size; }

  IntegralProblem problem() const {
    if (!has_problem())
      throw ConfigError("problem required: set f, g, a and b in [problem] (or a preset)");
    IntegralProblem p;
    p.f = *f;
    p.g = *g;
    p.a = *a;
    p.b = *b;
    p.horizon = length;
    p.triple = triple;
    p.x_min = x_min;
    return p;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

struct ConfigEntry {
  std::string value;
  int line = 0;
  bool quoted = false;
};

inline std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

}  // namespace detail

inline Config parse_config(std::string_view text) {
  static const std::map<std::string, int> kSections = {
      {"problem", 0}, {"comparison", 0}, {"solver", 0}, {"mnc", 0}};
  static const std::map<std::string, int> kKeys = {
      {"problem.f", 0},        {"problem.g", 0},          {"problem.a", 0},
      {"problem.b", 0},        {"problem.L", 0},          {"problem.x_min", 0},
      {"comparison.psi", 0},   {"comparison.phi_big", 0}, {"comparison.phi_density", 0},
      {"comparison.preset", 0},
      {"solver.grid_n", 0},    {"solver.tol", 0},         {"solver.max_iter", 0},
      {"solver.mode", 0},      {"solver.initial", 0},     {"solver.bracket_radius", 0},
      {"mnc.ensemble_size", 0}, {"mnc.steps", 0},         {"mnc.hull_count", 0},
      {"mnc.seed", 0},         {"mnc.tail_fraction", 0}};

  std::map<std::string, detail::ConfigEntry> entries;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string stripped;
    bool in_quote = false;
    for (char c : raw) {
      if (c == '"') in_quote = !in_quote;
      if (c == '#' && !in_quote) break;
      stripped += c;
    }
    std::string line = detail::trim(stripped);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ConfigError(detail::at_line(lineno) + "malformed section header '" + line + "'");
      section = detail::trim(line.substr(1, line.size() - 2));
      if (!kSections.count(section))
        throw ConfigError(detail::at_line(lineno) + "unknown section [" + section + "]");
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(detail::at_line(lineno) + "expected 'key = value', got '" + line + "'");
    if (section.empty())
      throw ConfigError(detail::at_line(lineno) + "key outside any [section]");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(detail::at_line(lineno) + "empty key");
    if (value.empty()) throw ConfigError(detail::at_line(lineno) + "empty value for '" + key + "'");
    bool quoted = false;
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw ConfigError(detail::at_line(lineno) + "unterminated string for '" + key + "'");
      value = value.substr(1, value.size() - 2);
      if (value.find('"') != std::string::npos)
        throw ConfigError(detail::at_line(lineno) + "stray quote inside value for '" + key + "'");
      quoted = true;
    } else if (value.find('"') != std::string::npos) {
      throw ConfigError(detail::at_line(lineno) + "misplaced quote in value for '" + key + "'");
    }
    std::string id = section + "." + key;
    if (!kKeys.count(id))
      throw ConfigError(detail::at_line(lineno) + "unknown key '" + key + "' in [" + section + "]");
    auto [it, inserted] = entries.emplace(id, detail::ConfigEntry{value, lineno, quoted});
    if (!inserted)
      throw ConfigError(detail::at_line(lineno) + "duplicate key '" + key + "' in [" + section +
                        "] (first set at line " + std::to_string(it->second.line) + ")");
  }

  auto find = [&](const std::string& id) -> const detail::ConfigEntry* {
    auto it = entries.find(id);
    return it == entries.end() ? nullptr : &it->second;
  };

  auto expr_value = [&](const std::string& id,
                        std::span<const std::string_view> vars) -> std::optional<Expr> {
    const detail::ConfigEntry* e = find(id);
    if (!e) return std::nullopt;
    if (!e->quoted)
      throw ConfigError(detail::at_line(e->line) + "'" + id + "' needs a double-quoted expression");
    try {
      Expr ex = parse_expr(e->value);
      ex.compile(vars);
      return ex;
    } catch (const ParseError& pe) {
      throw ConfigError(detail::at_line(e->line) + "in '" + id + "': " + pe.what());
    } catch (const EvalError& ee) {
      throw ConfigError(detail::at_line(e->line) + "in '" + id + "': " + ee.what());
    }
  };

  auto num_value = [&](const std::string& id) -> std::optional<double> {
    const detail::ConfigEntry* e = find(id);
    if (!e) return std::nullopt;
    if (e->quoted)
      throw ConfigError(detail::at_line(e->line) + "'" + id + "' needs a number, not a string");
    const char* begin = e->value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + e->value.size() || !std::isfinite(v))
      throw ConfigError(detail::at_line(e->line) + "'" + id + "' is not a number: '" + e->value +
                        "'");
    return v;
  };

  auto int_value = [&](const std::string& id) -> std::optional<long long> {
    std::optional<double> v = num_value(id);
    if (!v) return std::nullopt;
    long long i = static_cast<long long>(std::llround(*v));
    if (static_cast<double>(i) != *v)
      throw ConfigError(detail::at_line(find(id)->line) + "'" + id + "' must be an integer");
    return i;
  };

  auto string_value = [&](const std::string& id) -> std::optional<std::string> {
    const detail::ConfigEntry* e = find(id);
    if (!e) return std::nullopt;
    if (!e->quoted)
      throw ConfigError(detail::at_line(e->line) + "'" + id + "' needs a double-quoted string");
    return e->value;
  };

  auto bound_check = [&](const std::string& id, bool ok, const std::string& what) {
    if (!ok) throw ConfigError(detail::at_line(find(id)->line) + "'" + id + "' " + what);
  };

  Config cfg;

  if (std::optional<std::string> preset = string_value("comparison.preset")) {
    cfg.preset = *preset;
    try {
      cfg.triple = preset_triple(cfg.preset);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(detail::at_line(find("comparison.preset")->line) + ex.what());
    }
    if (cfg.preset == "example32") {
      // The bundled worked instance: a damped oscillatory forcing with
      // logarithmic couplings and a Gaussian-decay factored kernel.
      cfg.f = parse_expr("sin(t)+ln(1+x)+ln(1+y)");
      cfg.g = parse_expr("(1/(t^2+1))*exp(0-s^2)*cos(x)");
      cfg.a = parse_expr("1/(t^2+1)");
      cfg.b = parse_expr("exp(0-s^2)");
    }
  }

  bool triple_overridden = false;
  if (std::optional<Expr> e = expr_value("comparison.psi", detail::kUVar)) {
    cfg.triple.psi = std::move(*e);
    triple_overridden = true;
  }
  if (std::optional<Expr> e = expr_value("comparison.phi_big", detail::kUVar)) {
    cfg.triple.phi_big = std::move(*e);
    triple_overridden = true;
  }
  if (std::optional<Expr> e = expr_value("comparison.phi_density", detail::kGammaVar)) {
    cfg.triple.phi_density = std::move(*e);
    triple_overridden = true;
  }
  if (triple_overridden) {
    cfg.triple.tag.clear();
    cfg.triple.notes.clear();
  }

  if (std::optional<Expr> e = expr_value("problem.f", detail::kFVars)) cfg.f = std::move(*e);
  if (std::optional<Expr> e = expr_value("problem.g", detail::kKernelVars)) cfg.g = std::move(*e);
  if (std::optional<Expr> e = expr_value("problem.a", detail::kTVar)) cfg.a = std::move(*e);
  if (std::optional<Expr> e = expr_value("problem.b", detail::kSVar)) cfg.b = std::move(*e);
  if (std::optional<double> v = num_value("problem.L")) {
    bound_check("problem.L", *v > 0.0, "must be positive");
    cfg.length = *v;
  }
  if (std::optional<double> v = num_value("problem.x_min")) cfg.x_min = *v;

  if (std::optional<long long> v = int_value("solver.grid_n")) {
    bound_check("solver.grid_n", *v >= 2 && *v <= 10000000, "must be in [2, 1e7]");
    cfg.solver.grid_n = static_cast<int>(*v);
  }
  if (std::optional<double> v = num_value("solver.tol")) {
    bound_check("solver.tol", *v > 0.0, "must be positive");
    cfg.solver.tol = *v;
  }
  if (std::optional<long long> v = int_value("solver.max_iter")) {
    bound_check("solver.max_iter", *v >= 1 && *v <= 1000000, "must be in [1, 1e6]");
    cfg.solver.max_iter = static_cast<int>(*v);
  }
  if (std::optional<std::string> v = string_value("solver.mode")) {
    try {
      cfg.solver.mode = solve_mode_from_name(*v);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(detail::at_line(find("solver.mode")->line) + ex.what());
    }
  }
  if (std::optional<Expr> e = expr_value("solver.initial", detail::kTVar))
    cfg.solver.initial = std::move(*e);
  if (std::optional<double> v = num_value("solver.bracket_radius")) {
    bound_check("solver.bracket_radius", *v >= 0.0, "must be nonnegative");
    cfg.solver.bracket_radius = *v;
  }

  if (std::optional<long long> v = int_value("mnc.ensemble_size")) {
    bound_check("mnc.ensemble_size", *v >= 1 && *v <= 100000, "must be in [1, 1e5]");
    cfg.ensemble_size = static_cast<int>(*v);
  }
  if (std::optional<long long> v = int_value("mnc.steps")) {
    bound_check("mnc.steps", *v >= 0 && *v <= 100000, "must be in [0, 1e5]");
    cfg.steps = static_cast<int>(*v);
  }
  if (std::optional<long long> v = int_value("mnc.hull_count")) {
    bound_check("mnc.hull_count", *v >= 1 && *v <= 1000000, "must be in [1, 1e6]");
    cfg.hull_count = static_cast<int>(*v);
  }
  if (std::optional<long long> v = int_value("mnc.seed")) {
    bound_check("mnc.seed", *v >= 0, "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  if (std::optional<double> v = num_value("mnc.tail_fraction")) {
    bound_check("mnc.tail_fraction", *v > 0.0 && *v <= 1.0, "must lie in (0, 1]");
    cfg.tail_fraction = *v;
  }

  return cfg;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vhfix
