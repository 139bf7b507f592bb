#pragma once

// Run configuration: flat text, one `section.key = value` per line.
//
//   # comment
//   system.n_A = 1
//   system.n_B = 1
//   hamiltonian.model = coupled_oscillators
//   hamiltonian.epsilon = 0.2
//   initial.z0 = 1, 0, 0, 0
//   integration.t_end = 20
//
// Lists are comma separated. Sweep values are separated by ';' so that a
// sweep may also vary a list-valued key such as initial.z0.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "symcamel/errors.hpp"

namespace symcamel::cli {

/// Malformed or incomplete configuration. Maps to exit code 2.
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& field, int line, const std::string& what)
      : InvalidInput(format(field, line, what)), field_(field), line_(line) {}
  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }  // 0 when the field is absent

 private:
  static std::string format(const std::string& field, int line, const std::string& what) {
    std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
    return "config: " + where + "field '" + field + "': " + what;
  }
  std::string field_;
  int line_;
};

struct RawEntry {
  std::string value;
  int line = 0;
};

using RawConfig = std::map<std::string, RawEntry>;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "system.n_A", "system.n_B", "system.hbar",
      "hamiltonian.model", "hamiltonian.epsilon", "hamiltonian.omega", "hamiltonian.omega_A",
      "hamiltonian.omega_B", "hamiltonian.mass", "hamiltonian.coefficient",
      "hamiltonian.bath_omega", "hamiltonian.couplings", "hamiltonian.hessian",
      "hamiltonian.coupling",
      "initial.z0", "initial.R",
      "integration.t_end", "integration.step", "integration.scheme", "integration.reproject",
      "integration.frozen_hessian",
      "output.format", "output.path", "output.fields", "output.stride",
      "sweep.key", "sweep.values"};
  return keys;
}

inline bool is_potential_key(const std::string& key) {
  const std::string prefix = "hamiltonian.potential_";
  if (key.rfind(prefix, 0) != 0 || key.size() == prefix.size()) return false;
  return key.find_first_not_of("0123456789", prefix.size()) == std::string::npos;
}

}  // namespace detail

inline RawConfig parse_raw_config(std::istream& in) {
  RawConfig raw;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.erase(hash);
    text = detail::trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(text, line, "expected 'section.key = value'");
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.find('.') == std::string::npos)
      throw ConfigError(key, line, "key must have the form section.key");
    if (!detail::known_keys().count(key) && !detail::is_potential_key(key))
      throw ConfigError(key, line, "unknown field");
    if (value.empty()) throw ConfigError(key, line, "empty value");
    if (raw.count(key))
      throw ConfigError(key, line, "duplicate field (first set on line " +
                                       std::to_string(raw[key].line) + ")");
    raw[key] = RawEntry{value, line};
  }
  return raw;
}

inline RawConfig read_raw_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", 0, "cannot open '" + path + "'");
  return parse_raw_config(in);
}

enum class OutputFormat { CSV, JSONL };

struct RunConfig {
  int n_a = 0;
  int n_b = 0;
  double hbar = 1.0;

  std::string model;
  std::map<std::string, std::vector<double>> parameters;  // hamiltonian.* except model
  std::map<std::string, int> parameter_lines;

  std::vector<double> z0;  // empty means the origin
  std::optional<double> radius;

  double t_end = 0.0;
  double step = 1e-3;
  std::string scheme = "rk4";
  bool reproject = false;
  bool frozen_hessian = false;

  OutputFormat format = OutputFormat::CSV;
  std::string path = "trace.csv";
  std::vector<std::string> fields;  // empty means all
  int stride = 10;

  double ball_radius() const { return radius ? *radius : std::sqrt(hbar); }
};

struct SweepPlan {
  std::string key;
  int line = 0;
  std::vector<std::string> values;
};

namespace detail {

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  const RawEntry* find(const std::string& key) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? nullptr : &it->second;
  }

  const RawEntry& require(const std::string& key) const {
    const RawEntry* e = find(key);
    if (!e) throw ConfigError(key, 0, "missing required field");
    return *e;
  }

  static double to_double(const std::string& key, const RawEntry& e, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || text.empty())
      throw ConfigError(key, e.line, "expected a number, got '" + text + "'");
    if (!std::isfinite(v)) throw ConfigError(key, e.line, "value must be finite");
    return v;
  }

  double number(const std::string& key) const {
    const RawEntry& e = require(key);
    return to_double(key, e, e.value);
  }

  double number_or(const std::string& key, double fallback) const {
    return find(key) ? number(key) : fallback;
  }

  double positive(const std::string& key, double fallback) const {
    const double v = number_or(key, fallback);
    if (!(v > 0.0)) throw ConfigError(key, find(key) ? find(key)->line : 0, "must be positive");
    return v;
  }

  int integer(const std::string& key, int min_value) const {
    const RawEntry& e = require(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size())
      throw ConfigError(key, e.line, "expected an integer, got '" + e.value + "'");
    if (v < min_value)
      throw ConfigError(key, e.line, "must be at least " + std::to_string(min_value));
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    const RawEntry& e = require(key);
    std::vector<double> out;
    for (const auto& item : split(e.value, ',')) out.push_back(to_double(key, e, item));
    return out;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const RawEntry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1") return true;
    if (e->value == "false" || e->value == "0") return false;
    throw ConfigError(key, e->line, "expected true or false, got '" + e->value + "'");
  }

  std::string choice(const std::string& key, const std::string& fallback,
                     const std::set<std::string>& allowed) const {
    const RawEntry* e = find(key);
    if (!e) return fallback;
    if (!allowed.count(e->value)) {
      std::string opts;
      for (const auto& a : allowed) opts += (opts.empty() ? "" : "|") + a;
      throw ConfigError(key, e->line, "expected one of " + opts + ", got '" + e->value + "'");
    }
    return e->value;
  }

 private:
  const RawConfig& raw_;
};

}  // namespace detail

inline const std::set<std::string>& model_catalog() {
  static const std::set<std::string> names = {"free_particle", "harmonic",      "coupled_oscillators",
                                              "quartic",       "bilinear_bath", "quadratic",
                                              "custom"};
  return names;
}

inline const std::vector<std::string>& output_field_names() {
  static const std::vector<std::string> names = {
      "t", "z", "purity", "entropy_kB", "capacity", "lambda", "volume_ratio", "symplecticity_defect"};
  return names;
}

/// Typed, validated configuration. Model-specific parameters are checked
/// when the model is built.
inline RunConfig build_config(const RawConfig& raw) {
  const detail::Reader r(raw);
  RunConfig c;
  c.n_a = r.integer("system.n_A", 1);
  c.n_b = r.integer("system.n_B", 0);
  c.hbar = r.positive("system.hbar", 1.0);

  c.model = r.choice("hamiltonian.model", "", model_catalog());
  if (c.model.empty()) r.require("hamiltonian.model");
  for (const auto& [key, entry] : raw) {
    if (key.rfind("hamiltonian.", 0) != 0 || key == "hamiltonian.model") continue;
    c.parameters[key.substr(12)] = r.list(key);
    c.parameter_lines[key.substr(12)] = entry.line;
  }

  if (r.find("initial.z0")) {
    c.z0 = r.list("initial.z0");
    const auto expected = static_cast<std::size_t>(2 * (c.n_a + c.n_b));
    if (c.z0.size() != expected)
      throw ConfigError("initial.z0", r.find("initial.z0")->line,
                        "expected " + std::to_string(expected) + " coordinates, got " +
                            std::to_string(c.z0.size()));
  }
  if (r.find("initial.R")) c.radius = r.positive("initial.R", 1.0);

  c.t_end = r.number("integration.t_end");
  if (!(c.t_end > 0.0)) throw ConfigError("integration.t_end", r.find("integration.t_end")->line, "must be positive");
  c.step = r.positive("integration.step", 1e-3);
  if (c.step > c.t_end)
    throw ConfigError("integration.step", r.find("integration.step")->line, "exceeds integration.t_end");
  c.scheme = r.choice("integration.scheme", "rk4", {"rk4", "leapfrog"});
  c.reproject = r.boolean("integration.reproject", false);
  c.frozen_hessian = r.boolean("integration.frozen_hessian", false);

  c.format = r.choice("output.format", "csv", {"csv", "jsonl"}) == "csv" ? OutputFormat::CSV
                                                                        : OutputFormat::JSONL;
  c.path = r.find("output.path") ? r.find("output.path")->value
                                 : (c.format == OutputFormat::CSV ? "trace.csv" : "trace.jsonl");
  if (const RawEntry* e = r.find("output.fields")) {
    const auto& allowed = output_field_names();
    std::set<std::string> seen;
    for (const auto& f : detail::split(e->value, ',')) {
      if (std::find(allowed.begin(), allowed.end(), f) == allowed.end())
        throw ConfigError("output.fields", e->line, "unknown field '" + f + "'");
      if (!seen.insert(f).second) throw ConfigError("output.fields", e->line, "duplicate field '" + f + "'");
    }
    // Columns always follow the canonical order.
    for (const auto& f : allowed)
      if (seen.count(f)) c.fields.push_back(f);
  }
  if (r.find("output.stride")) c.stride = r.integer("output.stride", 1);
  return c;
}

inline std::optional<SweepPlan> sweep_plan(const RawConfig& raw) {
  const auto key = raw.find("sweep.key");
  const auto values = raw.find("sweep.values");
  if (key == raw.end() && values == raw.end()) return std::nullopt;
  if (key == raw.end()) throw ConfigError("sweep.key", 0, "missing (sweep.values is set)");
  if (values == raw.end()) throw ConfigError("sweep.values", 0, "missing (sweep.key is set)");
  const std::string& target = key->second.value;
  if (target.rfind("sweep.", 0) == 0 || target.rfind("output.", 0) == 0 || target == "system.n_A" ||
      target == "system.n_B" || target == "hamiltonian.model" ||
      (!detail::known_keys().count(target) && !detail::is_potential_key(target)))
    throw ConfigError("sweep.key", key->second.line, "cannot sweep over '" + target + "'");
  SweepPlan s{target, key->second.line, detail::split(values->second.value, ';')};
  for (const auto& v : s.values)
    if (v.empty()) throw ConfigError("sweep.values", values->second.line, "empty sweep value");
  return s;
}

/// One raw configuration per sweep value (or the input itself), with the
/// sweep section removed.
inline std::vector<RawConfig> expand_sweep(const RawConfig& raw) {
  const auto plan = sweep_plan(raw);
  RawConfig base = raw;
  base.erase("sweep.key");
  base.erase("sweep.values");
  if (!plan) return {base};
  const int values_line = raw.at("sweep.values").line;
  std::vector<RawConfig> out;
  for (const auto& v : plan->values) {
    RawConfig c = base;
    c[plan->key] = RawEntry{v, values_line};
    out.push_back(std::move(c));
  }
  return out;
}

/// `<stem>_<index><ext>` for sweep member `index`.
inline std::string sweep_path(const std::string& path, std::size_t index) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  const std::string stem = has_ext ? path.substr(0, dot) : path;
  const std::string ext = has_ext ? path.substr(dot) : "";
  return stem + "_" + std::to_string(index) + ext;
}

}  // namespace symcamel::cli
