#pragma once

// Flat key=value run configuration. Every key read is recorded with its
// resolved value, so the manifest written for a run is complete.

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slfv/errors.hpp"
#include "slfv/events.hpp"
#include "slfv/format.hpp"
#include "slfv/geometry.hpp"
#include "slfv/radius_measure.hpp"

namespace slfv::cli {

// Keys reserved for the manifest itself.
inline constexpr const char* kCommandKey = "slfv.command";
inline constexpr const char* kVersionKey = "slfv.version";

class Config {
 public:
  Config() = default;
  explicit Config(Entries raw) : raw_(std::move(raw)) {}

  // Grammar: one `key = value` per line; '#' starts a comment line.
  static Entries parse_text(const std::string& text, const std::string& origin) {
    Entries out;
    std::istringstream is(text);
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
      ++no;
      const auto t = trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(origin + ":" + std::to_string(no) + ": expected key = value");
      const std::string key(trim(t.substr(0, eq)));
      if (key.empty()) throw ConfigError(origin + ":" + std::to_string(no) + ": empty key");
      if (out.count(key)) throw ConfigError(origin + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
      out[key] = std::string(trim(t.substr(eq + 1)));
    }
    return out;
  }

  static Entries parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_text(ss.str(), path);
  }

  // --set key=value, applied over the file.
  void set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    const std::string key(trim(std::string_view(assignment).substr(0, eq)));
    if (key.empty()) throw ConfigError("--set has an empty key");
    raw_[key] = std::string(trim(std::string_view(assignment).substr(eq + 1)));
  }

  bool has(const std::string& key) const { return raw_.count(key) > 0; }

  // Removes a reserved key and returns its value ("" when absent).
  std::string take(const std::string& key) {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return {};
    std::string v = it->second;
    raw_.erase(it);
    return v;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    const auto it = raw_.find(key);
    const std::string v = it == raw_.end() ? fallback : it->second;
    resolved_[key] = v;
    return v;
  }

  std::string required(const std::string& key) {
    if (!has(key)) throw ConfigError("missing required key '" + key + "'");
    return str(key, "");
  }

  double real(const std::string& key, double fallback) {
    const std::string text = str(key, format_double(fallback));
    return wrap(key, [&] { return parse_double(text); });
  }

  long long integer(const std::string& key, long long fallback) {
    const std::string text = str(key, std::to_string(fallback));
    return wrap(key, [&] { return parse_int(text); });
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    const std::string text = str(key, std::to_string(fallback));
    return wrap(key, [&] { return parse_u64(text); });
  }

  std::vector<double> reals(const std::string& key, const std::string& fallback) {
    const std::string text = str(key, fallback);
    return wrap(key, [&] { return parse_double_list(text); });
  }

  std::vector<int> ints(const std::string& key, const std::string& fallback) {
    const std::string text = str(key, fallback);
    return wrap(key, [&] {
      std::vector<int> out;
      for (const auto& item : split(text, ',')) out.push_back(static_cast<int>(parse_int(item)));
      return out;
    });
  }

  RegionSet region(const std::string& key, const std::string& fallback, int d) {
    const std::string text = str(key, fallback);
    return wrap(key, [&] { return parse_region(text, d); });
  }

  // Points separated by ';', coordinates by ','.
  std::vector<Point> points(const std::string& key, const std::string& fallback, int d) {
    const std::string text = str(key, fallback);
    return wrap(key, [&] {
      std::vector<Point> out;
      for (const auto& item : split(text, ';')) out.push_back(parse_point(item, d));
      return out;
    });
  }

  std::vector<std::pair<int, int>> k_pairs(const std::string& key, const std::string& fallback) {
    const std::string text = str(key, fallback);
    return wrap(key, [&] {
      std::vector<std::pair<int, int>> out;
      for (const auto& item : split(text, ',')) {
        const auto ab = split(item, ':');
        if (ab.size() != 2) throw std::invalid_argument("pairs look like k:k', got '" + item + "'");
        out.emplace_back(static_cast<int>(parse_int(ab[0])), static_cast<int>(parse_int(ab[1])));
      }
      return out;
    });
  }

  // mu.* keys; defaults to a fixed radius 1. The normalized entries are
  // recorded, and keys the chosen kind does not use are rejected.
  RadiusMeasure measure(int d) {
    Entries given;
    for (const auto& [k, v] : raw_)
      if (k.rfind("mu.", 0) == 0) given[k] = v;
    const RadiusMeasure mu = wrap("mu", [&] { return RadiusMeasure::from_entries(given, d); });
    const Entries norm = mu.entries();
    for (const auto& [k, v] : given)
      if (!norm.count(k)) throw ConfigError("key '" + k + "' is not used by mu.kind=" + norm.at("mu.kind"));
    for (const auto& [k, v] : norm) resolved_[k] = v;
    return mu;
  }

  // Space-time box: d, t_max, box.L (one value or d values), box.margin
  // (defaults to the largest radius of mu).
  SpaceTimeBox box(int d, const RadiusMeasure& mu) {
    SpaceTimeBox b;
    b.dim = d;
    b.t_max = real("t_max", 1.0);
    const auto widths = reals("box.L", "30");
    if (widths.size() != 1 && static_cast<int>(widths.size()) != d)
      throw ConfigError("box.L needs 1 or d = " + std::to_string(d) + " values");
    b.half_width = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) b.half_width[a] = widths.size() == 1 ? widths[0] : widths[a];
    const double r = mu.sup_support();
    b.margin = real("box.margin", std::isfinite(r) ? r : 0.0);
    b.validate();
    return b;
  }

  int dim() {
    const auto d = integer("d", 1);
    if (d < 1 || d > 3) throw ConfigError("d must be 1, 2 or 3");
    return static_cast<int>(d);
  }

  // Fails on keys that were given but never read.
  void reject_unused() const {
    std::string bad;
    for (const auto& [k, v] : raw_)
      if (!resolved_.count(k)) bad += (bad.empty() ? "" : ", ") + k;
    if (!bad.empty()) throw ConfigError("unknown or unused config keys: " + bad);
  }

  const Entries& resolved() const { return resolved_; }

 private:
  template <class F>
  static auto wrap(const std::string& key, F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ConfigError("bad value for '" + key + "': " + e.what());
    }
  }

  Entries raw_;
  Entries resolved_;
};

inline std::string format_manifest(const std::string& command, const std::string& version,
                                   const Entries& resolved) {
  std::string s = "# slfv run manifest; rerun with: slfv replay <this file> --out <dir>\n";
  s += std::string(kCommandKey) + " = " + command + "\n";
  s += std::string(kVersionKey) + " = " + version + "\n";
  for (const auto& [k, v] : resolved) s += k + " = " + v + "\n";
  return s;
}

}  // namespace slfv::cli
