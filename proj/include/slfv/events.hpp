#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "slfv/errors.hpp"
#include "slfv/format.hpp"
#include "slfv/point.hpp"
#include "slfv/radius_measure.hpp"
#include "slfv/rng.hpp"

namespace slfv {

// Simulation window: time [0, t_max], interior [-L_i, L_i]^d. Event centers
// are drawn from the interior enlarged by `margin` on every side.
struct SpaceTimeBox {
  int dim = 1;
  double t_max = 1.0;
  std::array<double, kMaxDim> half_width{1.0, 1.0, 1.0};
  double margin = 0.0;

  static SpaceTimeBox cube(int d, double t_max, double half_width, double margin) {
    SpaceTimeBox b;
    b.dim = d;
    b.t_max = t_max;
    b.half_width = {half_width, d > 1 ? half_width : 0.0, d > 2 ? half_width : 0.0};
    b.margin = margin;
    return b;
  }

  void validate() const {
    require_dimension(dim);
    if (!(t_max >= 0.0) || !std::isfinite(t_max))
      throw ConfigError("t_max must be finite and >= 0");
    for (int i = 0; i < dim; ++i)
      if (!(half_width[i] > 0.0) || !std::isfinite(half_width[i]))
        throw ConfigError("box half-widths must be finite and > 0");
    if (!(margin >= 0.0) || !std::isfinite(margin)) throw ConfigError("margin must be >= 0");
  }

  double enlarged_volume() const {
    double v = 1.0;
    for (int i = 0; i < dim; ++i) v *= 2.0 * (half_width[i] + margin);
    return v;
  }

  bool contains(const Point& p) const {
    for (int i = 0; i < dim; ++i)
      if (std::abs(p[i]) > half_width[i]) return false;
    return true;
  }

  bool contains_ball(const Point& c, double r) const {
    for (int i = 0; i < dim; ++i)
      if (std::abs(c[i]) + r > half_width[i]) return false;
    return true;
  }

  bool enlarged_contains(const Point& p) const {
    for (int i = 0; i < dim; ++i)
      if (std::abs(p[i]) > half_width[i] + margin) return false;
    return true;
  }
};

struct ReproductionEvent {
  double t = 0.0;
  Point center;
  double radius = 1.0;
  std::uint64_t seed = 0;

  bool covers(const Point& p) const { return dist2(p, center) <= radius * radius; }

  friend bool operator==(const ReproductionEvent&, const ReproductionEvent&) = default;
};

inline bool event_order(const ReproductionEvent& a, const ReproductionEvent& b) {
  return a.t < b.t || (a.t == b.t && a.seed < b.seed);
}

// n-th potential parent (n >= 1) as an offset in the closed unit ball. A
// pure function of (seed, n): the first k parents are the same for every k.
inline Point parent_offset(const ReproductionEvent& e, int n, int d) {
  CounterRng rng(hash_combine(e.seed, static_cast<std::uint64_t>(n)));
  return sample_unit_ball(rng, d);
}

inline Point parent_location(const ReproductionEvent& e, int n, int d) {
  return e.center + e.radius * parent_offset(e, n, d);
}

struct EventLog {
  SpaceTimeBox box;
  RadiusMeasure mu;
  std::uint64_t master_seed = 0;
  std::vector<ReproductionEvent> events;

  int dim() const { return box.dim; }

  // Number of events with time <= t.
  std::size_t count_until(double t) const {
    return static_cast<std::size_t>(
        std::upper_bound(events.begin(), events.end(), t,
                         [](double v, const ReproductionEvent& e) { return v < e.t; }) -
        events.begin());
  }
};

inline double expected_event_count(const SpaceTimeBox& box, const RadiusMeasure& mu) {
  return box.t_max * box.enlarged_volume() * mu.total_mass();
}

namespace detail {
inline constexpr std::uint64_t kTimeStream = 0x74696D65ULL;   // "time"
inline constexpr std::uint64_t kEventStream = 0x65766E74ULL;  // "evnt"
}  // namespace detail

inline void check_log_inputs(const SpaceTimeBox& box, const RadiusMeasure& mu) {
  box.validate();
  if (!mu.is_samplable())
    throw ConfigError("radius measure must have finite mass and bounded support to simulate");
  if (box.margin < mu.sup_support())
    throw ConfigError("box margin " + format_double(box.margin) +
                      " is smaller than the largest radius " + format_double(mu.sup_support()));
}

// Poisson process with intensity dt (x) dx (x) mu(dR) on [0, t_max] x the
// enlarged box. Arrival times come from one exponential stream; each event's
// location, radius and parents come from its own seed.
inline EventLog generate_event_log(const SpaceTimeBox& box, const RadiusMeasure& mu,
                                   std::uint64_t master_seed) {
  check_log_inputs(box, mu);
  EventLog log{box, mu, master_seed, {}};
  const double rate = box.enlarged_volume() * mu.total_mass();
  const double expected = rate * box.t_max;
  log.events.reserve(static_cast<std::size_t>(expected + 6.0 * std::sqrt(expected) + 16.0));
  CounterRng clock(hash_combine(master_seed, detail::kTimeStream));
  const std::uint64_t event_key = hash_combine(master_seed, detail::kEventStream);
  double t = 0.0;
  for (std::uint64_t i = 0;; ++i) {
    t += exponential(clock, rate);
    if (t > box.t_max) break;
    ReproductionEvent e;
    e.t = t;
    e.seed = hash_combine(event_key, i);
    CounterRng attr(hash_combine(e.seed, 0));
    for (int a = 0; a < box.dim; ++a) {
      const double w = box.half_width[a] + box.margin;
      e.center[a] = uniform(attr, -w, w);
    }
    e.radius = mu.sample(attr);
    log.events.push_back(e);
  }
  std::sort(log.events.begin(), log.events.end(), event_order);
  assert(std::abs(static_cast<double>(log.events.size()) - expected) <=
         6.0 * std::sqrt(expected) + 6.0);
  return log;
}

// Events of `log` that belong to the sub-window (centers in its enlarged box,
// times up to its t_max).
inline EventLog restrict_log(const EventLog& log, const SpaceTimeBox& sub) {
  EventLog out{sub, log.mu, log.master_seed, {}};
  for (const auto& e : log.events)
    if (e.t <= sub.t_max && sub.enlarged_contains(e.center)) out.events.push_back(e);
  return out;
}

// Uniform grid over event centers for range queries around shapes.
class EventIndex {
 public:
  explicit EventIndex(const EventLog& log) : log_(&log), dim_(log.dim()) {
    const double reach = std::max(log.mu.sup_support(), 1e-9);
    for (int a = 0; a < kMaxDim; ++a) {
      const double w = a < dim_ ? log.box.half_width[a] + log.box.margin : 0.0;
      lo_[a] = -w;
      cells_[a] = a < dim_ ? std::max(1, static_cast<int>(std::ceil(2.0 * w / reach))) : 1;
      cell_size_[a] = a < dim_ ? 2.0 * w / cells_[a] : 1.0;
    }
    buckets_.resize(static_cast<std::size_t>(cells_[0]) * cells_[1] * cells_[2]);
    for (std::size_t i = 0; i < log.events.size(); ++i)
      buckets_[flat(cell_of(log.events[i].center))].push_back(static_cast<std::uint32_t>(i));
  }

  // Indices (ascending) of events whose center lies within `reach` of `c`
  // in the sup norm. Callers apply exact predicates on the result.
  template <class Fn>
  void for_each_near(const Point& c, double reach, Fn&& fn) const {
    std::array<int, kMaxDim> from{0, 0, 0}, to{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      from[a] = clamp_cell(a, (c[a] - reach - lo_[a]) / cell_size_[a]);
      to[a] = clamp_cell(a, (c[a] + reach - lo_[a]) / cell_size_[a]);
    }
    for (int i = from[0]; i <= to[0]; ++i)
      for (int j = from[1]; j <= to[1]; ++j)
        for (int k = from[2]; k <= to[2]; ++k)
          for (auto idx : buckets_[flat({i, j, k})]) fn(static_cast<std::size_t>(idx));
  }

 private:
  int clamp_cell(int a, double v) const {
    return std::clamp(static_cast<int>(std::floor(v)), 0, cells_[a] - 1);
  }
  std::array<int, kMaxDim> cell_of(const Point& p) const {
    std::array<int, kMaxDim> c{0, 0, 0};
    for (int a = 0; a < dim_; ++a) c[a] = clamp_cell(a, (p[a] - lo_[a]) / cell_size_[a]);
    return c;
  }
  std::size_t flat(const std::array<int, kMaxDim>& c) const {
    return (static_cast<std::size_t>(c[0]) * cells_[1] + c[1]) * cells_[2] + c[2];
  }

  const EventLog* log_;
  int dim_;
  std::array<double, kMaxDim> lo_{}, cell_size_{};
  std::array<int, kMaxDim> cells_{1, 1, 1};
  std::vector<std::vector<std::uint32_t>> buckets_;
};

// CSV: '# key=value' header lines, a column row, then one event per row as
// t,x1[,x2[,x3]],R,seed_hex with 17 significant digits.
inline void write_event_log(std::ostream& os, const EventLog& log) {
  const auto& b = log.box;
  os << "# slfv event log v1\n";
  os << "# d=" << b.dim << '\n';
  os << "# t_max=" << format_double(b.t_max) << '\n';
  os << "# box.L=";
  for (int a = 0; a < b.dim; ++a) os << (a ? "," : "") << format_double(b.half_width[a]);
  os << '\n';
  os << "# box.margin=" << format_double(b.margin) << '\n';
  os << "# master_seed=" << format_hex(log.master_seed) << '\n';
  for (const auto& [k, v] : log.mu.entries()) os << "# " << k << '=' << v << '\n';
  os << 't';
  for (int a = 0; a < b.dim; ++a) os << ",x" << a + 1;
  os << ",R,seed_hex\n";
  for (const auto& e : log.events) {
    os << format_double(e.t);
    for (int a = 0; a < b.dim; ++a) os << ',' << format_double(e.center[a]);
    os << ',' << format_double(e.radius) << ',' << format_hex(e.seed) << '\n';
  }
}

inline EventLog read_event_log(std::istream& is) {
  Entries header;
  std::string line;
  bool saw_columns = false;
  EventLog log;
  while (std::getline(is, line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto body = trim(t.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos)
        header[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
      continue;
    }
    if (!saw_columns) {
      saw_columns = true;
      const auto need = [&](const char* k) -> const std::string& {
        const auto it = header.find(k);
        if (it == header.end()) throw ConfigError(std::string("event log header lacks ") + k);
        return it->second;
      };
      log.box.dim = static_cast<int>(parse_int(need("d")));
      require_dimension(log.box.dim);
      log.box.t_max = parse_double(need("t_max"));
      const auto widths = parse_double_list(need("box.L"));
      if (static_cast<int>(widths.size()) != log.box.dim)
        throw ConfigError("event log box.L has the wrong number of entries");
      log.box.half_width = {0.0, 0.0, 0.0};
      for (int a = 0; a < log.box.dim; ++a) log.box.half_width[a] = widths[a];
      log.box.margin = parse_double(need("box.margin"));
      log.master_seed = parse_u64(need("master_seed"));
      log.mu = RadiusMeasure::from_entries(header, log.box.dim);
      continue;
    }
    const auto cols = split(t, ',');
    if (static_cast<int>(cols.size()) != log.box.dim + 3)
      throw ConfigError("event log row has " + std::to_string(cols.size()) + " columns");
    ReproductionEvent e;
    e.t = parse_double(cols[0]);
    for (int a = 0; a < log.box.dim; ++a) e.center[a] = parse_double(cols[1 + a]);
    e.radius = parse_double(cols[1 + log.box.dim]);
    e.seed = parse_u64(cols[2 + log.box.dim]);
    log.events.push_back(e);
  }
  if (!saw_columns) throw ConfigError("event log has no column row");
  if (!std::is_sorted(log.events.begin(), log.events.end(), event_order))
    throw ConfigError("event log rows are not sorted by (t, seed)");
  return log;
}

}  // namespace slfv
