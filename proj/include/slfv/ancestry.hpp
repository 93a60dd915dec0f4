#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "slfv/errors.hpp"
#include "slfv/events.hpp"
#include "slfv/geometry.hpp"
#include "slfv/point.hpp"

namespace slfv {

// Finite set of atom locations; duplicates collapse on normalize().
struct AtomSet {
  std::vector<Point> atoms;

  AtomSet() = default;
  explicit AtomSet(std::vector<Point> pts) : atoms(std::move(pts)) { normalize(); }

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }

  AtomSet& normalize() {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    return *this;
  }

  // Both sides normalized.
  bool subset_of(const AtomSet& other) const {
    return std::includes(other.atoms.begin(), other.atoms.end(), atoms.begin(), atoms.end());
  }

  friend bool operator==(const AtomSet&, const AtomSet&) = default;
};

inline AtomSet atom_union(const AtomSet& a, const AtomSet& b) {
  AtomSet out;
  out.atoms.reserve(a.size() + b.size());
  std::set_union(a.atoms.begin(), a.atoms.end(), b.atoms.begin(), b.atoms.end(),
                 std::back_inserter(out.atoms));
  return out;
}

namespace detail {

struct BoundingBox {
  Point lo, hi;

  static BoundingBox of(const std::vector<Point>& pts, int d) {
    BoundingBox b;
    for (int a = 0; a < d; ++a) {
      b.lo[a] = std::numeric_limits<double>::infinity();
      b.hi[a] = -std::numeric_limits<double>::infinity();
    }
    for (const auto& p : pts) b.include(p, 0.0, d);
    return b;
  }

  void include(const Point& p, double r, int d) {
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], p[a] - r);
      hi[a] = std::max(hi[a], p[a] + r);
    }
  }

  // Cheap prefilter: false only when the ball cannot touch the box.
  bool may_touch(const Point& c, double r, int d) const {
    for (int a = 0; a < d; ++a)
      if (c[a] + r < lo[a] || c[a] - r > hi[a]) return false;
    return true;
  }
};

inline void require_inside(const SpaceTimeBox& box, const Point& p) {
  if (!box.contains(p))
    throw BoundaryViolation("ancestral atom at (" + format_point(p, box.dim) +
                            ") left the simulated window");
}

}  // namespace detail

struct NoJumpObserver {
  void operator()(const ReproductionEvent&, double, const std::vector<Point>&) const {}
};

// Replays the events of `log` with t_to < t <= t_from in reverse time.
// An event whose closed ball holds at least one atom removes those atoms
// and adds its first k potential parents. The observer sees
// (event, backward time t_from - t, atoms after the jump).
template <class Observer = NoJumpObserver>
AtomSet trace_quenched(const AtomSet& start, double t_from, double t_to, const EventLog& log,
                       int k, Observer&& on_jump = {}) {
  if (k < 1) throw std::invalid_argument("number of parents must be >= 1");
  if (t_from > log.box.t_max)
    throw ConfigError("trace start time exceeds the event log horizon t_max");
  const int d = log.dim();
  std::vector<Point> atoms = start.atoms;
  for (const auto& p : atoms) detail::require_inside(log.box, p);
  auto box = detail::BoundingBox::of(atoms, d);
  std::vector<Point> kept;
  std::size_t i = log.count_until(t_from);
  while (i > 0) {
    const ReproductionEvent& e = log.events[--i];
    if (e.t <= t_to) break;
    if (atoms.empty() || !box.may_touch(e.center, e.radius, d)) continue;
    const double r2 = e.radius * e.radius;
    kept.clear();
    for (const auto& p : atoms)
      if (dist2(p, e.center) > r2) kept.push_back(p);
    if (kept.size() == atoms.size()) continue;
    for (int n = 1; n <= k; ++n) {
      const Point y = parent_location(e, n, d);
      detail::require_inside(log.box, y);
      kept.push_back(y);
    }
    atoms.swap(kept);
    box = detail::BoundingBox::of(atoms, d);
    on_jump(e, t_from - e.t, atoms);
  }
  return AtomSet(std::move(atoms));
}

}  // namespace slfv
