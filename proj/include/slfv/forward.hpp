#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

#include "slfv/ancestry.hpp"
#include "slfv/errors.hpp"
#include "slfv/events.hpp"
#include "slfv/geometry.hpp"

namespace slfv {

// {0,1}-valued ghost density: 1 outside the real region, 0 inside it.
struct GhostDensity {
  RegionSet real_region;

  int operator()(const Point& y) const { return real_region.contains(y) ? 0 : 1; }

  static GhostDensity all_ghost() { return {}; }
};

// Potential ancestors at time 0 of the individual at x at time t.
inline AtomSet trace_ancestry(const Point& x, double t, const EventLog& log, int k) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
  return trace_quenched(AtomSet({x}), t, 0.0, log, k);
}

// Ghost density of the quenched k-parent SLFV at (x, t): the product of the
// initial density over all potential ancestors.
inline int density_k_at(const Point& x, double t, const GhostDensity& omega0, const EventLog& log,
                        int k) {
  const AtomSet ancestors = trace_ancestry(x, t, log, k);
  for (const auto& y : ancestors.atoms)
    if (omega0(y) == 0) return 0;
  return 1;
}

struct AcceptedBall {
  double t = 0.0;
  Ball ball;
  std::size_t event_index = 0;

  friend bool operator==(const AcceptedBall&, const AcceptedBall&) = default;
};

// Region at time t = initial + every accepted ball with time <= t.
struct BallUnionTrajectory {
  RegionSet initial;
  std::vector<AcceptedBall> accepted;

  RegionSet state_at(double t) const {
    RegionSet s = initial;
    for (const auto& a : accepted) {
      if (a.t > t) break;
      s.shapes.emplace_back(a.ball);
    }
    return s;
  }

  RegionSet final_state() const { return state_at(std::numeric_limits<double>::infinity()); }
};

namespace detail {

inline void require_region_inside(const SpaceTimeBox& box, const RegionSet& e) {
  for (const auto& s : e.shapes) {
    const auto* b = std::get_if<Ball>(&s);
    if (b == nullptr)
      throw BoundaryViolation("half-space regions cannot be grown inside a finite window");
    if (!box.contains_ball(b->center, b->radius))
      throw BoundaryViolation("ball at (" + format_point(b->center, box.dim) +
                              ") exceeds the simulated window");
  }
}

}  // namespace detail

// Forward run of the infinity-parent SLFV from the real region E0: in time
// order, every event ball that meets the current real region in positive
// measure turns entirely real. stop(ball) returning true ends the scan right
// after that ball is accepted.
template <class Stop>
BallUnionTrajectory run_forward_inf_until(const RegionSet& e0, double t_end, const EventLog& log,
                                          Stop&& stop) {
  if (e0.empty()) throw std::invalid_argument("initial real region must be nonempty");
  if (t_end > log.box.t_max) throw ConfigError("T exceeds the event log horizon t_max");
  const int d = log.dim();
  detail::require_region_inside(log.box, e0);
  BallUnionTrajectory traj{e0, {}};
  RegionSet state = e0;
  detail::BoundingBox box = detail::BoundingBox::of({}, d);
  for (const auto& b : e0.balls()) box.include(b.center, b.radius, d);
  const std::size_t end = log.count_until(t_end);
  for (std::size_t i = 0; i < end; ++i) {
    const auto& e = log.events[i];
    if (!box.may_touch(e.center, e.radius, d)) continue;
    const Ball ball{e.center, e.radius};
    if (!ball_hits_region(ball, state)) continue;
    if (!log.box.contains_ball(ball.center, ball.radius))
      throw BoundaryViolation("real region reached (" + format_point(ball.center, d) +
                              ") at the window edge");
    state.shapes.emplace_back(ball);
    box.include(ball.center, ball.radius, d);
    traj.accepted.push_back({e.t, ball, i});
    if (stop(ball)) break;
  }
  return traj;
}

inline BallUnionTrajectory run_forward_inf(const RegionSet& e0, double t_end, const EventLog& log) {
  return run_forward_inf_until(e0, t_end, log, [](const Ball&) { return false; });
}

struct StabilizeResult {
  std::vector<int> k_schedule;
  std::vector<int> bits;     // density_k_at for each k
  bool reached_zero = false; // a finite k already certifies density 0
  bool stabilized = false;   // last two values agree
  int estimate = 1;          // last value; exact when reached_zero
};

// Coupled evaluation along an increasing k schedule on one log. The bits are
// nonincreasing in k; a trailing run of ones is only an estimate of the limit.
inline StabilizeResult monotone_stabilize(const Point& x, double t, const GhostDensity& omega0,
                                          const EventLog& log, const std::vector<int>& k_schedule) {
  if (k_schedule.empty()) throw std::invalid_argument("k schedule must be nonempty");
  for (std::size_t i = 0; i < k_schedule.size(); ++i) {
    if (k_schedule[i] < 2) throw std::invalid_argument("k schedule entries must be >= 2");
    if (i > 0 && k_schedule[i] <= k_schedule[i - 1])
      throw std::invalid_argument("k schedule must be strictly increasing");
  }
  StabilizeResult r;
  r.k_schedule = k_schedule;
  for (int k : k_schedule) r.bits.push_back(density_k_at(x, t, omega0, log, k));
  r.estimate = r.bits.back();
  r.reached_zero = r.estimate == 0;
  r.stabilized = r.bits.size() < 2 || r.bits[r.bits.size() - 2] == r.bits.back();
  return r;
}

}  // namespace slfv
