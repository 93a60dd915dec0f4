#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <vector>

#include "slfv/ancestry.hpp"
#include "slfv/covering.hpp"
#include "slfv/errors.hpp"
#include "slfv/events.hpp"
#include "slfv/forward.hpp"
#include "slfv/geometry.hpp"
#include "slfv/radius_measure.hpp"
#include "slfv/rng.hpp"

namespace slfv {

// ---------------------------------------------------------------------------
// k-parent ancestral process

struct DualKJump {
  double t = 0.0;
  std::size_t removed = 0;
  AtomSet atoms;  // state right after the jump
};

struct DualKTrajectory {
  AtomSet initial;
  double t_end = 0.0;
  std::vector<DualKJump> jumps;
  std::uint64_t proposals = 0;

  const AtomSet& final_atoms() const { return jumps.empty() ? initial : jumps.back().atoms; }

  const AtomSet& state_at(double t) const {
    const AtomSet* s = &initial;
    for (const auto& j : jumps) {
      if (j.t > t) break;
      s = &j.atoms;
    }
    return *s;
  }
};

namespace detail {

inline void require_k(int k) {
  if (k < 2) throw std::invalid_argument("k must be >= 2");
}

inline void require_samplable(const RadiusMeasure& mu) {
  if (!mu.is_samplable())
    throw ConfigError("radius measure must have finite mass and bounded support to simulate");
}

// Applies one dual-k proposal from atom `i`. Returns the number of atoms
// removed, 0 when the proposal is thinned away.
inline std::size_t dual_k_proposal(std::vector<Point>& atoms, std::size_t i, const RadiusMeasure& mu,
                                   int d, int k, CounterRng& rng, std::vector<Point>& scratch) {
  const double r = mu.sample_weighted(0.0, d, rng);
  const Point x = atoms[i] + r * sample_unit_ball(rng, d);
  const double r2 = r * r;
  // The proposer always counts, even if rounding nudges it past the rim.
  std::size_t mult = 1;
  for (std::size_t j = 0; j < atoms.size(); ++j)
    if (j != i && dist2(atoms[j], x) <= r2) ++mult;
  if (mult > 1 && !(uniform01(rng) * static_cast<double>(mult) < 1.0)) return 0;
  scratch.clear();
  for (std::size_t j = 0; j < atoms.size(); ++j)
    if (j != i && dist2(atoms[j], x) > r2) scratch.push_back(atoms[j]);
  const std::size_t removed = atoms.size() - scratch.size();
  for (int n = 0; n < k; ++n) scratch.push_back(x + r * sample_unit_ball(rng, d));
  atoms.swap(scratch);
  return removed;
}

}  // namespace detail

// mu-driven dual by thinning. Each atom proposes at rate int V_R mu(dR), with
// R size-biased by R^d and the center uniform in B(atom, R); a proposal is
// kept with probability 1 / #{atoms in the ball}. The observer is called as
// obs(t, removed, atoms) after every jump.
template <class Obs>
AtomSet simulate_dual_k(const AtomSet& start, double t_end, const RadiusMeasure& mu, int d, int k,
                        CounterRng& rng, Obs&& obs, std::uint64_t* proposals = nullptr) {
  detail::require_k(k);
  detail::require_samplable(mu);
  const double lambda = event_rate_point(mu, d);
  std::vector<Point> atoms = start.atoms, scratch;
  double t = 0.0;
  std::uint64_t tried = 0;
  while (!atoms.empty()) {
    t += exponential(rng, lambda * static_cast<double>(atoms.size()));
    if (t > t_end) break;
    ++tried;
    const std::size_t i = uniform_index(rng, atoms.size());
    const std::size_t removed = detail::dual_k_proposal(atoms, i, mu, d, k, rng, scratch);
    if (removed > 0) obs(t, removed, atoms);
  }
  if (proposals != nullptr) *proposals = tried;
  return AtomSet(std::move(atoms));
}

inline AtomSet simulate_dual_k(const AtomSet& start, double t_end, const RadiusMeasure& mu, int d,
                               int k, CounterRng& rng) {
  return simulate_dual_k(start, t_end, mu, d, k, rng,
                         [](double, std::size_t, const std::vector<Point>&) {});
}

inline DualKTrajectory run_dual_k(const AtomSet& start, double t_end, const RadiusMeasure& mu,
                                  int d, int k, std::uint64_t seed) {
  if (start.empty()) throw std::invalid_argument("initial atom set must be nonempty");
  CounterRng rng(seed);
  DualKTrajectory traj{start, t_end, {}, 0};
  simulate_dual_k(
      start, t_end, mu, d, k, rng,
      [&](double t, std::size_t removed, const std::vector<Point>& atoms) {
        traj.jumps.push_back({t, removed, AtomSet(atoms)});
      },
      &traj.proposals);
  return traj;
}

// Quenched dual on a log, started at log time t_start: replays the events of
// [0, t_start] backwards. Jump times are reported in dual time t_start - t.
inline DualKTrajectory run_dual_k_quenched(const AtomSet& start, double t_start, const EventLog& log,
                                           int k) {
  detail::require_k(k);
  DualKTrajectory traj{start, t_start, {}, 0};
  const AtomSet start_sorted = AtomSet(start.atoms);
  traj.initial = start_sorted;
  trace_quenched(start_sorted, t_start, 0.0, log, k,
                 [&](const ReproductionEvent&, double s, const std::vector<Point>& atoms) {
                   const std::size_t before =
                       traj.jumps.empty() ? traj.initial.size() : traj.jumps.back().atoms.size();
                   AtomSet now(atoms);
                   // atoms' = atoms - removed + k before deduplication.
                   const std::size_t removed = before + static_cast<std::size_t>(k) - atoms.size();
                   traj.jumps.push_back({s, removed, std::move(now)});
                 });
  return traj;
}

// ---------------------------------------------------------------------------
// Yule bounds

struct YuleCoupledRun {
  AtomSet atoms;
  std::uint64_t yule = 0;
  // (t, atom count, Yule count) after every Yule branching.
  struct Step {
    double t;
    std::size_t atoms;
    std::uint64_t yule;
  };
  std::vector<Step> steps;
};

// Dual-k driven together with a Yule process (k children, rate int V_R mu).
// Every Yule branching picks a particle; particles with index below the
// atom count act as that atom's dual proposal. The dual marginal is the
// thinning sampler above and atom count <= Yule count on every path.
inline YuleCoupledRun run_dual_k_with_yule(const AtomSet& start, double t_end,
                                           const RadiusMeasure& mu, int d, int k,
                                           std::uint64_t seed,
                                           std::uint64_t max_particles = 100000000ULL) {
  detail::require_k(k);
  detail::require_samplable(mu);
  if (start.empty()) throw std::invalid_argument("initial atom set must be nonempty");
  CounterRng rng(seed);
  const double lambda = event_rate_point(mu, d);
  std::vector<Point> atoms = start.atoms, scratch;
  YuleCoupledRun run;
  run.yule = atoms.size();
  double t = 0.0;
  for (;;) {
    t += exponential(rng, lambda * static_cast<double>(run.yule));
    if (t > t_end) break;
    const std::uint64_t pick = uniform_index(rng, run.yule);
    run.yule += static_cast<std::uint64_t>(k - 1);
    if (run.yule > max_particles) throw std::runtime_error("Yule bound exceeded max_particles");
    if (pick < atoms.size()) detail::dual_k_proposal(atoms, pick, mu, d, k, rng, scratch);
    run.steps.push_back({t, atoms.size(), run.yule});
  }
  run.atoms = AtomSet(std::move(atoms));
  return run;
}

// Yule process from one particle, each branching into k at rate int V_R mu.
inline std::uint64_t yule_bound_k(int k, const RadiusMeasure& mu, int d, double t_end,
                                  std::uint64_t seed, std::uint64_t max_particles = 100000000ULL) {
  detail::require_k(k);
  CounterRng rng(seed);
  const double lambda = event_rate_point(mu, d);
  std::uint64_t y = 1;
  double t = 0.0;
  for (;;) {
    t += exponential(rng, lambda * static_cast<double>(y));
    if (t > t_end) return y;
    y += static_cast<std::uint64_t>(k - 1);
    if (y > max_particles) throw std::runtime_error("Yule bound exceeded max_particles");
  }
}

inline double yule_mean(int k, const RadiusMeasure& mu, int d, double t_end) {
  return std::exp((k - 1) * event_rate_point(mu, d) * t_end);
}

// ---------------------------------------------------------------------------
// infinity-parent ancestral process

namespace detail {

inline std::vector<Ball> require_balls(const RegionSet& e) {
  if (!e.balls_only())
    throw ConfigError("half-space constituents have infinite proposal rate; use balls only");
  if (e.empty()) throw std::invalid_argument("initial region must be nonempty");
  return e.balls();
}

}  // namespace detail

struct DualInfRun {
  BallUnionTrajectory region;
  std::uint64_t proposals = 0;
};

// mu-driven dual by thinning. Shape i proposes at rate V_1 int (r_i + R)^d mu(dR),
// R drawn from (r_i + R)^d mu(dR), center uniform in B(c_i, r_i + R); kept with
// probability 1 / #{j : |x - c_j| < r_j + R}. obs(t, ball) returns false to
// stop early.
template <class Obs>
DualInfRun simulate_dual_inf(const RegionSet& e0, double t_end, const RadiusMeasure& mu, int d,
                             CounterRng& rng, Obs&& obs) {
  detail::require_samplable(mu);
  std::vector<Ball> balls = detail::require_balls(e0);
  const double v1 = unit_ball_volume(d);
  std::vector<double> rate;
  double total = 0.0;
  for (const auto& b : balls) {
    rate.push_back(v1 * mu.weighted_mass(b.radius, d, 0.0, kInf));
    total += rate.back();
  }
  DualInfRun run{{e0, {}}, 0};
  double t = 0.0;
  for (;;) {
    t += exponential(rng, total);
    if (t > t_end) break;
    ++run.proposals;
    double u = uniform01(rng) * total;
    std::size_t i = 0;
    while (i + 1 < balls.size() && u >= rate[i]) u -= rate[i++];
    const double r = mu.sample_weighted(balls[i].radius, d, rng);
    const Point x = balls[i].center + (balls[i].radius + r) * sample_unit_ball(rng, d);
    std::size_t mult = 1;
    for (std::size_t j = 0; j < balls.size(); ++j) {
      if (j == i) continue;
      const double reach = balls[j].radius + r;
      if (dist2(x, balls[j].center) < reach * reach) ++mult;
    }
    if (mult > 1 && !(uniform01(rng) * static_cast<double>(mult) < 1.0)) continue;
    const Ball b{x, r};
    balls.push_back(b);
    rate.push_back(v1 * mu.weighted_mass(r, d, 0.0, kInf));
    total += rate.back();
    run.region.accepted.push_back({t, b, static_cast<std::size_t>(run.proposals - 1)});
    if (!obs(t, b)) break;
  }
  return run;
}

inline DualInfRun run_dual_inf(const RegionSet& e0, double t_end, const RadiusMeasure& mu, int d,
                               std::uint64_t seed) {
  CounterRng rng(seed);
  return simulate_dual_inf(e0, t_end, mu, d, rng, [](double, const Ball&) { return true; });
}

// Dual-infinity driven by the events of a log in increasing time, found by
// neighbourhood queries from each accepted ball rather than by a full scan.
// Accepts the same list as run_forward_inf on that log.
inline BallUnionTrajectory run_dual_inf_on_log(const RegionSet& e0, double t_end, const EventLog& log,
                                               const EventIndex& index) {
  if (t_end > log.box.t_max) throw ConfigError("T exceeds the event log horizon t_max");
  const auto initial = detail::require_balls(e0);
  detail::require_region_inside(log.box, e0);
  const int d = log.dim();
  const double r_max = log.mu.sup_support();
  const std::size_t end = log.count_until(t_end);
  std::vector<char> queued(end, 0);
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> heap;
  auto push_overlapping = [&](const Ball& b, std::size_t after) {
    index.for_each_near(b.center, b.radius + r_max, [&](std::size_t j) {
      if (j >= end || j < after || queued[j]) return;
      const auto& e = log.events[j];
      if (balls_overlap(b, Ball{e.center, e.radius})) {
        queued[j] = 1;
        heap.push(j);
      }
    });
  };
  for (const auto& b : initial) push_overlapping(b, 0);
  BallUnionTrajectory traj{e0, {}};
  while (!heap.empty()) {
    const std::size_t j = heap.top();
    heap.pop();
    const auto& e = log.events[j];
    const Ball b{e.center, e.radius};
    if (!log.box.contains_ball(b.center, b.radius))
      throw BoundaryViolation("dual region reached (" + format_point(b.center, d) +
                              ") at the window edge");
    traj.accepted.push_back({e.t, b, j});
    push_overlapping(b, j + 1);
  }
  return traj;
}

inline BallUnionTrajectory run_dual_inf_on_log(const RegionSet& e0, double t_end,
                                               const EventLog& log) {
  const EventIndex index(log);
  return run_dual_inf_on_log(e0, t_end, log, index);
}

// ---------------------------------------------------------------------------
// Border covering process and its branching bound

struct CoveringStep {
  double t = 0.0;
  Ball event;
  int tier = 1;
  std::size_t added = 0;            // new centers
  std::uint64_t hit_particles = 0;  // bound particles sitting on hit centers
  std::size_t centers_after = 0;
  std::uint64_t bound_after = 0;
};

// Covering centers (radius r_tilde) with the coupled branching bound. Each
// center carries the bound particles placed on it; a hit particle leaves
// a_d n^(d-1) offspring, spread over the new centers. Card(C) <= Y on every
// path, and every particle branches at the rate and with the offspring law
// of the bound. Particles on one center branch together, so this is a
// coupling of the marginals, not of the independent process.
struct CoveringTrajectory {
  int dim = 1;
  double r_tilde = 1.0;
  CoveringConstant constant;
  std::vector<Point> centers;
  std::vector<double> center_time;  // 0 for the initial covering
  std::vector<std::uint64_t> particles;
  std::size_t initial_count = 0;
  std::vector<CoveringStep> steps;

  std::size_t count_at(double t) const {
    std::size_t n = initial_count;
    for (const auto& s : steps) {
      if (s.t > t) break;
      n = s.centers_after;
    }
    return n;
  }

  std::uint64_t bound_at(double t) const {
    std::uint64_t y = initial_count;
    for (const auto& s : steps) {
      if (s.t > t) break;
      y = s.bound_after;
    }
    return y;
  }

  bool covers(const Point& p, double t, double slack = 1e-9) const {
    const double r = r_tilde * (1.0 + slack);
    const std::size_t n = count_at(t);
    for (std::size_t i = 0; i < n; ++i)
      if (dist2(p, centers[i]) <= r * r) return true;
    return false;
  }
};

namespace detail {

inline void require_condition(const RadiusMeasure& mu, int d, double r_tilde) {
  const auto rep = check_condition_strong(mu, d, r_tilde, 1000, 1e-6);
  if (rep.verdict != Verdict::holds)
    throw ConfigError(std::string("radius condition verdict is '") + to_string(rep.verdict) +
                      "' at R~ = " + format_double(r_tilde) + ": " + rep.reason);
}

inline CoveringTrajectory initial_covering(const std::vector<Ball>& balls, double r_tilde, int d) {
  CoveringTrajectory cov;
  cov.dim = d;
  cov.r_tilde = r_tilde;
  cov.constant = covering_constant(d);
  for (const auto& b : balls) {
    for (const auto& c : cover_sphere(b.center, b.radius, r_tilde, d)) {
      cov.centers.push_back(c);
      cov.center_time.push_back(0.0);
      cov.particles.push_back(1);
    }
  }
  cov.initial_count = cov.centers.size();
  return cov;
}

// Adds the covering of the event sphere; returns the index of its first center.
inline std::size_t add_covering(CoveringTrajectory& cov, double t, const Ball& event,
                                std::uint64_t hit_particles) {
  const int tier = covering_tier(event.radius, cov.r_tilde);
  const auto fresh = cover_sphere(event.center, event.radius, cov.r_tilde, cov.dim);
  const std::uint64_t offspring = hit_particles * static_cast<std::uint64_t>(cov.constant.budget(tier));
  const std::size_t first = cov.centers.size();
  const std::uint64_t m = fresh.size();
  for (std::size_t q = 0; q < fresh.size(); ++q) {
    cov.centers.push_back(fresh[q]);
    cov.center_time.push_back(t);
    cov.particles.push_back(offspring / m + (q < offspring % m ? 1 : 0));
  }
  const std::uint64_t before =
      cov.steps.empty() ? cov.initial_count : cov.steps.back().bound_after;
  cov.steps.push_back({t, event, tier, fresh.size(), hit_particles, cov.centers.size(),
                       before + offspring});
  return first;
}

}  // namespace detail

// Covering driven by a log: every event within r_tilde + R of a current
// center adds the covering of its sphere.
inline CoveringTrajectory run_covering_on_log(const RegionSet& e0, double r_tilde, double t_end,
                                              const EventLog& log, const EventIndex& index) {
  if (!(r_tilde > 0.0)) throw std::invalid_argument("R~ must be > 0");
  if (t_end > log.box.t_max) throw ConfigError("T exceeds the event log horizon t_max");
  const int d = log.dim();
  detail::require_condition(log.mu, d, r_tilde);
  const auto balls = detail::require_balls(e0);
  CoveringTrajectory cov = detail::initial_covering(balls, r_tilde, d);
  const double r_max = log.mu.sup_support();
  const std::size_t end = log.count_until(t_end);
  std::vector<std::uint64_t> hit(end, 0);
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> heap;
  auto scan_from = [&](std::size_t c, std::size_t after) {
    const Point& p = cov.centers[c];
    if (!log.box.contains_ball(p, r_tilde))
      throw BoundaryViolation("covering center at (" + format_point(p, d) +
                              ") is too close to the window edge");
    index.for_each_near(p, r_tilde + r_max, [&](std::size_t j) {
      if (j >= end || j < after) return;
      const auto& e = log.events[j];
      const double reach = r_tilde + e.radius;
      if (dist2(p, e.center) > reach * reach) return;
      if (hit[j] == 0) heap.push(j);
      hit[j] += cov.particles[c];
    });
  };
  for (std::size_t c = 0; c < cov.centers.size(); ++c) scan_from(c, 0);
  while (!heap.empty()) {
    const std::size_t j = heap.top();
    heap.pop();
    const auto& e = log.events[j];
    const std::size_t first = detail::add_covering(cov, e.t, Ball{e.center, e.radius}, hit[j]);
    for (std::size_t c = first; c < cov.centers.size(); ++c) scan_from(c, j + 1);
  }
  return cov;
}

inline CoveringTrajectory run_covering_on_log(const RegionSet& e0, double r_tilde, double t_end,
                                              const EventLog& log) {
  const EventIndex index(log);
  return run_covering_on_log(e0, r_tilde, t_end, log, index);
}

struct CoveredDualRun {
  BallUnionTrajectory dual;
  CoveringTrajectory covering;
};

// mu-driven dual-infinity and covering on one shared event stream: proposals
// come from dual balls and from covering balls, with the multiplicity taken
// over both families.
inline CoveredDualRun run_covering_mu(const RegionSet& e0, double r_tilde, double t_end,
                                      const RadiusMeasure& mu, int d, std::uint64_t seed) {
  if (!(r_tilde > 0.0)) throw std::invalid_argument("R~ must be > 0");
  detail::require_samplable(mu);
  detail::require_condition(mu, d, r_tilde);
  std::vector<Ball> balls = detail::require_balls(e0);
  CoveredDualRun run{{e0, {}}, detail::initial_covering(balls, r_tilde, d)};
  auto& cov = run.covering;
  const double v1 = unit_ball_volume(d);
  const double cover_rate = v1 * mu.weighted_mass(r_tilde, d, 0.0, kInf);
  std::vector<double> rate;
  double dual_total = 0.0;
  for (const auto& b : balls) {
    rate.push_back(v1 * mu.weighted_mass(b.radius, d, 0.0, kInf));
    dual_total += rate.back();
  }
  CounterRng rng(seed);
  double t = 0.0;
  std::uint64_t proposal = 0;
  for (;;) {
    const double total = dual_total + cover_rate * static_cast<double>(cov.centers.size());
    t += exponential(rng, total);
    if (t > t_end) break;
    ++proposal;
    double u = uniform01(rng) * total;
    Point c;
    double own = 0.0;
    if (u < dual_total) {
      std::size_t i = 0;
      while (i + 1 < balls.size() && u >= rate[i]) u -= rate[i++];
      c = balls[i].center;
      own = balls[i].radius;
    } else {
      c = cov.centers[uniform_index(rng, cov.centers.size())];
      own = r_tilde;
    }
    const double r = mu.sample_weighted(own, d, rng);
    const Point x = c + (own + r) * sample_unit_ball(rng, d);
    std::size_t dual_hits = 0, cover_hits = 0;
    std::uint64_t hit_particles = 0;
    for (const auto& b : balls) {
      const double reach = b.radius + r;
      if (dist2(x, b.center) < reach * reach) ++dual_hits;
    }
    const double cover_reach = (r_tilde + r) * (r_tilde + r);
    for (std::size_t q = 0; q < cov.centers.size(); ++q)
      if (dist2(x, cov.centers[q]) <= cover_reach) {
        ++cover_hits;
        hit_particles += cov.particles[q];
      }
    const std::size_t mult = std::max<std::size_t>(1, dual_hits + cover_hits);
    if (mult > 1 && !(uniform01(rng) * static_cast<double>(mult) < 1.0)) continue;
    const Ball b{x, r};
    if (dual_hits > 0) {
      balls.push_back(b);
      rate.push_back(v1 * mu.weighted_mass(r, d, 0.0, kInf));
      dual_total += rate.back();
      run.dual.accepted.push_back({t, b, static_cast<std::size_t>(proposal - 1)});
    }
    if (hit_particles > 0) detail::add_covering(cov, t, b, hit_particles);
  }
  return run;
}

// Points of the boundary of the union (sampled on each sphere) not covered
// by the covering at time t. Zero when the covering contains the border.
inline std::size_t uncovered_border_points(const RegionSet& region, const CoveringTrajectory& cov,
                                           double t, int samples_per_ball) {
  const auto balls = region.balls();
  std::size_t bad = 0;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    for (const auto& p : sphere_samples(balls[i].center, balls[i].radius, cov.dim, samples_per_ball)) {
      bool interior = false;
      for (std::size_t j = 0; j < balls.size() && !interior; ++j)
        if (j != i && dist2(p, balls[j].center) < balls[j].radius * balls[j].radius * (1.0 - 1e-12))
          interior = true;
      if (!interior && !cov.covers(p, t)) ++bad;
    }
  }
  return bad;
}

// Branching bound from n0 particles: each branches at rate V_1 int (R~ + r)^d mu(dr)
// into a_d n^(d-1) + 1, the tier n drawn with weight (R~ + r)^d mu(dr).
inline std::uint64_t simulate_branching_bound(std::uint64_t n0, double r_tilde,
                                              const RadiusMeasure& mu, int d, double t_end,
                                              std::uint64_t seed,
                                              std::uint64_t max_particles = 100000000ULL) {
  if (!(r_tilde > 0.0)) throw std::invalid_argument("R~ must be > 0");
  detail::require_condition(mu, d, r_tilde);
  const auto cc = covering_constant(d);
  const double rate = enlarged_ball_rate(mu, d, r_tilde);
  CounterRng rng(seed);
  std::uint64_t y = n0;
  double t = 0.0;
  while (y > 0) {
    t += exponential(rng, rate * static_cast<double>(y));
    if (t > t_end) break;
    const double r = mu.sample_weighted(r_tilde, d, rng);
    y += static_cast<std::uint64_t>(cc.budget(covering_tier(r, r_tilde)));
    if (y > max_particles) throw std::runtime_error("branching bound exceeded max_particles");
  }
  return y;
}

// E[Y_T] = n0 exp(rate (m - 1) T), m the mean offspring count. Bounded support only.
inline double branching_bound_mean(std::uint64_t n0, double r_tilde, const RadiusMeasure& mu, int d,
                                   double t_end) {
  if (!mu.has_bounded_support()) throw ConfigError("closed-form mean needs bounded support");
  const auto cc = covering_constant(d);
  const double w = mu.weighted_mass(r_tilde, d, 0.0, kInf);
  double extra = 0.0;
  const int last = covering_tier(mu.sup_support(), r_tilde);
  for (int n = 1; n <= last; ++n)
    extra += mu.weighted_mass(r_tilde, d, (n - 1) * r_tilde, n * r_tilde) *
             static_cast<double>(cc.budget(n));
  const double rate = unit_ball_volume(d) * w;
  return static_cast<double>(n0) * std::exp(rate * (extra / w) * t_end);
}

// ---------------------------------------------------------------------------
// Trajectory CSV: header "t,kind,payload", payload fields separated by spaces.
//   atom    x1 .. xd          one row per atom of the state at time t
//   initial x1 .. xd r        initial ball
//   ball    x1 .. xd r        accepted ball
//   center  x1 .. xd          covering center added at time t
//   bound   centers y         covering size and coupled bound after a step

inline void write_dual_k_csv(std::ostream& os, const DualKTrajectory& traj, int d) {
  os << "t,kind,payload\n";
  auto dump = [&](double t, const AtomSet& s) {
    for (const auto& p : s.atoms) os << format_double(t) << ",atom," << format_point(p, d, ' ') << '\n';
  };
  dump(0.0, traj.initial);
  for (const auto& j : traj.jumps) dump(j.t, j.atoms);
}

inline void write_ball_trajectory_csv(std::ostream& os, const BallUnionTrajectory& traj, int d) {
  os << "t,kind,payload\n";
  for (const auto& b : traj.initial.balls())
    os << "0,initial," << format_point(b.center, d, ' ') << ' ' << format_double(b.radius) << '\n';
  for (const auto& a : traj.accepted)
    os << format_double(a.t) << ",ball," << format_point(a.ball.center, d, ' ') << ' '
       << format_double(a.ball.radius) << '\n';
}

inline void write_covering_csv(std::ostream& os, const CoveringTrajectory& cov) {
  os << "t,kind,payload\n";
  for (std::size_t i = 0; i < cov.centers.size(); ++i)
    os << format_double(cov.center_time[i]) << ",center,"
       << format_point(cov.centers[i], cov.dim, ' ') << '\n';
  os << "0,bound," << cov.initial_count << ' ' << cov.initial_count << '\n';
  for (const auto& s : cov.steps)
    os << format_double(s.t) << ",bound," << s.centers_after << ' ' << s.bound_after << '\n';
}

}  // namespace slfv
