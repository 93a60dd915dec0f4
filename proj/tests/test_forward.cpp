#include <catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "slfv/events.hpp"
#include "slfv/forward.hpp"

using namespace slfv;

namespace {

Point P(double x, double y = 0.0) { return Point{{x, y, 0.0}}; }

EventLog manual_log(int d, std::vector<ReproductionEvent> events, double half_width = 5.0,
                    double r_max = 2.0) {
  EventLog log;
  log.box = SpaceTimeBox::cube(d, 1.0, half_width, r_max);
  log.mu = RadiusMeasure::fixed(r_max);
  log.events = std::move(events);
  std::sort(log.events.begin(), log.events.end(), event_order);
  return log;
}

EventLog golden_log() {
  std::ifstream f(SLFV_GOLDEN_DIR "/two_event_log.csv");
  REQUIRE(f.good());
  return read_event_log(f);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

EventLog random_log(int d, std::uint64_t seed, double t_max = 1.0, double half = 6.0) {
  return generate_event_log(SpaceTimeBox::cube(d, t_max, half, 1.0), RadiusMeasure::fixed(1.0), seed);
}

}  // namespace

TEST_CASE("tracing without covering events keeps the start point") {
  const auto log = manual_log(1, {{0.5, P(3.0), 1.0, 1}});
  REQUIRE(trace_ancestry(P(0.0), 1.0, log, 2) == AtomSet({P(0.0)}));
  const auto empty = manual_log(1, {});
  REQUIRE(trace_ancestry(P(0.7), 1.0, empty, 5) == AtomSet({P(0.7)}));
}

TEST_CASE("one covering event replaces the atom by k parents") {
  const ReproductionEvent e{0.5, P(0.2, -0.1), 1.5, 0xABC};
  const auto log = manual_log(2, {e});
  const auto a = trace_ancestry(P(0.0, 0.0), 1.0, log, 2);
  REQUIRE(a == AtomSet({parent_location(e, 1, 2), parent_location(e, 2, 2)}));
  // Events after t do not act.
  REQUIRE(trace_ancestry(P(0.0, 0.0), 0.4, log, 2) == AtomSet({P(0.0, 0.0)}));
  // The boundary of the ball counts as covered.
  const ReproductionEvent rim{0.5, P(1.0), 1.0, 0x1};
  REQUIRE(trace_ancestry(P(0.0), 1.0, manual_log(1, {rim}), 3).size() == 3);
}

TEST_CASE("golden two-event trace") {
  const auto log = golden_log();
  REQUIRE(log.events.size() == 2);
  const auto& e1 = log.events[0];  // earlier
  const auto& e2 = log.events[1];  // later, covers x
  const Point x = P(0.25);
  // By hand: e2 takes x to its two parents; e1 covers exactly one of them.
  const Point y1 = parent_location(e2, 1, 1), y2 = parent_location(e2, 2, 1);
  REQUIRE(e2.covers(x));
  REQUIRE(e1.covers(y1));
  REQUIRE_FALSE(e1.covers(y2));
  const AtomSet by_hand({y2, parent_location(e1, 1, 1), parent_location(e1, 2, 1)});
  const auto traced = trace_ancestry(x, 1.0, log, 2);
  REQUIRE(traced == by_hand);

  std::string text = "# ancestors of x=0.25 at t=1, k=2\n";
  for (const auto& p : traced.atoms) text += format_double(p[0]) + "\n";
  REQUIRE(text == read_file(SLFV_GOLDEN_DIR "/two_event_trace.txt"));

  SECTION("density against half-lines") {
    // x <= 0 holds the far parent of e2, so the individual is real.
    const GhostDensity left{parse_region("halfspace(1;0)", 1)};
    REQUIRE(density_k_at(x, 1.0, left, log, 2) == 0);
    // x >= 0.8 holds none of the three ancestors.
    const GhostDensity right{parse_region("halfspace(-1;-0.8)", 1)};
    REQUIRE(density_k_at(x, 1.0, right, log, 2) == 1);
    // Between e1's parents and e2's remaining parent.
    const GhostDensity mid{parse_region("halfspace(-1;-0.63)", 1)};
    REQUIRE(density_k_at(x, 1.0, mid, log, 2) == 0);
  }
  SECTION("the log file round-trips byte-exactly") {
    std::ostringstream os;
    write_event_log(os, log);
    REQUIRE(os.str() == read_file(SLFV_GOLDEN_DIR "/two_event_log.csv"));
  }
}

TEST_CASE("absorbing initial densities") {
  const GhostDensity ghost = GhostDensity::all_ghost();
  // x <= 100 covers the box twice over.
  const GhostDensity real{parse_region("halfspace(1,0;100)", 2)};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto log = random_log(2, s);
    CounterRng rng(s);
    for (int q = 0; q < 20; ++q) {
      const Point x = P(uniform(rng, -1, 1), uniform(rng, -1, 1));
      const double t = uniform(rng, 0.0, 0.5);
      for (int k : {2, 5}) {
        REQUIRE(density_k_at(x, t, ghost, log, k) == 1);
        REQUIRE(density_k_at(x, t, real, log, k) == 0);
      }
    }
  }
}

TEST_CASE("embedding and monotone coupling across k") {
  const GhostDensity omega0{parse_region("ball(2,0;1) | halfspace(0,1;-3)", 2)};
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto log = random_log(2, 100 + s, 0.6, 8.0);
    CounterRng rng(s);
    for (int q = 0; q < 10; ++q) {
      const Point x = P(uniform(rng, -1, 1), uniform(rng, -1, 1));
      const double t = uniform(rng, 0.0, 0.6);
      AtomSet prev;
      int prev_bit = 1;
      for (int k : {2, 3, 5, 8}) {
        const auto a = trace_ancestry(x, t, log, k);
        if (k > 2) REQUIRE(prev.subset_of(a));
        const int bit = density_k_at(x, t, omega0, log, k);
        if (k > 2) REQUIRE(bit <= prev_bit);
        prev = a;
        prev_bit = bit;
      }
    }
  }
}

TEST_CASE("flow property through an intermediate time") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const int d = 1 + static_cast<int>(s % 2);
    const auto log = random_log(d, 500 + s, 1.0, 10.0);
    CounterRng rng(s);
    const Point x = d == 1 ? P(uniform(rng, -1, 1)) : P(uniform(rng, -1, 1), uniform(rng, -1, 1));
    const double t = uniform(rng, 0.3, 0.8), mid = uniform(rng, 0.0, t);
    const int k = 2 + static_cast<int>(s % 3);
    const auto direct = trace_ancestry(x, t, log, k);
    const auto at_mid = trace_quenched(AtomSet({x}), t, mid, log, k);
    AtomSet via;
    for (const auto& y : at_mid.atoms) via = atom_union(via, trace_quenched(AtomSet({y}), mid, 0.0, log, k));
    REQUIRE(via == direct);
    REQUIRE(trace_quenched(at_mid, mid, 0.0, log, k) == direct);
  }
}

TEST_CASE("lineages leaving the window raise BoundaryViolation") {
  // A chain of events walking the lineage out of [-1, 1].
  std::vector<ReproductionEvent> evs;
  for (int i = 0; i < 40; ++i) evs.push_back({1.0 - 0.02 * (i + 1), P(0.0), 2.0, static_cast<std::uint64_t>(i + 1)});
  const auto log = manual_log(1, evs, 1.0, 2.0);
  REQUIRE_THROWS_AS(trace_ancestry(P(0.0), 1.0, log, 4), BoundaryViolation);
  REQUIRE_THROWS_AS(trace_ancestry(P(1.5), 0.5, log, 2), BoundaryViolation);
  REQUIRE_THROWS_AS(trace_ancestry(P(0.0), 2.0, log, 2), ConfigError);
  REQUIRE_THROWS(trace_ancestry(P(0.0), 0.5, log, 1));
}

TEST_CASE("forward infinity-parent growth") {
  const RegionSet e0 = parse_region("ball(0;1)", 1);
  SECTION("no event meets E0") {
    const auto log = manual_log(1, {{0.3, P(3.5), 1.0, 1}});
    const auto traj = run_forward_inf(e0, 1.0, log);
    REQUIRE(traj.accepted.empty());
    REQUIRE(traj.state_at(1.0) == e0);
  }
  SECTION("an overlapping event is accepted at its time") {
    const auto log = manual_log(1, {{0.3, P(1.5), 1.0, 1}});
    const auto traj = run_forward_inf(e0, 1.0, log);
    REQUIRE(traj.accepted.size() == 1);
    REQUIRE(traj.accepted[0].t == 0.3);
    REQUIRE(traj.state_at(0.29) == e0);
    REQUIRE(traj.state_at(0.3).size() == 2);
  }
  SECTION("tangent events are rejected") {
    const auto log = manual_log(1, {{0.3, P(2.0), 1.0, 1}});
    REQUIRE(run_forward_inf(e0, 1.0, log).accepted.empty());
  }
  SECTION("chains need the intermediate ball first") {
    const auto log = manual_log(1, {{0.2, P(3.2), 1.0, 1}, {0.4, P(1.6), 1.0, 2}, {0.6, P(3.2), 1.0, 3}});
    const auto traj = run_forward_inf(e0, 1.0, log);
    REQUIRE(traj.accepted.size() == 2);
    REQUIRE(traj.accepted[0].event_index == 1);
    REQUIRE(traj.accepted[1].event_index == 2);
  }
  SECTION("states grow along random logs") {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto log = random_log(2, 900 + s, 0.5, 10.0);
      const auto traj = run_forward_inf(parse_region("ball(0,0;1)", 2), 0.5, log);
      double last = 0.0;
      for (std::size_t i = 0; i < traj.accepted.size(); ++i) {
        REQUIRE(traj.accepted[i].t >= last);
        last = traj.accepted[i].t;
        // Each accepted ball met the state before it.
        RegionSet before = traj.state_at(traj.accepted[i].t);
        before.shapes.pop_back();
        REQUIRE(ball_hits_region(traj.accepted[i].ball, before));
      }
      for (double a : {0.1, 0.2, 0.3, 0.4})
        REQUIRE(traj.state_at(a).size() <= traj.state_at(a + 0.1).size());
    }
  }
  SECTION("errors") {
    const auto log = manual_log(1, {{0.3, P(4.5), 1.0, 1}}, 5.0, 1.0);
    REQUIRE_THROWS_AS(run_forward_inf(parse_region("ball(4;1)", 1), 1.0, log), BoundaryViolation);
    REQUIRE_THROWS_AS(run_forward_inf(parse_region("ball(0;1)", 1), 2.0, log), ConfigError);
    REQUIRE_THROWS(run_forward_inf(RegionSet{}, 1.0, log));
    REQUIRE_THROWS_AS(run_forward_inf(parse_region("halfspace(1;0)", 1), 1.0, log), BoundaryViolation);
  }
}

TEST_CASE("monotone stabilization") {
  const auto log = random_log(1, 4242, 1.0, 12.0);
  SECTION("all-ghost start stays one") {
    const auto r = monotone_stabilize(P(0.1), 0.8, GhostDensity::all_ghost(), log, {2, 4, 8, 16});
    REQUIRE(r.bits == std::vector<int>{1, 1, 1, 1});
    REQUIRE(r.stabilized);
    REQUIRE_FALSE(r.reached_zero);
  }
  SECTION("schedule validation") {
    REQUIRE_THROWS(monotone_stabilize(P(0), 0.5, {}, log, {3, 2}));
    REQUIRE_THROWS(monotone_stabilize(P(0), 0.5, {}, log, {1, 2}));
    REQUIRE_THROWS(monotone_stabilize(P(0), 0.5, {}, log, {}));
  }
  SECTION("agrees with the forward growth on the same log") {
    const RegionSet e0 = parse_region("ball(0;1)", 1);
    const GhostDensity omega0{e0};
    std::size_t probes = 0, caveats = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
      const auto lg = random_log(1, 7000 + s, 0.5, 12.0);
      const auto traj = run_forward_inf(e0, 0.5, lg);
      CounterRng rng(s);
      for (int q = 0; q < 25; ++q) {
        const Point x = P(uniform(rng, -4, 4));
        const double t = uniform(rng, 0.0, 0.5);
        const auto r = monotone_stabilize(x, t, omega0, lg, {2, 4, 8, 16, 64, 256});
        for (std::size_t i = 1; i < r.bits.size(); ++i) REQUIRE(r.bits[i] <= r.bits[i - 1]);
        const bool real = traj.state_at(t).contains(x);
        ++probes;
        if (r.reached_zero) REQUIRE(real);
        if (!real) REQUIRE(r.estimate == 1);
        if (real && !r.reached_zero) ++caveats;
      }
    }
    // A real point whose 256 parents all missed the state is possible but rare.
    REQUIRE(caveats * 50 <= probes);
  }
}
