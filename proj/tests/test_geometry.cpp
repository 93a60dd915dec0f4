#include <catch_amalgamated.hpp>

#include <numbers>

#include "slfv/geometry.hpp"

using namespace slfv;

namespace {
Point P(double x, double y = 0.0, double z = 0.0) { return Point{{x, y, z}}; }
}  // namespace

TEST_CASE("ball versus region overlap") {
  const Ball unit{P(0), 1.0};
  REQUIRE_FALSE(ball_hits_region(unit, RegionSet{{Ball{P(3), 1.0}}}));
  REQUIRE_FALSE(ball_hits_region(unit, RegionSet{{Ball{P(2), 1.0}}}));  // tangent
  REQUIRE(ball_hits_region(unit, RegionSet{{Ball{P(1.999), 1.0}}}));
  // Tangent along the second axis.
  REQUIRE_FALSE(ball_hits_region(Ball{P(0, 0), 1.0}, RegionSet{{Ball{P(0, 2), 1.0}}}));
  // Center on the plane: half the ball inside.
  REQUIRE(ball_hits_region(Ball{P(0, 0), 1.0}, RegionSet{{make_half_space(P(1, 0), 0.0)}}));
  // Tangent to the plane from outside.
  REQUIRE_FALSE(ball_hits_region(Ball{P(1, 0), 1.0}, RegionSet{{make_half_space(P(1, 0), 0.0)}}));
  REQUIRE(ball_hits_region(Ball{P(0.999, 0), 1.0}, RegionSet{{make_half_space(P(1, 0), 0.0)}}));
  REQUIRE_FALSE(ball_hits_region(unit, RegionSet{}));
}

TEST_CASE("half-space pairs") {
  const auto left = make_half_space(P(1, 0), 0.0);   // x <= 0
  const auto right = make_half_space(P(-1, 0), 0.0); // x >= 0
  REQUIRE_FALSE(half_spaces_overlap(left, right));
  REQUIRE(half_spaces_overlap(left, make_half_space(P(-1, 0), 0.5)));
  REQUIRE(half_spaces_overlap(left, make_half_space(P(0, 1), -100.0)));
  REQUIRE(half_spaces_overlap(left, left));
  const auto scaled = make_half_space(P(2, 0), 4.0);
  REQUIRE(scaled.normal == P(1, 0));
  REQUIRE(scaled.offset == 2.0);
  REQUIRE_THROWS(make_half_space(P(0, 0), 1.0));
}

TEST_CASE("overlap is symmetric and monotone") {
  CounterRng rng(1);
  for (int i = 0; i < 5000; ++i) {
    const Ball a{P(uniform(rng, -3, 3), uniform(rng, -3, 3)), uniform(rng, 0.1, 2)};
    const Ball b{P(uniform(rng, -3, 3), uniform(rng, -3, 3)), uniform(rng, 0.1, 2)};
    const Ball c{P(uniform(rng, -3, 3), uniform(rng, -3, 3)), uniform(rng, 0.1, 2)};
    REQUIRE(ball_hits_region(a, RegionSet{{b}}) == ball_hits_region(b, RegionSet{{a}}));
    if (ball_hits_region(a, RegionSet{{b}})) REQUIRE(ball_hits_region(a, RegionSet{{b, c}}));
    REQUIRE(regions_overlap(RegionSet{{a}}, RegionSet{{b, c}}) ==
            (ball_hits_region(a, RegionSet{{b}}) || ball_hits_region(a, RegionSet{{c}})));
  }
}

TEST_CASE("region expansion") {
  const auto e = region_expand(RegionSet{{Ball{P(0), 1.0}}}, 1.0);
  REQUIRE(e == RegionSet{{Ball{P(0), 2.0}}});
  REQUIRE(region_expand(RegionSet{}, 1.0).empty());
  const auto two = region_expand(RegionSet{{Ball{P(0), 1.0}, Ball{P(10), 1.0}}}, 1.0);
  REQUIRE(two.size() == 2);
  REQUIRE_FALSE(regions_overlap(RegionSet{{two.shapes[0]}}, RegionSet{{two.shapes[1]}}));
  const auto h = region_expand(RegionSet{{make_half_space(P(1, 0), 0.0)}}, 0.5);
  REQUIRE(std::get<HalfSpace>(h.shapes[0]).offset == 0.5);
  REQUIRE_THROWS(region_expand(e, 0.0));

  SECTION("agrees with distance to E on random probes") {
    const RegionSet base{{Ball{P(0, 0), 1.0}, Ball{P(2.5, 1), 0.5}, make_half_space(P(0, 1), -3.0)}};
    const double r = 0.7;
    const auto grown = region_expand(base, r);
    CounterRng rng(8);
    for (int i = 0; i < 10000; ++i) {
      const Point x = P(uniform(rng, -4, 5), uniform(rng, -5, 4));
      // Distance from x to each shape, computed directly.
      double dist = 1e300;
      for (const auto& s : base.shapes) {
        if (const auto* b = std::get_if<Ball>(&s))
          dist = std::min(dist, std::max(0.0, norm(x - b->center) - b->radius));
        else {
          const auto& hs = std::get<HalfSpace>(s);
          dist = std::min(dist, std::max(0.0, dot(hs.normal, x) - hs.offset));
        }
      }
      const bool near = dist <= r;
      if (std::abs(dist - r) < 1e-9) continue;
      REQUIRE(ball_hits_region(Ball{x, 1e-12}, grown) == near);
      REQUIRE(grown.contains(x) == near);
    }
  }
}

TEST_CASE("Monte Carlo volume") {
  const auto w = Window::cube(2, 2.0);
  const auto disc = volume_estimate(RegionSet{{Ball{P(0, 0), 1.0}}}, w, 1000000, 17);
  REQUIRE(std::abs(disc.value - std::numbers::pi) <= 3.0 * disc.se);
  const auto empty = volume_estimate(RegionSet{}, w, 100, 17);
  REQUIRE(empty.value == 0.0);
  REQUIRE(empty.se == 0.0);
  const auto twice = volume_estimate(RegionSet{{Ball{P(0, 0), 1.0}, Ball{P(0, 0), 1.0}}}, w, 1000000, 18);
  REQUIRE(std::abs(twice.value - disc.value) <= 3.0 * std::hypot(twice.se, disc.se));
  REQUIRE(volume_estimate(RegionSet{{Ball{P(0, 0), 1.0}}}, w, 1000, 5).value ==
          volume_estimate(RegionSet{{Ball{P(0, 0), 1.0}}}, w, 1000, 5).value);
  REQUIRE_THROWS(volume_estimate(RegionSet{}, w, 0, 1));
}

TEST_CASE("region literals") {
  const auto r = parse_region("ball(0,0;1) | halfspace(1,0;0)", 2);
  REQUIRE(r.size() == 2);
  REQUIRE(std::get<Ball>(r.shapes[0]) == Ball{P(0, 0), 1.0});
  REQUIRE(std::get<HalfSpace>(r.shapes[1]).normal == P(1, 0));
  REQUIRE(parse_region("empty", 2).empty());
  REQUIRE(parse_region("  ", 1).empty());
  REQUIRE(parse_region(format_region(r, 2), 2) == r);
  const auto one = parse_region("ball(1.5;0.25)", 1);
  REQUIRE(std::get<Ball>(one.shapes[0]).center == P(1.5));
  REQUIRE_THROWS(parse_region("ball(0,0;1)", 1));
  REQUIRE_THROWS(parse_region("ball(0;-1)", 1));
  REQUIRE_THROWS(parse_region("cube(0;1)", 1));
  REQUIRE_THROWS(parse_region("ball(0;1", 1));
  REQUIRE_THROWS(parse_region("ball(0)", 1));
  REQUIRE(parse_point("1,2", 2) == P(1, 2));
}
