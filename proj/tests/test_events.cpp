#include <catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "slfv/events.hpp"
#include "slfv/stats.hpp"

using namespace slfv;

namespace {

std::string dump(const EventLog& log) {
  std::ostringstream os;
  write_event_log(os, log);
  return os.str();
}

}  // namespace

TEST_CASE("event counts are Poisson with the product intensity") {
  // Enlarged box [-1, 1], mass 1, t_max 3: mean 6.
  const SpaceTimeBox box = SpaceTimeBox::cube(1, 3.0, 0.5, 0.5);
  const auto mu = RadiusMeasure::fixed(0.5);
  REQUIRE(expected_event_count(box, mu) == 6.0);
  std::vector<double> counts(10000);
  for (std::size_t i = 0; i < counts.size(); ++i)
    counts[i] = static_cast<double>(generate_event_log(box, mu, hash_combine(1, i)).events.size());
  const auto m = mean_se(counts);
  REQUIRE(std::abs(m.mean - 6.0) <= 3.0 * std::sqrt(6.0 / counts.size()));
  // Poisson: variance equals the mean.
  double var = 0.0;
  for (double c : counts) var += (c - m.mean) * (c - m.mean);
  var /= counts.size() - 1;
  REQUIRE(std::abs(var - 6.0) < 0.5);
}

TEST_CASE("generation is deterministic and the CSV round-trips") {
  const SpaceTimeBox box = SpaceTimeBox::cube(2, 1.5, 3.0, 1.0);
  const auto mu = RadiusMeasure::mixture({{0.5, 1.0}, {1.0, 0.5}});
  const auto a = generate_event_log(box, mu, 0xC0FFEE);
  const auto b = generate_event_log(box, mu, 0xC0FFEE);
  REQUIRE(dump(a) == dump(b));
  REQUIRE(dump(a) != dump(generate_event_log(box, mu, 0xC0FFEF)));
  std::istringstream is(dump(a));
  const auto back = read_event_log(is);
  REQUIRE(back.events == a.events);
  REQUIRE(back.master_seed == a.master_seed);
  REQUIRE(back.box.half_width == a.box.half_width);
  REQUIRE(dump(back) == dump(a));
}

TEST_CASE("log order is strict in (t, seed) and seeds are unique") {
  const auto log = generate_event_log(SpaceTimeBox::cube(2, 2.0, 4.0, 1.0), RadiusMeasure::fixed(1.0), 5);
  REQUIRE(log.events.size() > 100);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    seeds.insert(log.events[i].seed);
    if (i > 0) REQUIRE(event_order(log.events[i - 1], log.events[i]));
    REQUIRE(log.events[i].t > 0.0);
    REQUIRE(log.box.enlarged_contains(log.events[i].center));
  }
  REQUIRE(seeds.size() == log.events.size());
}

TEST_CASE("a fixed point is covered at the point event rate") {
  const auto mu = RadiusMeasure::fixed(1.0);
  const SpaceTimeBox box = SpaceTimeBox::cube(1, 1.0, 2.0, 1.0);
  std::vector<double> hits(10000);
  const Point x{{0.3, 0.0, 0.0}};
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const auto log = generate_event_log(box, mu, hash_combine(77, i));
    hits[i] = static_cast<double>(std::count_if(log.events.begin(), log.events.end(),
                                                [&](const ReproductionEvent& e) { return e.covers(x); }));
  }
  const auto m = mean_se(hits);
  REQUIRE(std::abs(m.mean - 2.0) <= 3.0 * m.se);
}

TEST_CASE("potential parents") {
  ReproductionEvent e{0.5, {{1.0, 2.0, 0.0}}, 2.0, 0x1234};
  SECTION("deterministic and shared across k") {
    REQUIRE(parent_offset(e, 1, 2) == parent_offset(e, 1, 2));
    REQUIRE(parent_offset(e, 3, 2) == parent_offset(e, 3, 2));
    REQUIRE(parent_offset(e, 1, 2) != parent_offset(e, 2, 2));
    REQUIRE(parent_location(e, 2, 2) == e.center + 2.0 * parent_offset(e, 2, 2));
  }
  SECTION("uniform on the unit ball: mean norm d/(d+1)") {
    for (int d = 1; d <= 3; ++d) {
      // Radial density of the uniform ball is d r^(d-1).
      const double expected = oracle::integrate([d](double r) { return r * d * std::pow(r, d - 1); }, 0.0, 1.0);
      std::vector<double> norms(100000);
      for (std::size_t i = 0; i < norms.size(); ++i) {
        ReproductionEvent f{1.0, {}, 1.0, hash_combine(42, i)};
        norms[i] = norm(parent_offset(f, 1, d));
        REQUIRE(norms[i] <= 1.0);
      }
      const auto m = mean_se(norms);
      INFO("d=" << d);
      if (d == 2) REQUIRE(expected == Catch::Approx(2.0 / 3.0));
      REQUIRE(std::abs(m.mean - expected) <= 3.0 * m.se);
    }
  }
  SECTION("unused coordinates stay zero") {
    for (int n = 1; n < 50; ++n) {
      const Point p = parent_offset(e, n, 2);
      REQUIRE(p[2] == 0.0);
    }
  }
  SECTION("offsets of distinct events are uncorrelated") {
    const int n = 50000;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
      ReproductionEvent a{1.0, {}, 1.0, hash_combine(9, 2 * i)};
      ReproductionEvent b{1.0, {}, 1.0, hash_combine(9, 2 * i + 1)};
      const double x = parent_offset(a, 1, 1)[0], y = parent_offset(b, 1, 1)[0];
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    REQUIRE(std::abs(corr) < 4.0 / std::sqrt(double(n)));
  }
}

TEST_CASE("restriction to a sub-box matches direct generation in law") {
  const auto mu = RadiusMeasure::fixed(0.5);
  const SpaceTimeBox big = SpaceTimeBox::cube(1, 1.0, 5.0, 0.5);
  const SpaceTimeBox sub = SpaceTimeBox::cube(1, 0.5, 1.5, 0.5);
  std::vector<double> n_direct, n_filtered, x_direct, x_filtered;
  for (std::size_t i = 0; i < 4000; ++i) {
    const auto d = generate_event_log(sub, mu, hash_combine(3, i));
    const auto f = restrict_log(generate_event_log(big, mu, hash_combine(4, i)), sub);
    n_direct.push_back(static_cast<double>(d.events.size()));
    n_filtered.push_back(static_cast<double>(f.events.size()));
    for (const auto& e : d.events) x_direct.push_back(e.center[0]);
    for (const auto& e : f.events) x_filtered.push_back(e.center[0]);
  }
  const auto a = mean_se(n_direct), b = mean_se(n_filtered);
  REQUIRE(std::abs(a.mean - b.mean) <= 3.0 * std::sqrt(a.se * a.se + b.se * b.se));
  REQUIRE(std::abs(a.mean - expected_event_count(sub, mu)) <= 3.0 * a.se);
  REQUIRE(ks_two_sample(x_direct, x_filtered).p_value > 0.001);
}

TEST_CASE("event index returns every nearby event") {
  const auto log = generate_event_log(SpaceTimeBox::cube(2, 1.0, 5.0, 1.0), RadiusMeasure::fixed(1.0), 8);
  const EventIndex index(log);
  CounterRng rng(2);
  for (int q = 0; q < 200; ++q) {
    const Point c{{uniform(rng, -6, 6), uniform(rng, -6, 6), 0.0}};
    const double reach = uniform(rng, 0.1, 3.0);
    std::set<std::size_t> got;
    index.for_each_near(c, reach, [&](std::size_t i) { got.insert(i); });
    for (std::size_t i = 0; i < log.events.size(); ++i) {
      const auto& p = log.events[i].center;
      if (std::abs(p[0] - c[0]) <= reach && std::abs(p[1] - c[1]) <= reach) REQUIRE(got.count(i) == 1);
    }
  }
}

TEST_CASE("input validation") {
  REQUIRE_THROWS_AS(generate_event_log(SpaceTimeBox::cube(1, 1.0, 2.0, 0.5), RadiusMeasure::fixed(1.0), 1),
                    ConfigError);
  REQUIRE_THROWS_AS(
      generate_event_log(SpaceTimeBox::cube(1, 1.0, 2.0, 5.0), RadiusMeasure::power_law(1.0, 1, kInf), 1),
      ConfigError);
  REQUIRE_THROWS_AS(generate_event_log(SpaceTimeBox::cube(1, -1.0, 2.0, 1.0), RadiusMeasure::fixed(1.0), 1),
                    ConfigError);
  REQUIRE_NOTHROW(generate_event_log(SpaceTimeBox::cube(1, 0.0, 2.0, 1.0), RadiusMeasure::fixed(1.0), 1));

  const auto log = generate_event_log(SpaceTimeBox::cube(1, 1.0, 2.0, 1.0), RadiusMeasure::fixed(1.0), 1);
  std::string text = dump(log);
  std::istringstream missing_header("t,x1,R,seed_hex\n0.1,0,1,0x1\n");
  REQUIRE_THROWS_AS(read_event_log(missing_header), ConfigError);
  std::istringstream bad_cols(text + "0.5,1\n");
  REQUIRE_THROWS_AS(read_event_log(bad_cols), ConfigError);
  std::istringstream unsorted(text + "0.000001,0,1,0x2\n");
  if (!log.events.empty()) REQUIRE_THROWS_AS(read_event_log(unsorted), ConfigError);
}
