#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "slfv/ancestry.hpp"
#include "slfv/dual.hpp"
#include "slfv/duality.hpp"
#include "slfv/events.hpp"
#include "slfv/forward.hpp"
#include "slfv/geometry.hpp"
#include "slfv/radius_measure.hpp"
#include "slfv/stats.hpp"

namespace slfv {

struct PointRateResult {
  MeanSe empirical;  // events per unit time covering the origin
  double analytic = 0.0;
  double z = 0.0;
  bool pass = false;
};

// Counts events covering the origin over [0, T] on fresh logs.
inline PointRateResult measure_point_rate(const RadiusMeasure& mu, int d, double t_end,
                                          std::size_t n_replicas, std::uint64_t seed) {
  if (!(t_end > 0.0)) throw std::invalid_argument("T must be > 0");
  if (n_replicas == 0) throw std::invalid_argument("n_replicas must be > 0");
  const double r = mu.sup_support();
  const SpaceTimeBox box = SpaceTimeBox::cube(d, t_end, r, r);
  std::vector<double> rate(n_replicas);
  const Point origin{};
  parallel_for_replicas(n_replicas, [&](std::size_t i) {
    const EventLog log = generate_event_log(box, mu, hash_combine(seed, i));
    std::size_t hits = 0;
    for (const auto& e : log.events)
      if (e.covers(origin)) ++hits;
    rate[i] = static_cast<double>(hits) / t_end;
  });
  PointRateResult res;
  res.empirical = mean_se(rate);
  res.analytic = event_rate_point(mu, d);
  res.z = res.empirical.se > 0.0 ? (res.empirical.mean - res.analytic) / res.empirical.se : 0.0;
  res.pass = std::abs(res.empirical.mean - res.analytic) <= 3.0 * res.empirical.se;
  return res;
}

struct Probe {
  Point x;
  double t = 0.0;
};

// Probes uniform in window x (0, t_max].
inline std::vector<Probe> sample_probes(const Window& window, double t_max, std::size_t n,
                                        std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Probe> out(n);
  for (auto& p : out) {
    p.x = window.sample(rng);
    p.t = t_max * uniform01_open_low(rng);
  }
  return out;
}

struct AuditResult {
  std::size_t probes = 0;
  std::size_t comparisons = 0;
  std::size_t order_violations = 0;      // density at k' exceeds density at k
  std::size_t embedding_violations = 0;  // ancestors at k not among those at k'
};

// Checks, for each pair k <= k' on the shared log, that density_k' <= density_k
// and that the k ancestry is contained in the k' ancestry.
inline AuditResult coupling_audit(const GhostDensity& omega0, const EventLog& log,
                                  const std::vector<Probe>& probes,
                                  const std::vector<std::pair<int, int>>& k_pairs) {
  for (const auto& [k, k2] : k_pairs)
    if (k < 2 || k2 < k) throw std::invalid_argument("k pairs must satisfy 2 <= k <= k'");
  std::vector<AuditResult> per(probes.size());
  parallel_for_replicas(probes.size(), [&](std::size_t i) {
    auto& r = per[i];
    for (const auto& [k, k2] : k_pairs) {
      const AtomSet a = trace_ancestry(probes[i].x, probes[i].t, log, k);
      const AtomSet b = trace_ancestry(probes[i].x, probes[i].t, log, k2);
      ++r.comparisons;
      if (D(omega0, b) > D(omega0, a)) ++r.order_violations;
      if (!a.subset_of(b)) ++r.embedding_violations;
    }
  });
  AuditResult total;
  total.probes = probes.size();
  for (const auto& r : per) {
    total.comparisons += r.comparisons;
    total.order_violations += r.order_violations;
    total.embedding_violations += r.embedding_violations;
  }
  return total;
}

struct ConvergenceRow {
  int k = 2;
  std::size_t disagreements = 0;
  double fraction = 0.0;
};

// Fraction of probes whose density at k differs from the density at the
// largest k of the schedule.
inline std::vector<ConvergenceRow> convergence_table(const GhostDensity& omega0, const EventLog& log,
                                                     const std::vector<Probe>& probes,
                                                     const std::vector<int>& k_schedule) {
  if (k_schedule.empty()) throw std::invalid_argument("k schedule must be nonempty");
  for (std::size_t i = 1; i < k_schedule.size(); ++i)
    if (k_schedule[i] <= k_schedule[i - 1])
      throw std::invalid_argument("k schedule must be strictly increasing");
  std::vector<std::vector<int>> bits(probes.size());
  parallel_for_replicas(probes.size(), [&](std::size_t i) {
    bits[i] = monotone_stabilize(probes[i].x, probes[i].t, omega0, log, k_schedule).bits;
  });
  std::vector<ConvergenceRow> rows;
  for (std::size_t j = 0; j < k_schedule.size(); ++j) {
    ConvergenceRow row{k_schedule[j], 0, 0.0};
    for (const auto& b : bits)
      if (b[j] != b.back()) ++row.disagreements;
    row.fraction = probes.empty() ? 0.0 : static_cast<double>(row.disagreements) / probes.size();
    rows.push_back(row);
  }
  return rows;
}

struct GrowthRow {
  double t = 0.0;
  MeanSe volume;
  MeanSe max_radius;
};

struct GrowthCurve {
  std::vector<GrowthRow> rows;
  MeanSe slope;  // of max radius against t over the second half of the grid
  bool volumes_monotone = true;
};

namespace detail {

inline double max_radius(const std::vector<Ball>& balls, int d) {
  double m = 0.0;
  for (const auto& b : balls) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) s += b.center[a] * b.center[a];
    m = std::max(m, std::sqrt(s) + b.radius);
  }
  return m;
}

inline Window bounding_window(const std::vector<Ball>& balls, int d) {
  Window w;
  w.dim = d;
  for (int a = 0; a < d; ++a) {
    w.lo[a] = std::numeric_limits<double>::infinity();
    w.hi[a] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& b : balls)
    for (int a = 0; a < d; ++a) {
      w.lo[a] = std::min(w.lo[a], b.center[a] - b.radius);
      w.hi[a] = std::max(w.hi[a], b.center[a] + b.radius);
    }
  return w;
}

}  // namespace detail

// Exploratory ensemble statistics of the infinity-parent growth (mu-driven
// dual, equal in law to the forward growth). Volumes at all sample times of
// one replica share the same Monte Carlo points, so they are nondecreasing.
inline GrowthCurve growth_curve(const RegionSet& e0, const RadiusMeasure& mu, int d, double t_end,
                                std::size_t n_replicas, const std::vector<double>& sample_times,
                                std::uint64_t seed, std::uint64_t volume_samples = 20000) {
  if (n_replicas == 0) throw std::invalid_argument("n_replicas must be > 0");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > t_end)
      throw std::invalid_argument("sample times must lie in [0, T]");
    if (i > 0 && sample_times[i] < sample_times[i - 1])
      throw std::invalid_argument("sample times must be nondecreasing");
  }
  const std::size_t m = sample_times.size();
  std::vector<std::vector<double>> vol(n_replicas, std::vector<double>(m));
  std::vector<std::vector<double>> rad(n_replicas, std::vector<double>(m));
  parallel_for_replicas(n_replicas, [&](std::size_t i) {
    const auto run = run_dual_inf(e0, t_end, mu, d, hash_combine(seed, 2 * i));
    const auto final_balls = run.region.final_state().balls();
    const Window w = detail::bounding_window(final_balls, d);
    for (std::size_t j = 0; j < m; ++j) {
      const RegionSet s = run.region.state_at(sample_times[j]);
      vol[i][j] = volume_estimate(s, w, volume_samples, hash_combine(seed, 2 * i + 1)).value;
      rad[i][j] = detail::max_radius(s.balls(), d);
    }
  });
  GrowthCurve curve;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> v(n_replicas), r(n_replicas);
    for (std::size_t i = 0; i < n_replicas; ++i) {
      v[i] = vol[i][j];
      r[i] = rad[i][j];
      if (j > 0 && vol[i][j] < vol[i][j - 1]) curve.volumes_monotone = false;
    }
    curve.rows.push_back({sample_times[j], mean_se(v), mean_se(r)});
  }
  // Least-squares slope per replica over t >= T/2.
  std::vector<std::size_t> late;
  for (std::size_t j = 0; j < m; ++j)
    if (sample_times[j] >= 0.5 * t_end) late.push_back(j);
  if (late.size() >= 2) {
    double tm = 0.0;
    for (auto j : late) tm += sample_times[j];
    tm /= static_cast<double>(late.size());
    double sxx = 0.0;
    for (auto j : late) sxx += (sample_times[j] - tm) * (sample_times[j] - tm);
    std::vector<double> slopes(n_replicas);
    for (std::size_t i = 0; i < n_replicas; ++i) {
      double sxy = 0.0;
      for (auto j : late) sxy += (sample_times[j] - tm) * rad[i][j];
      slopes[i] = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    curve.slope = mean_se(slopes);
  }
  return curve;
}

inline void write_growth_csv(std::ostream& os, const GrowthCurve& c) {
  os << "t,mean_volume,se_volume,mean_max_radius,se_max_radius\n";
  for (const auto& r : c.rows)
    os << format_double(r.t) << ',' << format_double(r.volume.mean) << ','
       << format_double(r.volume.se) << ',' << format_double(r.max_radius.mean) << ','
       << format_double(r.max_radius.se) << '\n';
}

}  // namespace slfv
