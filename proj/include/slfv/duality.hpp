#pragma once

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "slfv/ancestry.hpp"
#include "slfv/dual.hpp"
#include "slfv/events.hpp"
#include "slfv/forward.hpp"
#include "slfv/geometry.hpp"
#include "slfv/radius_measure.hpp"
#include "slfv/stats.hpp"

namespace slfv {

// Product of the ghost density over the atoms.
inline int D(const GhostDensity& omega0, const AtomSet& xi) {
  for (const auto& p : xi.atoms)
    if (omega0(p) == 0) return 0;
  return 1;
}

// 1 iff E meets the real region in a null set.
inline int D_tilde(const GhostDensity& omega0, const RegionSet& e) {
  return regions_overlap(e, omega0.real_region) ? 0 : 1;
}

// l i.i.d. uniform points in a window.
struct UniformPsi {
  Window window;
  int l = 2;

  std::vector<Point> sample(CounterRng& rng) const {
    std::vector<Point> pts;
    for (int j = 0; j < l; ++j) pts.push_back(window.sample(rng));
    return pts;
  }
};

struct DualityReport {
  std::string kind;  // "k" or "inf"
  int k = 0;
  int d = 1;
  double t = 0.0;
  std::string mu;
  std::string real_region;
  std::string e0;  // E0 for "inf", the sampling window for "k"
  std::uint64_t seed = 0;
  std::uint64_t seed_used = 0;
  int attempts = 1;
  MeanSe lhs, rhs;
  double z = 0.0;
  double p_value = 1.0;
  bool pass = false;

  double combined_se() const { return std::sqrt(lhs.se * lhs.se + rhs.se * rhs.se); }
};

namespace detail {
inline constexpr std::uint64_t kPsiStream = 0x707369ULL;   // "psi"
inline constexpr std::uint64_t kLhsStream = 0x6C6873ULL;   // "lhs"
inline constexpr std::uint64_t kRhsStream = 0x726873ULL;   // "rhs"
inline constexpr std::uint64_t kRetryStream = 0x7274ULL;   // "rt"

inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t stream, std::size_t i) {
  return hash_combine(hash_combine(seed, stream), i);
}

// |L - R| <= 3 combined SE.
inline void judge(DualityReport& r) {
  const double diff = r.lhs.mean - r.rhs.mean;
  const double se = r.combined_se();
  if (se > 0.0) {
    r.z = diff / se;
    r.p_value = normal_two_sided_p(r.z);
  } else {
    r.z = 0.0;
    r.p_value = diff == 0.0 ? 1.0 : 0.0;
  }
  r.pass = std::abs(diff) <= 3.0 * se;
}

inline SpaceTimeBox horizon(SpaceTimeBox box, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");
  box.t_max = t;
  return box;
}

template <class Run>
DualityReport with_retry(Run&& run, std::uint64_t seed, bool retry) {
  DualityReport r = run(seed);
  r.seed = seed;
  r.seed_used = seed;
  if (!r.pass && retry) {
    const std::uint64_t fresh = hash_combine(seed, kRetryStream);
    r = run(fresh);
    r.seed = seed;
    r.seed_used = fresh;
    r.attempts = 2;
  }
  return r;
}

}  // namespace detail

// k-parent duality. Replica i draws one Psi sample and evaluates both sides
// on it: the left with a fresh event log traced by density_k_at, the right
// with an independent mu-driven dual-k run. Log and dual use unrelated
// streams, so the sides differ only through the dynamics.
inline DualityReport check_duality_k(const GhostDensity& omega0, const UniformPsi& psi, int k,
                                     double t, const RadiusMeasure& mu, const SpaceTimeBox& box,
                                     std::size_t n_replicas, std::uint64_t seed, bool retry = true) {
  detail::require_k(k);
  if (n_replicas == 0) throw std::invalid_argument("n_replicas must be > 0");
  const SpaceTimeBox lhs_box = detail::horizon(box, t);
  check_log_inputs(lhs_box, mu);
  const int d = box.dim;
  auto run = [&](std::uint64_t s) {
    std::vector<char> lhs(n_replicas), rhs(n_replicas);
    parallel_for_replicas(n_replicas, [&](std::size_t i) {
      CounterRng prng(detail::replica_seed(s, detail::kPsiStream, i));
      const auto pts = psi.sample(prng);
      const EventLog log =
          generate_event_log(lhs_box, mu, detail::replica_seed(s, detail::kLhsStream, i));
      int v = 1;
      for (const auto& x : pts) v &= density_k_at(x, t, omega0, log, k);
      lhs[i] = static_cast<char>(v);
      CounterRng drng(detail::replica_seed(s, detail::kRhsStream, i));
      rhs[i] = static_cast<char>(D(omega0, simulate_dual_k(AtomSet(pts), t, mu, d, k, drng)));
    });
    DualityReport r;
    r.kind = "k";
    r.k = k;
    r.d = d;
    r.t = t;
    r.mu = mu.describe();
    r.real_region = format_region(omega0.real_region, d);
    Window w = psi.window;
    r.e0 = "uniform(" + format_point(w.lo, d) + ';' + format_point(w.hi, d) + ")^" +
           std::to_string(psi.l);
    std::uint64_t hl = 0, hr = 0;
    for (std::size_t i = 0; i < n_replicas; ++i) {
      hl += lhs[i];
      hr += rhs[i];
    }
    r.lhs = proportion(hl, n_replicas);
    r.rhs = proportion(hr, n_replicas);
    detail::judge(r);
    return r;
  };
  return detail::with_retry(run, seed, retry);
}

// infinity-parent self-duality: forward growth of the real region tested
// against E0, versus the mu-driven dual from E0 tested against the real
// region. Both runs stop as soon as the outcome is 0.
inline DualityReport check_duality_inf(const GhostDensity& omega0, const RegionSet& e0, double t,
                                       const RadiusMeasure& mu, const SpaceTimeBox& box,
                                       std::size_t n_replicas, std::uint64_t seed,
                                       bool retry = true) {
  if (n_replicas == 0) throw std::invalid_argument("n_replicas must be > 0");
  const int d = box.dim;
  const SpaceTimeBox lhs_box = detail::horizon(box, t);
  check_log_inputs(lhs_box, mu);
  detail::require_balls(e0);
  if (omega0.real_region.empty())
    throw ConfigError("duality-inf needs a nonempty real region");
  if (!mu.has_bounded_support() ||
      check_condition_strong(mu, d, mu.sup_support(), 1000, 1e-6).verdict != Verdict::holds)
    throw ConfigError("radius condition does not hold at R~ = sup support");
  const bool overlap0 = regions_overlap(omega0.real_region, e0);
  auto run = [&](std::uint64_t s) {
    std::vector<char> lhs(n_replicas, 0), rhs(n_replicas, 0);
    if (!overlap0) {
      parallel_for_replicas(n_replicas, [&](std::size_t i) {
        const EventLog log =
            generate_event_log(lhs_box, mu, detail::replica_seed(s, detail::kLhsStream, i));
        bool hit = false;
        run_forward_inf_until(omega0.real_region, t, log, [&](const Ball& b) {
          hit = ball_hits_region(b, e0);
          return hit;
        });
        lhs[i] = hit ? 0 : 1;
        CounterRng drng(detail::replica_seed(s, detail::kRhsStream, i));
        bool hit_dual = false;
        simulate_dual_inf(e0, t, mu, d, drng, [&](double, const Ball& b) {
          hit_dual = ball_hits_region(b, omega0.real_region);
          return !hit_dual;
        });
        rhs[i] = hit_dual ? 0 : 1;
      });
    }
    DualityReport r;
    r.kind = "inf";
    r.d = d;
    r.t = t;
    r.mu = mu.describe();
    r.real_region = format_region(omega0.real_region, d);
    r.e0 = format_region(e0, d);
    std::uint64_t hl = 0, hr = 0;
    for (std::size_t i = 0; i < n_replicas; ++i) {
      hl += lhs[i];
      hr += rhs[i];
    }
    r.lhs = proportion(hl, n_replicas);
    r.rhs = proportion(hr, n_replicas);
    detail::judge(r);
    return r;
  };
  return detail::with_retry(run, seed, retry);
}

inline void write_duality_csv_header(std::ostream& os) {
  os << "kind,d,k,t,n,lhs,se_lhs,rhs,se_rhs,z,p_value,verdict,attempts,seed,seed_used\n";
}

inline void write_duality_csv_row(std::ostream& os, const DualityReport& r) {
  os << r.kind << ',' << r.d << ',' << (r.kind == "k" ? std::to_string(r.k) : std::string("inf"))
     << ',' << format_double(r.t) << ',' << r.lhs.n << ',' << format_double(r.lhs.mean) << ','
     << format_double(r.lhs.se) << ',' << format_double(r.rhs.mean) << ','
     << format_double(r.rhs.se) << ',' << format_double(r.z) << ',' << format_double(r.p_value)
     << ',' << (r.pass ? "pass" : "fail") << ',' << r.attempts << ',' << format_hex(r.seed) << ','
     << format_hex(r.seed_used) << '\n';
}

inline std::string summarize(const DualityReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s-duality d=%d%s t=%g n=%zu: lhs=%.6f+-%.6f rhs=%.6f+-%.6f z=%.3f p=%.4f -> %s",
                r.kind.c_str(), r.d, r.kind == "k" ? (" k=" + std::to_string(r.k)).c_str() : "",
                r.t, r.lhs.n, r.lhs.mean, r.lhs.se, r.rhs.mean, r.rhs.se, r.z, r.p_value,
                r.pass ? "pass" : "fail");
  return buf;
}

}  // namespace slfv
