// Throughput of k-parent ancestry tracing on one synthetic log, single
// threaded. Prints CSV: k,events,probes,seconds,probes_per_sec,mean_ancestors,escaped

#include <chrono>
#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "slfv/experiments.hpp"

int main(int argc, char** argv) {
  using namespace slfv;
  CLI::App app{"bench_trace: probes per second for density_k_at"};
  std::size_t n_events = 20000, n_probes = 2000;
  std::uint64_t seed = 1;
  int repeats = 1;
  app.add_option("--events", n_events, "expected number of events in the log");
  app.add_option("--probes", n_probes, "probes per k");
  app.add_option("--seed", seed, "log and probe seed");
  app.add_option("--repeats", repeats, "timed passes per k (the fastest is reported)")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  // d = 2, R = 1, t_max = 1: the enlarged box (2(L + 1))^2 holds n_events on average.
  const auto mu = RadiusMeasure::fixed(1.0);
  const double half = std::max(4.0, 0.5 * std::sqrt(static_cast<double>(n_events)) - 1.0);
  EventLog log;
  if (n_events == 0) {
    log.box = SpaceTimeBox::cube(2, 1.0, half, 1.0);
    log.mu = mu;
  } else {
    log = generate_event_log(SpaceTimeBox::cube(2, 1.0, half, 1.0), mu, seed);
  }
  // Short look-backs near the center keep k = 32 lineages inside small boxes.
  const auto probes = sample_probes(Window::cube(2, 0.25 * half), 0.25, n_probes, hash_combine(seed, 1));
  const GhostDensity omega0{parse_region("halfspace(1,0;0)", 2)};

  std::cout << "k,events,probes,seconds,probes_per_sec,mean_ancestors,escaped\n";
  for (int k : {2, 8, 32}) {
    double best = HUGE_VAL;
    std::size_t atoms = 0, escaped = 0;
    for (int r = 0; r < repeats; ++r) {
      atoms = escaped = 0;
      int sink = 0;
      const auto t0 = std::chrono::steady_clock::now();
      for (const auto& p : probes) {
        try {
          const auto a = trace_ancestry(p.x, p.t, log, k);
          atoms += a.size();
          sink += D(omega0, a);
        } catch (const BoundaryViolation&) {
          ++escaped;
        }
      }
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      best = std::min(best, s);
      if (sink < 0) std::cerr << sink;
    }
    const double rate = best > 0.0 ? static_cast<double>(probes.size()) / best : HUGE_VAL;
    const std::size_t traced = probes.size() - escaped;
    std::cout << k << ',' << log.events.size() << ',' << probes.size() << ',' << format_double(best) << ','
              << format_double(rate) << ','
              << format_double(traced ? static_cast<double>(atoms) / traced : 0.0) << ',' << escaped << '\n';
  }
  return 0;
}
