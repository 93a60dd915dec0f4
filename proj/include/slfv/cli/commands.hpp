#pragma once

// Subcommands of the slfv tool. Each one reads its whole configuration,
// writes manifest.txt, then its artifacts, and returns the exit code.

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "slfv/cli/config.hpp"
#include "slfv/slfv.hpp"

#ifndef SLFV_VERSION
#define SLFV_VERSION "0.0.0"
#endif

namespace slfv::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitInconclusive = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitBoundary = 4;
inline constexpr int kExitRuntime = 5;

class RunContext {
 public:
  RunContext(std::string command, Config cfg, std::filesystem::path out, std::ostream& console)
      : command_(std::move(command)), cfg_(std::move(cfg)), out_(std::move(out)), console_(console) {}

  Config& cfg() { return cfg_; }

  // Call once every key has been read.
  void begin() {
    cfg_.reject_unused();
    std::filesystem::create_directories(out_);
    std::ofstream m(out_ / "manifest.txt");
    m << format_manifest(command_, SLFV_VERSION, cfg_.resolved());
    if (!m) throw std::runtime_error("cannot write " + (out_ / "manifest.txt").string());
  }

  std::ofstream open(const std::string& name) const {
    std::ofstream f(out_ / name);
    if (!f) throw std::runtime_error("cannot write " + (out_ / name).string());
    return f;
  }

  void summary(const std::string& line) {
    summary_ += line + "\n";
    console_ << line << '\n';
  }

  ~RunContext() {
    if (summary_.empty()) return;
    std::ofstream f(out_ / "summary.txt");
    f << summary_;
  }

 private:
  std::string command_;
  Config cfg_;
  std::filesystem::path out_;
  std::ostream& console_;
  std::string summary_;
};

namespace detail {

inline std::string origin_ball(int d, double center_x = 0.0) {
  std::string s = "ball(" + format_double(center_x);
  for (int a = 1; a < d; ++a) s += ",0";
  return s + ";1)";
}

inline std::string origin_point(int d) {
  std::string s = "0";
  for (int a = 1; a < d; ++a) s += ",0";
  return s;
}

// Event log from the `log` file if given, else generated from
// d, mu.*, t_max, box.* and seed.
inline EventLog obtain_log(Config& cfg) {
  if (cfg.has("log")) {
    const std::string path = cfg.str("log", "");
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read event log '" + path + "'");
    return read_event_log(f);
  }
  const int d = cfg.dim();
  const auto mu = cfg.measure(d);
  const auto box = cfg.box(d, mu);
  const auto seed = cfg.seed("seed", 1);
  check_log_inputs(box, mu);
  return generate_event_log(box, mu, seed);
}

inline double run_time(Config& cfg, double t_max) {
  const double t = cfg.real("t", t_max);
  if (!(t >= 0.0) || t > t_max) throw ConfigError("t must lie in [0, t_max]");
  return t;
}

}  // namespace detail

inline int cmd_gen_events(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const int d = cfg.dim();
  const auto mu = cfg.measure(d);
  const auto box = cfg.box(d, mu);
  const auto seed = cfg.seed("seed", 1);
  check_log_inputs(box, mu);
  ctx.begin();
  const auto log = generate_event_log(box, mu, seed);
  auto f = ctx.open("events.csv");
  write_event_log(f, log);
  ctx.summary("gen-events: " + std::to_string(log.events.size()) + " events (expected " +
              format_double(expected_event_count(box, mu)) + ")");
  return kExitOk;
}

inline int cmd_forward_k(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const auto log = detail::obtain_log(cfg);
  const int d = log.dim();
  const double t = detail::run_time(cfg, log.box.t_max);
  const int k = static_cast<int>(cfg.integer("k", 2));
  const auto xs = cfg.points("x", detail::origin_point(d), d);
  const GhostDensity omega0{cfg.region("real_region", "empty", d)};
  ctx.begin();
  auto table = ctx.open("forward_k.csv");
  auto anc = ctx.open("ancestors.csv");
  table << "point,x,t,k,density,ancestors\n";
  anc << "point,x\n";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto a = trace_ancestry(xs[i], t, log, k);
    const int bit = D(omega0, a);
    table << i << ',' << format_point(xs[i], d, ' ') << ',' << format_double(t) << ',' << k << ','
          << bit << ',' << a.size() << '\n';
    for (const auto& p : a.atoms) anc << i << ',' << format_point(p, d, ' ') << '\n';
    ctx.summary("forward-k: x=" + format_point(xs[i], d) + " t=" + format_double(t) + " k=" +
                std::to_string(k) + " density=" + std::to_string(bit) + " ancestors=" +
                std::to_string(a.size()));
  }
  return kExitOk;
}

inline int cmd_forward_inf(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const auto log = detail::obtain_log(cfg);
  const int d = log.dim();
  const double t = detail::run_time(cfg, log.box.t_max);
  const auto e0 = cfg.region("e0", detail::origin_ball(d), d);
  ctx.begin();
  const auto traj = run_forward_inf(e0, t, log);
  auto f = ctx.open("trajectory.csv");
  write_ball_trajectory_csv(f, traj, d);
  ctx.summary("forward-inf: t=" + format_double(t) + " accepted balls=" + std::to_string(traj.accepted.size()));
  return kExitOk;
}

inline int cmd_dual_k(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const std::string driver = cfg.str("driver", "mu");
  DualKTrajectory traj;
  int d = 1;
  if (driver == "log") {
    const auto log = detail::obtain_log(cfg);
    d = log.dim();
    const double t = detail::run_time(cfg, log.box.t_max);
    const int k = static_cast<int>(cfg.integer("k", 2));
    const auto xs = cfg.points("x", detail::origin_point(d), d);
    ctx.begin();
    traj = run_dual_k_quenched(AtomSet(xs), t, log, k);
  } else if (driver == "mu") {
    d = cfg.dim();
    const auto mu = cfg.measure(d);
    const double t = cfg.real("t", 1.0);
    const int k = static_cast<int>(cfg.integer("k", 2));
    const auto xs = cfg.points("x", detail::origin_point(d), d);
    const auto seed = cfg.seed("seed", 1);
    if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
    ctx.begin();
    traj = run_dual_k(AtomSet(xs), t, mu, d, k, seed);
  } else {
    throw ConfigError("driver must be 'mu' or 'log', got '" + driver + "'");
  }
  auto f = ctx.open("trajectory.csv");
  write_dual_k_csv(f, traj, d);
  ctx.summary("dual-k: jumps=" + std::to_string(traj.jumps.size()) + " final atoms=" +
              std::to_string(traj.final_atoms().size()));
  return kExitOk;
}

inline int cmd_dual_inf(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const std::string driver = cfg.str("driver", "mu");
  int d = 1;
  BallUnionTrajectory region;
  std::optional<CoveringTrajectory> covering;
  if (driver == "log") {
    const auto log = detail::obtain_log(cfg);
    d = log.dim();
    const double t = detail::run_time(cfg, log.box.t_max);
    const auto e0 = cfg.region("e0", detail::origin_ball(d), d);
    const double r_tilde = cfg.real("r_tilde", 0.0);
    ctx.begin();
    const EventIndex index(log);
    region = run_dual_inf_on_log(e0, t, log, index);
    if (r_tilde > 0.0) covering = run_covering_on_log(e0, r_tilde, t, log, index);
  } else if (driver == "mu") {
    d = cfg.dim();
    const auto mu = cfg.measure(d);
    const double t = cfg.real("t", 1.0);
    const auto e0 = cfg.region("e0", detail::origin_ball(d), d);
    const double r_tilde = cfg.real("r_tilde", 0.0);
    const auto seed = cfg.seed("seed", 1);
    if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
    ctx.begin();
    if (r_tilde > 0.0) {
      auto run = run_covering_mu(e0, r_tilde, t, mu, d, seed);
      region = std::move(run.dual);
      covering = std::move(run.covering);
    } else {
      region = run_dual_inf(e0, t, mu, d, seed).region;
    }
  } else {
    throw ConfigError("driver must be 'mu' or 'log', got '" + driver + "'");
  }
  auto f = ctx.open("trajectory.csv");
  write_ball_trajectory_csv(f, region, d);
  ctx.summary("dual-inf: accepted balls=" + std::to_string(region.accepted.size()));
  if (covering) {
    auto c = ctx.open("covering.csv");
    write_covering_csv(c, *covering);
    const double end = covering->steps.empty() ? 0.0 : covering->steps.back().t;
    const auto n = covering->count_at(end);
    const auto y = covering->bound_at(end);
    ctx.summary("covering: centers=" + std::to_string(n) + " bound=" + std::to_string(y) +
                (n <= y ? " (within bound)" : " (BOUND EXCEEDED)"));
    if (n > y) return kExitVerdictFailed;
  }
  return kExitOk;
}

inline int write_duality(RunContext& ctx, const DualityReport& r) {
  auto f = ctx.open("duality.csv");
  write_duality_csv_header(f);
  write_duality_csv_row(f, r);
  ctx.summary(summarize(r));
  return r.pass ? kExitOk : kExitVerdictFailed;
}

inline int cmd_duality_k(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const int d = cfg.dim();
  const auto mu = cfg.measure(d);
  const auto box = cfg.box(d, mu);
  const double t = detail::run_time(cfg, box.t_max);
  const int k = static_cast<int>(cfg.integer("k", 2));
  const GhostDensity omega0{cfg.region("real_region", detail::origin_ball(d), d)};
  const UniformPsi psi{Window::cube(d, cfg.real("psi.L", 3.0)), static_cast<int>(cfg.integer("psi.l", 2))};
  const auto n = cfg.integer("n", 10000);
  const auto seed = cfg.seed("seed", 1);
  const bool retry = cfg.integer("retry", 1) != 0;
  if (n <= 0) throw ConfigError("n must be > 0");
  if (psi.l < 1) throw ConfigError("psi.l must be >= 1");
  check_log_inputs(slfv::detail::horizon(box, t), mu);
  ctx.begin();
  return write_duality(ctx, check_duality_k(omega0, psi, k, t, mu, box, static_cast<std::size_t>(n), seed, retry));
}

inline int cmd_duality_inf(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const int d = cfg.dim();
  const auto mu = cfg.measure(d);
  const auto box = cfg.box(d, mu);
  const double t = detail::run_time(cfg, box.t_max);
  const GhostDensity omega0{cfg.region("real_region", detail::origin_ball(d), d)};
  const auto e0 = cfg.region("e0", detail::origin_ball(d, 3.0), d);
  const auto n = cfg.integer("n", 10000);
  const auto seed = cfg.seed("seed", 1);
  const bool retry = cfg.integer("retry", 1) != 0;
  if (n <= 0) throw ConfigError("n must be > 0");
  ctx.begin();
  return write_duality(ctx, check_duality_inf(omega0, e0, t, mu, box, static_cast<std::size_t>(n), seed, retry));
}

inline std::vector<Probe> probes_from(Config& cfg, int d, double t) {
  const auto n = cfg.integer("probes", 1000);
  const double half = cfg.real("probe.L", 2.0);
  const auto seed = cfg.seed("probe_seed", 1);
  if (n <= 0) throw ConfigError("probes must be > 0");
  if (!(half > 0.0)) throw ConfigError("probe.L must be > 0");
  return sample_probes(Window::cube(d, half), t, static_cast<std::size_t>(n), seed);
}

inline int cmd_audit_coupling(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const auto log = detail::obtain_log(cfg);
  const int d = log.dim();
  const double t = detail::run_time(cfg, log.box.t_max);
  const GhostDensity omega0{cfg.region("real_region", detail::origin_ball(d), d)};
  const auto pairs = cfg.k_pairs("k_pairs", "2:3,2:8,3:8");
  const auto probes = probes_from(cfg, d, t);
  ctx.begin();
  const auto a = coupling_audit(omega0, log, probes, pairs);
  auto f = ctx.open("audit.csv");
  f << "probes,comparisons,order_violations,embedding_violations\n"
    << a.probes << ',' << a.comparisons << ',' << a.order_violations << ',' << a.embedding_violations << '\n';
  const bool ok = a.order_violations == 0 && a.embedding_violations == 0;
  ctx.summary("audit-coupling: " + std::to_string(a.comparisons) + " comparisons, " +
              std::to_string(a.order_violations) + " order and " + std::to_string(a.embedding_violations) +
              " embedding violations -> " + (ok ? "pass" : "fail"));
  return ok ? kExitOk : kExitVerdictFailed;
}

inline int cmd_convergence(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const auto log = detail::obtain_log(cfg);
  const int d = log.dim();
  const double t = detail::run_time(cfg, log.box.t_max);
  const GhostDensity omega0{cfg.region("real_region", "halfspace(" + detail::origin_point(d).replace(0, 1, "1") + ";0)", d)};
  const auto ks = cfg.ints("k_schedule", "2,4,8,16,32");
  const auto probes = probes_from(cfg, d, t);
  for (int k : ks)
    if (k < 2) throw ConfigError("k_schedule entries must be >= 2");
  ctx.begin();
  const auto rows = convergence_table(omega0, log, probes, ks);
  auto f = ctx.open("convergence.csv");
  f << "k,disagreements,fraction\n";
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    f << rows[i].k << ',' << rows[i].disagreements << ',' << format_double(rows[i].fraction) << '\n';
    if (i > 0 && rows[i].disagreements > rows[i - 1].disagreements) monotone = false;
  }
  ctx.summary(std::string("convergence: disagreement column ") + (monotone ? "nonincreasing -> pass" : "increases -> fail"));
  ctx.summary("convergence: one-time marginals at the probes only; convergence of whole paths is not checked");
  return monotone ? kExitOk : kExitVerdictFailed;
}

inline int cmd_growth(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const int d = cfg.dim();
  const auto mu = cfg.measure(d);
  const double t = cfg.real("t", 1.0);
  const auto e0 = cfg.region("e0", detail::origin_ball(d), d);
  std::string grid;
  for (int i = 0; i <= 10; ++i) grid += (i ? "," : "") + format_double(t * i / 10.0);
  const auto times = cfg.reals("sample_times", grid);
  const auto n = cfg.integer("n", 200);
  const auto seed = cfg.seed("seed", 1);
  const auto samples = cfg.integer("volume_samples", 20000);
  if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
  if (n <= 0 || samples <= 0) throw ConfigError("n and volume_samples must be > 0");
  ctx.begin();
  const auto c = growth_curve(e0, mu, d, t, static_cast<std::size_t>(n), times, seed,
                              static_cast<std::uint64_t>(samples));
  auto f = ctx.open("growth.csv");
  write_growth_csv(f, c);
  ctx.summary("growth (exploratory): late-time front speed " + format_double(c.slope.mean) + " +- " +
              format_double(c.slope.se) + (c.volumes_monotone ? "" : "; volumes NOT monotone"));
  return c.volumes_monotone ? kExitOk : kExitVerdictFailed;
}

inline int cmd_check_mu(RunContext& ctx) {
  auto& cfg = ctx.cfg();
  const int d = cfg.dim();
  const auto mu = cfg.measure(d);
  const double r_tilde = cfg.real("r_tilde", 0.0);
  const auto grid = cfg.reals("grid", "0.25,0.5,1,2,4,8");
  const int n_max = static_cast<int>(cfg.integer("n_max", 1000));
  const double tol = cfg.real("tail_tol", 1e-6);
  if (n_max < 1) throw ConfigError("n_max must be >= 1");
  ctx.begin();
  ConditionReport rep;
  if (r_tilde > 0.0) {
    rep = check_condition_strong(mu, d, r_tilde, n_max, tol);
  } else {
    const auto found = find_condition_radius(mu, d, grid, n_max, tol);
    rep = found ? *found : check_condition_strong(mu, d, grid.empty() ? 1.0 : grid.back(), n_max, tol);
  }
  auto f = ctx.open("condition.csv");
  f << "n,partial_sum\n";
  for (std::size_t i = 0; i < rep.partial_sums.size(); ++i) f << i + 1 << ',' << format_double(rep.partial_sums[i]) << '\n';
  ctx.summary(std::string("check-mu: ") + mu.describe() + " d=" + std::to_string(d) + " R~=" +
              format_double(rep.r_tilde) + " verdict=" + to_string(rep.verdict) +
              (rep.reason.empty() ? "" : " (" + rep.reason + ")"));
  switch (rep.verdict) {
    case Verdict::holds: return kExitOk;
    case Verdict::fails: return kExitVerdictFailed;
    default: return kExitInconclusive;
  }
}

using Command = std::function<int(RunContext&)>;

inline const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"gen-events", cmd_gen_events},   {"forward-k", cmd_forward_k},
      {"forward-inf", cmd_forward_inf}, {"dual-k", cmd_dual_k},
      {"dual-inf", cmd_dual_inf},       {"duality-k", cmd_duality_k},
      {"duality-inf", cmd_duality_inf}, {"audit-coupling", cmd_audit_coupling},
      {"convergence", cmd_convergence}, {"growth", cmd_growth},
      {"check-mu", cmd_check_mu},
  };
  return table;
}

// Runs one command; configuration and boundary errors become exit codes.
inline int run_command(const std::string& name, Config cfg, const std::filesystem::path& out,
                       std::ostream& console, std::ostream& errors) {
  const auto it = commands().find(name);
  if (it == commands().end()) {
    errors << "slfv: unknown command '" << name << "'\n";
    return kExitConfig;
  }
  try {
    RunContext ctx(name, std::move(cfg), out, console);
    return it->second(ctx);
  } catch (const BoundaryViolation& e) {
    errors << "slfv " << name << ": " << e.what() << '\n';
    return kExitBoundary;
  } catch (const std::invalid_argument& e) {
    errors << "slfv " << name << ": configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    errors << "slfv " << name << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}

// Reruns the command recorded in a manifest.
inline int replay(const std::string& manifest, const std::filesystem::path& out, std::ostream& console,
                  std::ostream& errors) {
  Config cfg;
  try {
    cfg = Config(Config::parse_file(manifest));
  } catch (const std::exception& e) {
    errors << "slfv replay: " << e.what() << '\n';
    return kExitConfig;
  }
  const std::string command = cfg.take(kCommandKey);
  const std::string version = cfg.take(kVersionKey);
  if (command.empty()) {
    errors << "slfv replay: manifest lacks " << kCommandKey << '\n';
    return kExitConfig;
  }
  if (version != SLFV_VERSION)
    errors << "slfv replay: manifest written by version " << version << ", running " << SLFV_VERSION << '\n';
  return run_command(command, std::move(cfg), out, console, errors);
}

}  // namespace slfv::cli
