// slfv: command-line front end.
//
//   slfv <command> [--config FILE] [--set key=value ...] [--out DIR]
//   slfv replay MANIFEST [--out DIR]

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slfv/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace cli = slfv::cli;
  CLI::App app{"Spatial Lambda-Fleming-Viot simulator with k and infinity parents"};
  app.set_version_flag("--version", SLFV_VERSION);
  app.require_subcommand(1);

  std::string config_file, out_dir = ".", manifest;
  std::vector<std::string> sets;
  std::string chosen;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config,-c", config_file, "flat key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--set,-s", sets, "override one key: key=value (repeatable)");
    sub->add_option("--out,-o", out_dir, "output directory (created if missing)");
  };

  const std::vector<std::pair<std::string, std::string>> help{
      {"gen-events", "generate a seeded event log (events.csv)"},
      {"forward-k", "k-parent density at points x by ancestry tracing (forward_k.csv, ancestors.csv)"},
      {"forward-inf", "infinity-parent growth of e0 on an event log (trajectory.csv)"},
      {"dual-k", "k-parent ancestral process from atoms x (trajectory.csv)"},
      {"dual-inf", "infinity-parent ancestral region from e0, optional covering (trajectory.csv, covering.csv)"},
      {"duality-k", "two-sided Monte Carlo check of the k-parent duality (duality.csv)"},
      {"duality-inf", "two-sided Monte Carlo check of the infinity-parent self-duality (duality.csv)"},
      {"audit-coupling", "monotone coupling and embedding audit across k (audit.csv)"},
      {"convergence", "disagreement with the largest k of a schedule (convergence.csv)"},
      {"growth", "exploratory infinity-parent growth statistics (growth.csv)"},
      {"check-mu", "radius condition verdict for mu (condition.csv); exit 0 holds, 1 fails, 2 inconclusive"},
  };
  for (const auto& [name, text] : help) {
    auto* sub = app.add_subcommand(name, text);
    add_common(sub);
    sub->callback([&chosen, name = name] { chosen = name; });
  }
  auto* rep = app.add_subcommand("replay", "rerun the command recorded in a manifest.txt");
  rep->add_option("manifest", manifest, "manifest file")->required()->check(CLI::ExistingFile);
  rep->add_option("--out,-o", out_dir, "output directory (created if missing)");
  rep->callback([&] { chosen = "replay"; });

  CLI11_PARSE(app, argc, argv);

  if (chosen == "replay") return cli::replay(manifest, out_dir, std::cout, std::cerr);

  cli::Config cfg;
  try {
    if (!config_file.empty()) cfg = cli::Config(cli::Config::parse_file(config_file));
    for (const auto& s : sets) cfg.set(s);
    if (cfg.has(cli::kCommandKey) || cfg.has(cli::kVersionKey))
      throw slfv::ConfigError("config contains manifest keys; use 'slfv replay' for manifests");
  } catch (const std::exception& e) {
    std::cerr << "slfv: " << e.what() << '\n';
    return cli::kExitConfig;
  }
  return cli::run_command(chosen, std::move(cfg), out_dir, std::cout, std::cerr);
}
