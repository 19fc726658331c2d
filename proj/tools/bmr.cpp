// bmr: Bayesian Mendelian randomization from the command line.
//
//   bmr fit DATASET.csv [--config run.json] --out DIR [--seed N] [--threads N]
//   bmr wme DATASET.csv [--config run.json] --out FILE.json [--seed N] [--threads N]
//   bmr simulate --config study.json --out DIR [--seed N] [--threads N]
//
// Exit codes: 0 success, 2 input error, 3 unreliable inference.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bmr/cli/commands.hpp"

namespace {

void add_common(CLI::App* cmd, bmr::cli::Invocation& inv, std::uint64_t& seed, std::string& config,
                std::string& out) {
  cmd->add_option("--config", config, "JSON run configuration");
  cmd->add_option("--out", out, "output location (overrides paths.out)");
  cmd->add_option("--seed", seed, "root random seed (overrides the config)");
  cmd->add_option("--threads", inv.threads, "worker threads")->check(CLI::Range(1, 4096));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian Mendelian randomization with pleiotropic instruments"};
  app.require_subcommand(1);

  bmr::cli::Invocation inv;
  std::uint64_t seed = 0;
  std::string config, out, dataset;

  auto* fit = app.add_subcommand("fit", "fit the Bayesian model to a dataset");
  fit->add_option("dataset", dataset, "dataset CSV (overrides paths.dataset)");
  add_common(fit, inv, seed, config, out);

  auto* wme = app.add_subcommand("wme", "weighted median estimate with a bootstrap interval");
  wme->add_option("dataset", dataset, "dataset CSV (overrides paths.dataset)");
  add_common(wme, inv, seed, config, out);

  auto* sim = app.add_subcommand("simulate", "run a simulation study");
  add_common(sim, inv, seed, config, out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bmr::cli::kInputError;
  }

  auto* used = app.get_subcommands().front();
  if (used->count("--config") > 0) inv.config_path = config;
  if (used->count("--out") > 0) inv.out_path = out;
  if (used->count("--seed") > 0) inv.seed = seed;
  if (used != sim && used->count("dataset") > 0) inv.dataset_path = dataset;

  if (used == fit) return bmr::cli::cmd_fit(inv, std::cerr);
  if (used == wme) return bmr::cli::cmd_wme(inv, std::cerr);
  return bmr::cli::cmd_simulate(inv, std::cerr);
}
