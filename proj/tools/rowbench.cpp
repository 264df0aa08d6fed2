// rowbench: learn dynamic right-of-way allocation on a street network.
//
//   rowbench train            train agents against a scenario
//   rowbench evaluate         roll out a checkpoint without exploration
//   rowbench analyze          phase comparisons + learning curves of a run
//   rowbench validate-network check a network file's invariants
//   rowbench gen-scenario     export a calibrated scenario (and demand day)
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime failure.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rowbench/cli/commands.hpp"

using rowbench::cli::RunConfig;

namespace {

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_file) {
  cmd->add_option("--network", cfg.network, "network file path or bundled name");
  cmd->add_option("--scenario", cfg.scenario_id, "scenario id (1=low, 2=high, 3=pedestrian-rich)");
  cmd->add_option("--scenario-file", cfg.scenario_file, "exported scenario spec (overrides --scenario)");
  cmd->add_option("--episodes", cfg.episodes, "number of training episodes");
  cmd->add_option("--seed", cfg.seed, "root random seed");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--config", config_file, "JSON config file (flags override it)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic right-of-way allocation workbench"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_file;

  auto* train = app.add_subcommand("train", "train one agent per edge against a scenario");
  add_common_options(train, cfg, config_file);
  train->add_option("--resume", cfg.resume, "checkpoint JSON to continue from");
  train->add_option("--threads", cfg.train.threads, "worker threads (0 = auto)");
  train->add_option("--checkpoint-every", cfg.train.checkpoint_every,
                    "episodes between checkpoints");
  train->add_option("--critic-scope", [&cfg](const std::vector<std::string>& v) {
    cfg.train.critic_scope = rowbench::rl::critic_scope_from_string(v.at(0));
    return true;
  }, "critic scope: local | neighborhood | global");

  auto* evaluate = app.add_subcommand("evaluate", "run a checkpoint without noise or learning");
  std::string checkpoint;
  int days = 1;
  int scenario_override = 0;
  add_common_options(evaluate, cfg, config_file);
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint JSON to load")->required();
  evaluate->add_option("--days", days, "number of evaluation days");
  evaluate->add_option("--eval-scenario", scenario_override,
                       "override the checkpoint's scenario id");

  auto* analyze = app.add_subcommand("analyze", "summarize a completed run directory");
  std::string run_dir, analyze_out;
  analyze->add_option("--run", run_dir, "run directory (holds manifest.json)")->required();
  analyze->add_option("--out", analyze_out, "output directory (default <run>/analysis)");

  auto* validate = app.add_subcommand("validate-network", "check a network file");
  std::string validate_arg;
  validate->add_option("--network", validate_arg, "network file path or bundled name")->required();

  auto* gen = app.add_subcommand("gen-scenario", "export a calibrated scenario spec");
  std::string gen_out, demand_out;
  add_common_options(gen, cfg, config_file);
  gen->add_option("--demand-out", demand_out, "also export one sampled demand day");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (!config_file.empty()) {
      RunConfig from_file;
      rowbench::cli::load_config_file(config_file, from_file);
      // Flags override the file: re-parse onto the file-loaded defaults.
      from_file.network = cfg.network.empty() ? from_file.network : cfg.network;
      from_file.scenario_id = cfg.scenario_id;
      from_file.scenario_file = cfg.scenario_file;
      from_file.out_dir = cfg.out_dir;
      from_file.seed = cfg.seed;
      from_file.resume = cfg.resume;
      from_file.episodes = cfg.episodes;
      if (train->count("--threads")) from_file.train.threads = cfg.train.threads;
      if (train->count("--checkpoint-every"))
        from_file.train.checkpoint_every = cfg.train.checkpoint_every;
      if (train->count("--critic-scope")) from_file.train.critic_scope = cfg.train.critic_scope;
      cfg = from_file;
    }

    if (*train) return rowbench::cli::cmd_train(cfg);
    if (*evaluate) {
      if (gen_out.empty() && cfg.out_dir.empty()) cfg.out_dir = "eval";
      return rowbench::cli::cmd_evaluate(cfg, checkpoint, days, scenario_override);
    }
    if (*analyze) return rowbench::cli::cmd_analyze(run_dir, analyze_out);
    if (*validate) return rowbench::cli::cmd_validate_network(validate_arg);
    if (*gen) return rowbench::cli::cmd_gen_scenario(cfg, cfg.out_dir.empty() ? gen_out : cfg.out_dir,
                                                     demand_out);
  } catch (const rowbench::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const rowbench::cli::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
