// Command implementations behind the CLI: train, evaluate, analyze,
// validate-network, gen-scenario. Each run owns its output directory; all
// artifacts land there and nothing else is written.

#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rowbench/analysis.hpp"
#include "rowbench/cli/config.hpp"
#include "rowbench/metrics.hpp"
#include "rowbench/net/io.hpp"
#include "rowbench/net/validate.hpp"
#include "rowbench/rl/checkpoint.hpp"
#include "rowbench/rl/train.hpp"
#include "rowbench/scenario.hpp"

namespace rowbench::cli {

// Bad invocation (missing/invalid flags): exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Bad input data (files, networks, checkpoints): exit 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline net::StreetNetwork load_and_validate_network(const std::string& arg) {
  std::string path;
  try {
    path = resolve_network_path(arg);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  net::StreetNetwork network = net::load_network(path);
  const auto violations = net::validate_network(network);
  if (!violations.empty())
    throw DataError("invalid network " + path + ":\n" + net::describe(violations));
  return network;
}

inline scenario::ScenarioSpec make_scenario(const RunConfig& cfg, const net::StreetNetwork& network) {
  if (!cfg.scenario_file.empty()) {
    std::ifstream in(cfg.scenario_file);
    if (!in) throw DataError("cannot open scenario file: " + cfg.scenario_file);
    nlohmann::json j;
    in >> j;
    return scenario::scenario_from_json(j);
  }
  if (cfg.scenario_id < 1 || cfg.scenario_id > 3)
    throw UsageError("scenario must be 1, 2, or 3");
  scenario::ScenarioSpec spec;
  try {
    spec = scenario::build_scenario(cfg.scenario_id, network, cfg.sim.slots_per_day);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }
  spec.parking_propensity = cfg.parking_propensity;
  return spec;
}

inline void write_json_file(const nlohmann::json& j, const std::string& path, int indent = 1) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(indent) << "\n";
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

inline std::string dirname_of(const std::string& path) {
  const auto p = std::filesystem::path(path).parent_path();
  return p.empty() ? std::string(".") : p.string();
}

}  // namespace detail

// ---------------------------------------------------------------- train ---

inline int cmd_train(RunConfig cfg) {
  namespace fs = std::filesystem;
  if (cfg.network.empty()) throw UsageError("train requires --network");
  if (cfg.out_dir.empty()) throw UsageError("train requires --out");

  net::StreetNetwork network = detail::load_and_validate_network(cfg.network);
  scenario::ScenarioSpec spec = detail::make_scenario(cfg, network);

  cfg.train.episodes = cfg.resolved_episodes();
  cfg.train.seed = cfg.seed;

  rl::Trainer trainer(network, spec, cfg.train, cfg.sim, cfg.quant, cfg.projection, cfg.features);

  fs::create_directories(cfg.out_dir);
  const nlohmann::json echo = config_echo(cfg);
  detail::write_json_file(echo, cfg.out_dir + "/config.json");
  detail::write_json_file(scenario::to_json(spec), cfg.out_dir + "/scenario.json");

  nlohmann::json manifest{{"format", "rowbench-run"},
                          {"version", 1},
                          {"command", "train"},
                          {"network", {{"argument", cfg.network}, {"name", network.name()},
                                       {"edges", network.edge_count()}}},
                          {"scenario", spec.id},
                          {"episodes", cfg.train.episodes},
                          {"seed", cfg.seed},
                          {"status", "incomplete"},
                          {"resumed_from", cfg.resume}};
  detail::write_json_file(manifest, cfg.out_dir + "/manifest.json");

  // Prior metrics rows when resuming: everything up to the checkpoint's
  // episode comes from the resumed run's artifacts.
  std::vector<std::string> metric_lines{metrics::kMetricsHeader};
  std::vector<std::string> edge_lines{metrics::kEdgeMetricsHeader};
  if (!cfg.resume.empty()) {
    try {
      load_checkpoint(trainer, cfg.resume);
    } catch (const std::runtime_error& e) {
      throw DataError(e.what());
    }
    const std::string src = detail::dirname_of(cfg.resume);
    const auto old_rows = metrics::read_metrics_csv(src + "/metrics.csv");
    for (const auto& r : old_rows)
      if (r.episode < trainer.episodes_done()) metric_lines.push_back(metrics::to_csv_row(r));
    const auto old_edges = metrics::read_edge_metrics_csv(src + "/edge_metrics.csv");
    for (const auto& r : old_edges)
      if (r.episode < trainer.episodes_done())
        edge_lines.push_back(metrics::to_csv_row(r.episode, r.values));
  }

  auto rewrite = [](const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
  };
  rewrite(cfg.out_dir + "/metrics.csv", metric_lines);
  rewrite(cfg.out_dir + "/edge_metrics.csv", edge_lines);

  std::ofstream metrics_out(cfg.out_dir + "/metrics.csv", std::ios::app);
  std::ofstream edge_out(cfg.out_dir + "/edge_metrics.csv", std::ios::app);

  auto checkpoint_paths = [&](int episode) {
    const std::string base = cfg.out_dir + "/checkpoint_ep" + std::to_string(episode);
    return std::make_pair(base + ".json", base + ".replay.bin");
  };

  if (cfg.train.episodes == 0 || trainer.episodes_done() == 0) {
    // Initial checkpoint: lets evaluate run on a fresh policy and marks the
    // resume baseline.
    auto [cp, rp] = checkpoint_paths(trainer.episodes_done());
    rl::save_checkpoint(trainer, trainer.episodes_done(), echo, cp, rp);
  }

  std::vector<rl::EdgeEpisodeMetrics> edge_metrics;
  for (int ep = trainer.episodes_done(); ep < cfg.train.episodes; ++ep) {
    const rl::EpisodeMetrics m = trainer.run_episode(ep, /*explore=*/true, /*learn=*/true,
                                                     &edge_metrics);
    metrics_out << metrics::to_csv_row(m) << '\n';
    metrics_out.flush();
    for (const auto& em : edge_metrics) edge_out << metrics::to_csv_row(ep, em) << '\n';
    edge_out.flush();
    trainer.set_episodes_done(ep + 1);
    std::cout << "episode " << ep << " total_reward " << metrics::fmt(m.total_reward) << "\n";
    const bool last = ep + 1 == cfg.train.episodes;
    if (last || (cfg.train.checkpoint_every > 0 && (ep + 1) % cfg.train.checkpoint_every == 0)) {
      auto [cp, rp] = checkpoint_paths(ep + 1);
      rl::save_checkpoint(trainer, ep + 1, echo, cp, rp);
    }
  }

  manifest["status"] = "complete";
  nlohmann::json artifacts = nlohmann::json::array();
  artifacts.push_back("config.json");
  artifacts.push_back("scenario.json");
  artifacts.push_back("metrics.csv");
  artifacts.push_back("edge_metrics.csv");
  for (const auto& entry : fs::directory_iterator(cfg.out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("checkpoint_", 0) == 0) artifacts.push_back(name);
  }
  std::sort(artifacts.begin(), artifacts.end());
  manifest["artifacts"] = std::move(artifacts);
  detail::write_json_file(manifest, cfg.out_dir + "/manifest.json");
  return 0;
}

// ------------------------------------------------------------- evaluate ---

inline int cmd_evaluate(RunConfig cli_cfg, const std::string& checkpoint_path, int days = 1,
                        int scenario_override = 0) {
  namespace fs = std::filesystem;
  if (cli_cfg.network.empty()) throw UsageError("evaluate requires --network");
  if (cli_cfg.out_dir.empty()) throw UsageError("evaluate requires --out");
  if (checkpoint_path.empty()) throw UsageError("evaluate requires --checkpoint");

  const nlohmann::json ck = detail::read_json_file(checkpoint_path);
  if (ck.value("format", "") != "rowbench-checkpoint")
    throw DataError("not a checkpoint file: " + checkpoint_path);

  // Rebuild the training-time configuration from the checkpoint echo, then
  // apply evaluation-time overrides (seed, output, scenario).
  RunConfig cfg;
  if (ck.contains("config")) {
    apply_config_json(ck.at("config"), cfg);
    if (ck.at("config").contains("scenario_id"))
      cfg.scenario_id = ck.at("config").at("scenario_id").get<int>();
    if (ck.at("config").contains("scenario"))
      apply_config_json(ck.at("config"), cfg);
  }
  cfg.network = cli_cfg.network;
  cfg.out_dir = cli_cfg.out_dir;
  cfg.seed = cli_cfg.seed;
  cfg.train.seed = cli_cfg.seed;
  if (scenario_override > 0) cfg.scenario_id = scenario_override;
  cfg.scenario_file.clear();

  net::StreetNetwork network = detail::load_and_validate_network(cfg.network);
  scenario::ScenarioSpec spec = detail::make_scenario(cfg, network);

  rl::Trainer trainer(network, spec, cfg.train, cfg.sim, cfg.quant, cfg.projection, cfg.features);
  try {
    load_checkpoint(trainer, checkpoint_path);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }

  fs::create_directories(cfg.out_dir);
  std::ofstream alloc_out(cfg.out_dir + "/eval_allocations.csv");
  alloc_out << "day,slot,edge_id,beta_sidewalk,beta_veh,beta_faci,beta_park,n_lanes,"
               "parking_capacity\n";
  std::ofstream reward_out(cfg.out_dir + "/eval_rewards.csv");
  reward_out << "day,slot,edge_id,r_sidewalk,r_ped,r_veh,r_park,total\n";

  for (int day = 0; day < days; ++day) {
    auto sink = [&](int slot, const std::vector<net::RowAllocation>& alloc,
                    const std::vector<reward::RewardVector>& rewards,
                    const std::vector<sim::SlotObservation>& obs) {
      (void)obs;
      for (std::size_t e = 0; e < alloc.size(); ++e) {
        const auto layout = net::quantize_layout(alloc[e], network.edge(e), cfg.quant);
        alloc_out << day << ',' << slot << ',' << network.edge(e).id << ','
                  << metrics::fmt(alloc[e].beta_sidewalk) << ',' << metrics::fmt(alloc[e].beta_veh)
                  << ',' << metrics::fmt(alloc[e].beta_faci) << ','
                  << metrics::fmt(alloc[e].beta_park) << ',' << layout.n_lanes << ','
                  << layout.parking_capacity << '\n';
        reward_out << day << ',' << slot << ',' << network.edge(e).id << ','
                   << metrics::fmt(rewards[e].r_sidewalk) << ',' << metrics::fmt(rewards[e].r_ped)
                   << ',' << metrics::fmt(rewards[e].r_veh) << ','
                   << metrics::fmt(rewards[e].r_park) << ',' << metrics::fmt(rewards[e].total)
                   << '\n';
      }
    };
    trainer.run_episode(day, /*explore=*/false, /*learn=*/false, nullptr, sink);
  }

  nlohmann::json manifest{{"format", "rowbench-run"},
                          {"version", 1},
                          {"command", "evaluate"},
                          {"checkpoint", checkpoint_path},
                          {"days", days},
                          {"seed", cfg.seed},
                          {"scenario", spec.id},
                          {"status", "complete"},
                          {"artifacts", {"eval_allocations.csv", "eval_rewards.csv"}}};
  detail::write_json_file(manifest, cfg.out_dir + "/manifest.json");
  return 0;
}

// -------------------------------------------------------------- analyze ---

inline int cmd_analyze(const std::string& run_dir, std::string out_dir = "") {
  const nlohmann::json manifest = detail::read_json_file(run_dir + "/manifest.json");
  if (manifest.value("status", "") != "complete")
    throw DataError("run manifest is incomplete: " + run_dir);
  if (out_dir.empty()) out_dir = run_dir + "/analysis";

  const auto rows = metrics::read_metrics_csv(run_dir + "/metrics.csv");
  if (rows.empty()) throw DataError("metrics.csv holds no episodes: " + run_dir);
  const auto edge_rows = metrics::read_edge_metrics_csv(run_dir + "/edge_metrics.csv");

  analysis::write_analysis_artifacts(rows, edge_rows, out_dir);
  std::cout << analysis::summary_text(analysis::summarize_run(rows));
  return 0;
}

// ----------------------------------------------------- validate-network ---

inline int cmd_validate_network(const std::string& network_arg) {
  std::string path;
  try {
    path = resolve_network_path(network_arg);
  } catch (const std::runtime_error& e) {
    throw DataError(e.what());
  }
  const net::StreetNetwork network = net::load_network(path);
  const auto violations = net::validate_network(network);
  if (violations.empty()) {
    std::cout << "ok: " << path << " (" << network.edge_count() << " edges, "
              << network.nodes().size() << " nodes)\n";
    return 0;
  }
  std::cerr << net::describe(violations);
  throw DataError("network has " + std::to_string(violations.size()) + " violation(s)");
}

// --------------------------------------------------------- gen-scenario ---

inline int cmd_gen_scenario(const RunConfig& cfg, const std::string& out_file,
                            const std::string& demand_out = "") {
  if (cfg.network.empty()) throw UsageError("gen-scenario requires --network");
  if (out_file.empty()) throw UsageError("gen-scenario requires --out");
  net::StreetNetwork network = detail::load_and_validate_network(cfg.network);
  scenario::ScenarioSpec spec = detail::make_scenario(cfg, network);
  detail::write_json_file(scenario::to_json(spec), out_file);
  std::cout << "scenario " << spec.id << " written to " << out_file << "\n";

  if (!demand_out.empty()) {
    nlohmann::json trips = nlohmann::json::array();
    for (int slot = 0; slot < spec.slots_per_day(); ++slot) {
      for (const auto& t :
           scenario::sample_slot_demand(spec, slot, network, cfg.seed, cfg.sim.slot_length_s))
        trips.push_back(sim::to_json(t));
    }
    nlohmann::json j{{"format", "rowbench-demand"},
                     {"version", 1},
                     {"network", network.name()},
                     {"seed", cfg.seed},
                     {"trips", std::move(trips)}};
    detail::write_json_file(j, demand_out);
    std::cout << "demand day written to " << demand_out << "\n";
  }
  return 0;
}

}  // namespace rowbench::cli
