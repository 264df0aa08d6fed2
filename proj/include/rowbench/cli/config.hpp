// Run configuration: defaults, optional JSON config file, CLI overrides.
// Flags beat the file, the file beats defaults. The fully resolved config is
// echoed into every run directory so a run can be reproduced from its
// artifacts alone.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rowbench/net/allocation.hpp"
#include "rowbench/net/layout.hpp"
#include "rowbench/rl/config.hpp"
#include "rowbench/sim/params.hpp"

namespace rowbench::cli {

struct RunConfig {
  std::string network;        // path or bundled network name
  int scenario_id = 1;
  std::string scenario_file;  // exported scenario spec; overrides scenario_id
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string resume;  // checkpoint JSON to continue from
  int episodes = -1;   // <0: use train.episodes

  rl::TrainConfig train;
  sim::SimParams sim;
  net::QuantizationConfig quant;
  net::ProjectionConfig projection;
  rl::FeatureScales features;
  double parking_propensity = 0.4;

  int resolved_episodes() const { return episodes >= 0 ? episodes : train.episodes; }
};

namespace detail {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace detail

inline void apply_config_json(const nlohmann::json& j, RunConfig& cfg) {
  using detail::maybe;
  if (j.contains("train")) {
    const auto& t = j.at("train");
    maybe(t, "gamma", cfg.train.gamma);
    maybe(t, "tau", cfg.train.tau);
    maybe(t, "actor_lr", cfg.train.actor_lr);
    maybe(t, "critic_lr", cfg.train.critic_lr);
    maybe(t, "batch_size", cfg.train.batch_size);
    maybe(t, "buffer_capacity", cfg.train.buffer_capacity);
    maybe(t, "hidden_widths", cfg.train.hidden_widths);
    maybe(t, "ou_theta", cfg.train.ou_theta);
    maybe(t, "ou_sigma", cfg.train.ou_sigma);
    maybe(t, "ou_sigma_final", cfg.train.ou_sigma_final);
    maybe(t, "updates_per_slot", cfg.train.updates_per_slot);
    maybe(t, "episodes", cfg.train.episodes);
    maybe(t, "action_scale", cfg.train.action_scale);
    maybe(t, "opt_decay", cfg.train.opt_decay);
    maybe(t, "opt_epsilon", cfg.train.opt_epsilon);
    maybe(t, "threads", cfg.train.threads);
    maybe(t, "checkpoint_every", cfg.train.checkpoint_every);
    if (t.contains("critic_scope"))
      cfg.train.critic_scope = rl::critic_scope_from_string(t.at("critic_scope").get<std::string>());
  }
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    maybe(s, "ped_following_gap_m", cfg.sim.ped_following_gap_m);
    maybe(s, "ped_max_speed_mps", cfg.sim.ped_max_speed_mps);
    maybe(s, "ped_body_width_m", cfg.sim.ped_body_width_m);
    maybe(s, "ped_spill_speed_frac", cfg.sim.ped_spill_speed_frac);
    maybe(s, "veh_accel_mps2", cfg.sim.veh_accel_mps2);
    maybe(s, "veh_decel_mps2", cfg.sim.veh_decel_mps2);
    maybe(s, "veh_max_speed_mps", cfg.sim.veh_max_speed_mps);
    maybe(s, "veh_headway_s", cfg.sim.veh_headway_s);
    maybe(s, "veh_imperfection", cfg.sim.veh_imperfection);
    maybe(s, "veh_speed_factor", cfg.sim.veh_speed_factor);
    maybe(s, "veh_length_m", cfg.sim.veh_length_m);
    maybe(s, "k_jam_nominal_speed_mps", cfg.sim.k_jam_nominal_speed_mps);
    maybe(s, "tick_s", cfg.sim.tick_s);
    maybe(s, "obs_interval_s", cfg.sim.obs_interval_s);
    maybe(s, "slot_length_s", cfg.sim.slot_length_s);
    maybe(s, "slots_per_day", cfg.sim.slots_per_day);
    maybe(s, "park_sigmoid_bias", cfg.sim.park_sigmoid_bias);
    maybe(s, "park_sigmoid_gain", cfg.sim.park_sigmoid_gain);
    maybe(s, "park_duration_mean_s", cfg.sim.park_duration_mean_s);
  }
  if (j.contains("quantization")) {
    const auto& q = j.at("quantization");
    maybe(q, "lane_width_m", cfg.quant.lane_width_m);
    maybe(q, "parking_strip_width_m", cfg.quant.parking_strip_width_m);
    maybe(q, "bay_length_m", cfg.quant.bay_length_m);
  }
  if (j.contains("projection")) {
    const auto& p = j.at("projection");
    maybe(p, "min_sidewalk_frac", cfg.projection.min_sidewalk_frac);
    maybe(p, "min_veh_frac", cfg.projection.min_veh_frac);
    maybe(p, "min_park_frac", cfg.projection.min_park_frac);
  }
  if (j.contains("features")) {
    const auto& f = j.at("features");
    maybe(f, "np_scale", cfg.features.np_scale);
    maybe(f, "nv_scale", cfg.features.nv_scale);
    maybe(f, "k_dem_scale", cfg.features.k_dem_scale);
  }
  if (j.contains("scenario")) {
    const auto& s = j.at("scenario");
    maybe(s, "parking_propensity", cfg.parking_propensity);
  }
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  apply_config_json(j, cfg);
}

inline nlohmann::json config_echo(const RunConfig& cfg) {
  nlohmann::json j;
  j["network"] = cfg.network;
  j["scenario_id"] = cfg.scenario_id;
  j["scenario_file"] = cfg.scenario_file;
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["episodes"] = cfg.resolved_episodes();
  j["train"] = {{"gamma", cfg.train.gamma},
                {"tau", cfg.train.tau},
                {"actor_lr", cfg.train.actor_lr},
                {"critic_lr", cfg.train.critic_lr},
                {"batch_size", cfg.train.batch_size},
                {"buffer_capacity", cfg.train.buffer_capacity},
                {"hidden_widths", cfg.train.hidden_widths},
                {"ou_theta", cfg.train.ou_theta},
                {"ou_sigma", cfg.train.ou_sigma},
                {"ou_sigma_final", cfg.train.ou_sigma_final},
                {"updates_per_slot", cfg.train.updates_per_slot},
                {"critic_scope", rl::to_string(cfg.train.critic_scope)},
                {"episodes", cfg.train.episodes},
                {"action_scale", cfg.train.action_scale},
                {"opt_decay", cfg.train.opt_decay},
                {"opt_epsilon", cfg.train.opt_epsilon},
                {"threads", cfg.train.threads},
                {"checkpoint_every", cfg.train.checkpoint_every}};
  j["sim"] = {{"ped_following_gap_m", cfg.sim.ped_following_gap_m},
              {"ped_max_speed_mps", cfg.sim.ped_max_speed_mps},
              {"ped_body_width_m", cfg.sim.ped_body_width_m},
              {"ped_spill_speed_frac", cfg.sim.ped_spill_speed_frac},
              {"veh_accel_mps2", cfg.sim.veh_accel_mps2},
              {"veh_decel_mps2", cfg.sim.veh_decel_mps2},
              {"veh_max_speed_mps", cfg.sim.veh_max_speed_mps},
              {"veh_headway_s", cfg.sim.veh_headway_s},
              {"veh_imperfection", cfg.sim.veh_imperfection},
              {"veh_speed_factor", cfg.sim.veh_speed_factor},
              {"veh_length_m", cfg.sim.veh_length_m},
              {"k_jam_nominal_speed_mps", cfg.sim.k_jam_nominal_speed_mps},
              {"tick_s", cfg.sim.tick_s},
              {"obs_interval_s", cfg.sim.obs_interval_s},
              {"slot_length_s", cfg.sim.slot_length_s},
              {"slots_per_day", cfg.sim.slots_per_day},
              {"park_sigmoid_bias", cfg.sim.park_sigmoid_bias},
              {"park_sigmoid_gain", cfg.sim.park_sigmoid_gain},
              {"park_duration_mean_s", cfg.sim.park_duration_mean_s}};
  j["quantization"] = {{"lane_width_m", cfg.quant.lane_width_m},
                       {"parking_strip_width_m", cfg.quant.parking_strip_width_m},
                       {"bay_length_m", cfg.quant.bay_length_m}};
  j["projection"] = {{"min_sidewalk_frac", cfg.projection.min_sidewalk_frac},
                     {"min_veh_frac", cfg.projection.min_veh_frac},
                     {"min_park_frac", cfg.projection.min_park_frac}};
  j["features"] = {{"np_scale", cfg.features.np_scale},
                   {"nv_scale", cfg.features.nv_scale},
                   {"k_dem_scale", cfg.features.k_dem_scale}};
  j["scenario"] = {{"parking_propensity", cfg.parking_propensity}};
  return j;
}

// Resolves a --network argument: an existing path wins, then
// $ROWBENCH_DATA/<name>.json, then the bundled data directory.
inline std::string resolve_network_path(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return arg;
  const std::string file = arg + ".json";
  if (const char* env = std::getenv("ROWBENCH_DATA")) {
    const fs::path p = fs::path(env) / file;
    if (fs::exists(p)) return p.string();
  }
#ifdef ROWBENCH_DATA_DIR
  {
    const fs::path p = fs::path(ROWBENCH_DATA_DIR) / file;
    if (fs::exists(p)) return p.string();
  }
#endif
  throw std::runtime_error("network not found: " + arg);
}

}  // namespace rowbench::cli
