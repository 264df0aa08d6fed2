// Checkpoint format.
//
// A checkpoint is a JSON document carrying the config echo, per-agent
// parameter arrays (actor, critic, targets), optimizer accumulators, noise
// state, the episode index, and the rng root; plus a binary sidecar with the
// replay buffer contents (raw little-endian doubles; far too large for
// readable JSON). Together they are sufficient to resume a run exactly:
// every random stream is derived from (root seed, episode, slot, ...), so no
// evolving generator state needs saving.

#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rowbench/rl/train.hpp"

namespace rowbench::rl {

inline constexpr std::uint32_t kReplayMagic = 0x52424a52;  // "RBJR"

namespace detail {

inline nlohmann::json mlp_to_json(const Mlp& m) {
  return nlohmann::json{
      {"widths", m.widths},
      {"output_activation", m.output_activation == OutputActivation::bounded ? "bounded" : "identity"},
      {"output_scale", m.output_scale},
      {"weights", m.weights},
      {"biases", m.biases}};
}

inline Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp m;
  m.widths = j.at("widths").get<std::vector<int>>();
  m.output_activation = j.at("output_activation").get<std::string>() == "bounded"
                            ? OutputActivation::bounded
                            : OutputActivation::identity;
  m.output_scale = j.at("output_scale").get<double>();
  m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  return m;
}

inline nlohmann::json optimizer_to_json(const AdaptiveSgd& opt) {
  return nlohmann::json{{"acc_weights", opt.accumulator().weights},
                        {"acc_biases", opt.accumulator().biases},
                        {"step", opt.step_count()}};
}

inline void optimizer_from_json(const nlohmann::json& j, AdaptiveSgd& opt) {
  MlpGrads acc;
  acc.weights = j.at("acc_weights").get<std::vector<std::vector<double>>>();
  acc.biases = j.at("acc_biases").get<std::vector<std::vector<double>>>();
  opt.restore(std::move(acc), j.at("step").get<std::int64_t>());
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("replay file truncated");
  return v;
}

}  // namespace detail

inline void save_replay(const ReplayBuffer<JointTransition>& replay, const std::string& path,
                        std::uint32_t agent_count, std::uint32_t state_dim) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write replay file: " + path);
  detail::write_raw(out, kReplayMagic);
  detail::write_raw(out, std::uint32_t{1});
  detail::write_raw(out, agent_count);
  detail::write_raw(out, state_dim);
  detail::write_raw(out, std::uint32_t{kActionDim});
  detail::write_raw(out, static_cast<std::uint64_t>(replay.size()));
  for (std::size_t i = 0; i < replay.size(); ++i) {
    const JointTransition& t = replay.at(i);
    detail::write_raw(out, static_cast<std::uint8_t>(t.terminal ? 1 : 0));
    for (std::uint32_t a = 0; a < agent_count; ++a) {
      out.write(reinterpret_cast<const char*>(t.state[a].data()), state_dim * sizeof(double));
      out.write(reinterpret_cast<const char*>(t.action[a].data()), kActionDim * sizeof(double));
      detail::write_raw(out, t.reward[a]);
      out.write(reinterpret_cast<const char*>(t.next_state[a].data()), state_dim * sizeof(double));
    }
  }
  if (!out) throw std::runtime_error("failed while writing replay file: " + path);
}

inline void load_replay(ReplayBuffer<JointTransition>& replay, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open replay file: " + path);
  if (detail::read_raw<std::uint32_t>(in) != kReplayMagic)
    throw std::runtime_error("not a replay file: " + path);
  if (detail::read_raw<std::uint32_t>(in) != 1)
    throw std::runtime_error("unsupported replay file version");
  const auto agents = detail::read_raw<std::uint32_t>(in);
  const auto state_dim = detail::read_raw<std::uint32_t>(in);
  const auto action_dim = detail::read_raw<std::uint32_t>(in);
  if (action_dim != kActionDim) throw std::runtime_error("replay file action dim mismatch");
  const auto count = detail::read_raw<std::uint64_t>(in);
  for (std::uint64_t i = 0; i < count; ++i) {
    JointTransition t;
    t.terminal = detail::read_raw<std::uint8_t>(in) != 0;
    t.state.resize(agents);
    t.action.resize(agents);
    t.reward.resize(agents);
    t.next_state.resize(agents);
    for (std::uint32_t a = 0; a < agents; ++a) {
      t.state[a].resize(state_dim);
      in.read(reinterpret_cast<char*>(t.state[a].data()), state_dim * sizeof(double));
      in.read(reinterpret_cast<char*>(t.action[a].data()), kActionDim * sizeof(double));
      t.reward[a] = detail::read_raw<double>(in);
      t.next_state[a].resize(state_dim);
      in.read(reinterpret_cast<char*>(t.next_state[a].data()), state_dim * sizeof(double));
      if (!in) throw std::runtime_error("replay file truncated");
    }
    replay.push(std::move(t));
  }
}

// `config_echo` is the caller's resolved run configuration, stored verbatim.
inline void save_checkpoint(const Trainer& trainer, int episode_index,
                            const nlohmann::json& config_echo, const std::string& json_path,
                            const std::string& replay_path) {
  nlohmann::json j;
  j["format"] = "rowbench-checkpoint";
  j["version"] = 1;
  j["episode_index"] = episode_index;
  j["seed"] = trainer.config().seed;
  j["rng"] = {{"root_seed", trainer.config().seed},
              {"scheme", "substreams derived per (component, episode, slot, edge)"}};
  j["config"] = config_echo;
  j["network"] = {{"name", trainer.network().name()},
                  {"edge_count", trainer.network().edge_count()}};
  j["state_dim"] = trainer.state_dim();

  nlohmann::json agents = nlohmann::json::array();
  for (const auto& a : trainer.agents()) {
    agents.push_back(nlohmann::json{
        {"edge_id", a.edge_id},
        {"actor", detail::mlp_to_json(a.actor)},
        {"critic", detail::mlp_to_json(a.critic)},
        {"target_actor", detail::mlp_to_json(a.target_actor)},
        {"target_critic", detail::mlp_to_json(a.target_critic)},
        {"opt_actor", detail::optimizer_to_json(a.opt_actor)},
        {"opt_critic", detail::optimizer_to_json(a.opt_critic)},
        {"noise", {{"value", a.noise.value()}, {"sigma", a.noise.sigma()}}}});
  }
  j["agents"] = std::move(agents);

  // Replay sidecar: raw little-endian doubles, layout in the header.
  std::string replay_name = replay_path;
  const auto slash = replay_name.find_last_of('/');
  if (slash != std::string::npos) replay_name = replay_name.substr(slash + 1);
  j["replay"] = {{"file", replay_name}, {"entries", trainer.replay().size()}};
  save_replay(trainer.replay(), replay_path, static_cast<std::uint32_t>(trainer.agents().size()),
              static_cast<std::uint32_t>(trainer.state_dim()));

  std::ofstream out(json_path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + json_path);
  out << j.dump(1) << "\n";
}

// Restores agents, optimizers, noise, replay, and the episode cursor into a
// trainer that was constructed with a matching network and config.
inline nlohmann::json load_checkpoint(Trainer& trainer, const std::string& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + json_path);
  nlohmann::json j;
  in >> j;
  if (j.value("format", "") != "rowbench-checkpoint")
    throw std::runtime_error("not a checkpoint file: " + json_path);

  const auto& jagents = j.at("agents");
  if (jagents.size() != trainer.agents().size())
    throw std::runtime_error("checkpoint holds " + std::to_string(jagents.size()) +
                             " agents but the network has " +
                             std::to_string(trainer.agents().size()) + " edges");

  for (std::size_t i = 0; i < trainer.agents().size(); ++i) {
    auto& a = trainer.agents()[i];
    const auto& ja = jagents[i];
    if (ja.at("edge_id").get<std::string>() != a.edge_id)
      throw std::runtime_error("checkpoint agent order does not match network edge order");
    a.actor = detail::mlp_from_json(ja.at("actor"));
    a.critic = detail::mlp_from_json(ja.at("critic"));
    a.target_actor = detail::mlp_from_json(ja.at("target_actor"));
    a.target_critic = detail::mlp_from_json(ja.at("target_critic"));
    if (a.actor.widths.front() != trainer.state_dim())
      throw std::runtime_error("checkpoint feature width mismatch");
    detail::optimizer_from_json(ja.at("opt_actor"), a.opt_actor);
    detail::optimizer_from_json(ja.at("opt_critic"), a.opt_critic);
    a.noise.restore(ja.at("noise").at("value").get<std::array<double, 3>>());
    a.noise.set_sigma(ja.at("noise").at("sigma").get<double>());
  }

  std::string replay_file = j.at("replay").at("file").get<std::string>();
  std::string dir;
  const auto slash = json_path.find_last_of('/');
  if (slash != std::string::npos) dir = json_path.substr(0, slash + 1);
  load_replay(trainer.replay(), dir + replay_file);
  if (trainer.replay().size() != j.at("replay").at("entries").get<std::size_t>())
    throw std::runtime_error("replay entry count mismatch");

  trainer.set_episodes_done(j.at("episode_index").get<int>());
  return j;
}

}  // namespace rowbench::rl
