// The training loop: one actor-critic agent per directed edge, trained
// simultaneously against the slot simulator.
//
// Episode = one simulated day. Per slot: every agent reads its edge state
// (previous slot's observation + allocation + time of day), acts, the raw
// actions are projected onto the allocation simplex and quantized into
// layouts, the simulator advances one slot, rewards are computed, the joint
// transition is stored, and each agent takes its gradient and target-update
// steps. Everything is keyed off the root seed, so a (config, seed) pair
// fully determines the run.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rowbench/net/allocation.hpp"
#include "rowbench/net/layout.hpp"
#include "rowbench/net/types.hpp"
#include "rowbench/reward.hpp"
#include "rowbench/rl/agent.hpp"
#include "rowbench/rl/config.hpp"
#include "rowbench/rl/features.hpp"
#include "rowbench/rl/parallel.hpp"
#include "rowbench/rl/replay.hpp"
#include "rowbench/rng.hpp"
#include "rowbench/scenario.hpp"
#include "rowbench/sim/params.hpp"
#include "rowbench/sim/world.hpp"

namespace rowbench::rl {

struct EpisodeMetrics {
  int episode = 0;
  int scenario_id = 0;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  double r_sidewalk_sum = 0.0;
  double r_ped_sum = 0.0;
  double r_veh_sum = 0.0;
  double r_park_sum = 0.0;
  double mean_beta_sidewalk = 0.0;
  double mean_beta_veh = 0.0;
  double mean_beta_park = 0.0;
  std::int64_t buffer_restorations = 0;
  std::int64_t expired_parking_requests = 0;
};

struct EdgeEpisodeMetrics {
  std::string edge_id;
  double r_sidewalk_sum = 0.0;
  double r_ped_sum = 0.0;
  double r_veh_sum = 0.0;
  double r_park_sum = 0.0;
  double total = 0.0;
  double k_dem_sum = 0.0;
  double k_park_mean = 0.0;
  double beta_sidewalk_mean = 0.0;
  double beta_veh_mean = 0.0;
  double beta_park_mean = 0.0;
};

// Per-slot detail callback, used by evaluation to dump allocations/rewards.
using SlotSink = std::function<void(int slot, const std::vector<net::RowAllocation>&,
                                    const std::vector<reward::RewardVector>&,
                                    const std::vector<sim::SlotObservation>&)>;

class Trainer {
 public:
  Trainer(const net::StreetNetwork& network, scenario::ScenarioSpec spec, TrainConfig cfg,
          sim::SimParams params = {}, net::QuantizationConfig quant = {},
          net::ProjectionConfig projection = {}, FeatureScales scales = {})
      : net_(network),
        spec_(std::move(spec)),
        cfg_(std::move(cfg)),
        params_(params),
        quant_(quant),
        projection_(projection),
        scales_(scales) {
    cfg_.validate();
    params_.validate();
    if (spec_.slots_per_day() != params_.slots_per_day)
      throw std::invalid_argument("scenario and sim params disagree on slots per day");
    build_peer_lists();
    init_agents();
  }

  const net::StreetNetwork& network() const { return net_; }
  const scenario::ScenarioSpec& spec() const { return spec_; }
  const TrainConfig& config() const { return cfg_; }
  const sim::SimParams& sim_params() const { return params_; }
  const net::QuantizationConfig& quantization() const { return quant_; }
  const net::ProjectionConfig& projection() const { return projection_; }
  const FeatureScales& feature_scales() const { return scales_; }

  std::vector<AgentBundle>& agents() { return agents_; }
  const std::vector<AgentBundle>& agents() const { return agents_; }
  ReplayBuffer<JointTransition>& replay() { return *replay_; }
  const ReplayBuffer<JointTransition>& replay() const { return *replay_; }

  int episodes_done() const { return episodes_done_; }
  void set_episodes_done(int n) { episodes_done_ = n; }

  int state_dim() const { return kFeatureDim; }

  int critic_input_dim(std::size_t agent_index) const {
    const int own = kFeatureDim + kActionDim;
    return own + static_cast<int>(peers_[agent_index].size()) * own;
  }

  const std::vector<std::size_t>& peer_indexes(std::size_t agent_index) const {
    return peers_[agent_index];
  }

  net::RowAllocation initial_allocation(std::size_t edge_index) const {
    return net::project_action({0.0, 0.0, 0.0}, net_.edge(edge_index).beta_faci, projection_);
  }

  // Runs one episode at the given index. `learn` enables replay pushes and
  // gradient updates; `explore` enables OU noise. Returns episode metrics;
  // per-edge sums go to `edge_metrics_out` when provided.
  EpisodeMetrics run_episode(int episode_index, bool explore, bool learn,
                             std::vector<EdgeEpisodeMetrics>* edge_metrics_out = nullptr,
                             const SlotSink& slot_sink = nullptr) {
    const std::size_t n_edges = net_.edge_count();
    const int slots = params_.slots_per_day;
    const RngKey root(cfg_.seed);
    const std::uint64_t sim_seed =
        root.with("sim").with(static_cast<std::uint64_t>(episode_index)).value();
    const std::uint64_t demand_seed =
        root.with("demand-day").with(static_cast<std::uint64_t>(episode_index)).value();

    const double sigma = cfg_.sigma_for_episode(episode_index);
    for (auto& a : agents_) {
      a.noise.set_sigma(sigma);
      a.noise.reset();
    }

    sim::DayRunner day(net_, params_, sim_seed);

    std::vector<net::RowAllocation> alloc(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) alloc[e] = initial_allocation(e);
    std::vector<sim::SlotObservation> obs(n_edges);

    EpisodeMetrics m;
    m.episode = episode_index;
    m.scenario_id = spec_.id;
    m.seed = cfg_.seed;
    std::vector<EdgeEpisodeMetrics> edge_m(n_edges);
    for (std::size_t e = 0; e < n_edges; ++e) edge_m[e].edge_id = net_.edge(e).id;

    std::vector<std::vector<double>> state(n_edges), next_state(n_edges);
    std::vector<std::array<double, 3>> raw(n_edges);
    std::vector<net::DiscreteLayout> layouts(n_edges);
    std::vector<reward::RewardVector> rewards(n_edges);

    for (int t = 0; t < slots; ++t) {
      for (std::size_t e = 0; e < n_edges; ++e)
        state[e] = feature_vector(obs[e], alloc[e], t, slots, scales_);

      parallel_for(n_edges, cfg_.threads, [&](std::size_t e) {
        SplitMix64 ou_rng = root.with("ou")
                                .with(static_cast<std::uint64_t>(episode_index))
                                .with(static_cast<std::uint64_t>(t))
                                .with(static_cast<std::uint64_t>(e))
                                .stream();
        raw[e] = act(agents_[e], state[e], explore, ou_rng);
      });

      for (std::size_t e = 0; e < n_edges; ++e) {
        alloc[e] = net::project_action(raw[e], net_.edge(e).beta_faci, projection_);
        if (std::abs(alloc[e].sum() - 1.0) > 1e-9)
          throw std::logic_error("allocation left the simplex");
        layouts[e] = quantize_layout(alloc[e], net_.edge(e), quant_);
      }

      auto due = scenario::sample_slot_demand(spec_, t, net_, demand_seed, params_.slot_length_s);
      sim::SlotOutput out = day.step(t, layouts, std::move(due));
      if (!day.conservation_holds())
        throw std::logic_error("trip conservation violated at slot boundary");

      const bool terminal = t == slots - 1;
      for (std::size_t e = 0; e < n_edges; ++e) {
        rewards[e] = reward::slot_reward(alloc[e], out.obs[e]);
        next_state[e] = feature_vector(out.obs[e], alloc[e], t + 1, slots, scales_);

        m.total_reward += rewards[e].total;
        m.r_sidewalk_sum += rewards[e].r_sidewalk;
        m.r_ped_sum += rewards[e].r_ped;
        m.r_veh_sum += rewards[e].r_veh;
        m.r_park_sum += rewards[e].r_park;
        m.mean_beta_sidewalk += alloc[e].beta_sidewalk;
        m.mean_beta_veh += alloc[e].beta_veh;
        m.mean_beta_park += alloc[e].beta_park;
        m.expired_parking_requests += out.obs[e].expired_requests;

        auto& em = edge_m[e];
        em.r_sidewalk_sum += rewards[e].r_sidewalk;
        em.r_ped_sum += rewards[e].r_ped;
        em.r_veh_sum += rewards[e].r_veh;
        em.r_park_sum += rewards[e].r_park;
        em.total += rewards[e].total;
        em.k_dem_sum += static_cast<double>(out.obs[e].k_dem);
        em.k_park_mean += static_cast<double>(out.obs[e].k_park);
        em.beta_sidewalk_mean += alloc[e].beta_sidewalk;
        em.beta_veh_mean += alloc[e].beta_veh;
        em.beta_park_mean += alloc[e].beta_park;
      }

      if (learn) {
        JointTransition tr;
        tr.state = state;
        tr.action = raw;
        tr.reward.resize(n_edges);
        for (std::size_t e = 0; e < n_edges; ++e) tr.reward[e] = rewards[e].total;
        tr.next_state = next_state;
        tr.terminal = terminal;
        replay_->push(std::move(tr));

        if (replay_->size() >= cfg_.batch_size && cfg_.updates_per_slot > 0)
          update_all_agents(episode_index, t);
      }

      if (slot_sink) slot_sink(t, alloc, rewards, out.obs);
      obs = out.obs;
    }

    const double denom = static_cast<double>(n_edges) * slots;
    m.mean_beta_sidewalk /= denom;
    m.mean_beta_veh /= denom;
    m.mean_beta_park /= denom;
    m.buffer_restorations = day.restorations();

    if (edge_metrics_out) {
      for (auto& em : edge_m) {
        em.k_park_mean /= slots;
        em.beta_sidewalk_mean /= slots;
        em.beta_veh_mean /= slots;
        em.beta_park_mean /= slots;
      }
      *edge_metrics_out = std::move(edge_m);
    }
    return m;
  }

 private:
  void build_peer_lists() {
    const std::size_t n = net_.edge_count();
    peers_.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
      switch (cfg_.critic_scope) {
        case CriticScope::local:
          break;
        case CriticScope::neighborhood:
          peers_[e] = net_.adjacent_edges(e);
          break;
        case CriticScope::global: {
          // All other agents, ordered by edge id.
          std::vector<std::pair<std::string, std::size_t>> ids;
          for (std::size_t o = 0; o < n; ++o)
            if (o != e) ids.emplace_back(net_.edge(o).id, o);
          std::sort(ids.begin(), ids.end());
          for (const auto& [id, o] : ids) peers_[e].push_back(o);
          break;
        }
      }
    }
  }

  void init_agents() {
    agents_.clear();
    replay_ = std::make_unique<ReplayBuffer<JointTransition>>(cfg_.buffer_capacity);
    const RngKey root(cfg_.seed);
    for (std::size_t e = 0; e < net_.edge_count(); ++e) {
      SplitMix64 init = root.with("init").with(static_cast<std::uint64_t>(e)).stream();
      agents_.push_back(
          make_agent(net_.edge(e).id, kFeatureDim, critic_input_dim(e), cfg_, init));
    }
    episodes_done_ = 0;
  }

  // One round of gradient updates for every agent. Peer target policies are
  // snapshotted first so agents update against a consistent, pre-step view
  // (and so the parallel loop never reads parameters another thread writes).
  void update_all_agents(int episode_index, int slot) {
    const std::size_t n = agents_.size();
    const bool with_peers = cfg_.critic_scope != CriticScope::local;
    std::vector<Mlp> target_actor_snapshot;
    if (with_peers) {
      target_actor_snapshot.reserve(n);
      for (const auto& a : agents_) target_actor_snapshot.push_back(a.target_actor);
    }
    const RngKey root(cfg_.seed);

    for (int u = 0; u < cfg_.updates_per_slot; ++u) {
      parallel_for(n, cfg_.threads, [&](std::size_t e) {
        SplitMix64 rng = root.with("batch")
                             .with(static_cast<std::uint64_t>(episode_index))
                             .with(static_cast<std::uint64_t>(slot))
                             .with(static_cast<std::uint64_t>(e))
                             .with(static_cast<std::uint64_t>(u))
                             .stream();
        const auto idx = replay_->sample_indices(cfg_.batch_size, rng);

        std::vector<Transition> batch;
        batch.reserve(idx.size());
        for (std::size_t j : idx) batch.push_back(replay_->at(j).slice(e));

        PeerBatch peers;
        if (with_peers && !peers_[e].empty()) {
          const auto& plist = peers_[e];
          peers.state.resize(idx.size());
          peers.action.resize(idx.size());
          peers.next_state.resize(idx.size());
          peers.next_action.resize(idx.size());
          MlpCache cache;
          for (std::size_t r = 0; r < idx.size(); ++r) {
            const JointTransition& jt = replay_->at(idx[r]);
            for (std::size_t p : plist) {
              detail::append(peers.state[r], jt.state[p]);
              detail::append(peers.action[r], jt.action[p]);
              detail::append(peers.next_state[r], jt.next_state[p]);
              const auto& mu = mlp_forward(target_actor_snapshot[p], jt.next_state[p], cache);
              detail::append(peers.next_action[r], mu);
            }
          }
        }

        update_agent(agents_[e], batch, peers.empty() ? nullptr : &peers, cfg_);
        soft_update(agents_[e], cfg_.tau);
      });
    }
  }

  const net::StreetNetwork& net_;
  scenario::ScenarioSpec spec_;
  TrainConfig cfg_;
  sim::SimParams params_;
  net::QuantizationConfig quant_;
  net::ProjectionConfig projection_;
  FeatureScales scales_;

  std::vector<AgentBundle> agents_;
  std::vector<std::vector<std::size_t>> peers_;
  std::unique_ptr<ReplayBuffer<JointTransition>> replay_;
  int episodes_done_ = 0;
};

}  // namespace rowbench::rl
