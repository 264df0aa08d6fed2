// One actor-critic bundle per edge and the DDPG-style update step.
//
// The critic scores (state, action) pairs; with a non-local scope its input
// is widened with peer states and actions, in a fixed order, following the
// centralized-critic construction. Exactly one gradient step per call for
// each network.

#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rowbench/rl/config.hpp"
#include "rowbench/rl/mlp.hpp"
#include "rowbench/rl/noise.hpp"
#include "rowbench/rl/optimizer.hpp"
#include "rowbench/rl/replay.hpp"

namespace rowbench::rl {

inline constexpr int kActionDim = 3;

struct AgentBundle {
  std::string edge_id;
  Mlp actor, critic, target_actor, target_critic;
  AdaptiveSgd opt_actor, opt_critic;
  OuNoise noise;

  int state_dim() const { return actor.widths.front(); }
  int critic_input_dim() const { return critic.widths.front(); }
};

// Final layers start near zero (uniform +-3e-3) so the initial policy sits
// at the neutral allocation and early values are small; hidden layers keep
// the Glorot init.
inline void shrink_final_layer(Mlp& net, SplitMix64& rng) {
  auto& w = net.weights.back();
  for (double& v : w) v = rng.uniform(-3e-3, 3e-3);
  auto& b = net.biases.back();
  for (double& v : b) v = rng.uniform(-3e-3, 3e-3);
}

inline AgentBundle make_agent(std::string edge_id, int state_dim, int critic_input_dim,
                              const TrainConfig& cfg, SplitMix64& init_rng) {
  AgentBundle a;
  a.edge_id = std::move(edge_id);

  std::vector<int> actor_widths{state_dim};
  for (int h : cfg.hidden_widths) actor_widths.push_back(h);
  actor_widths.push_back(kActionDim);
  a.actor = make_mlp(actor_widths, OutputActivation::bounded, cfg.action_scale, init_rng);
  shrink_final_layer(a.actor, init_rng);

  std::vector<int> critic_widths{critic_input_dim};
  for (int h : cfg.hidden_widths) critic_widths.push_back(h);
  critic_widths.push_back(1);
  a.critic = make_mlp(critic_widths, OutputActivation::identity, 1.0, init_rng);
  shrink_final_layer(a.critic, init_rng);

  a.target_actor = a.actor;
  a.target_critic = a.critic;
  a.opt_actor = AdaptiveSgd(cfg.actor_lr, cfg.opt_decay, cfg.opt_epsilon);
  a.opt_actor.attach(a.actor);
  a.opt_critic = AdaptiveSgd(cfg.critic_lr, cfg.opt_decay, cfg.opt_epsilon);
  a.opt_critic.attach(a.critic);
  a.noise = OuNoise(cfg.ou_theta, cfg.ou_sigma);
  return a;
}

// Deterministic policy action; exploration adds the OU sample per dimension.
inline std::array<double, 3> act(AgentBundle& agent, const std::vector<double>& state,
                                 bool explore, SplitMix64& rng) {
  MlpCache cache;
  const auto& out = mlp_forward(agent.actor, state, cache);
  std::array<double, 3> action{out[0], out[1], out[2]};
  if (explore) {
    const auto n = agent.noise.sample(rng);
    for (int i = 0; i < kActionDim; ++i) action[i] += n[i];
  }
  return action;
}

// target <- (1 - tau) * target + tau * source, every parameter.
inline void soft_update_net(Mlp& target, const Mlp& source, double tau) {
  for (std::size_t l = 0; l < target.weights.size(); ++l) {
    for (std::size_t i = 0; i < target.weights[l].size(); ++i)
      target.weights[l][i] += tau * (source.weights[l][i] - target.weights[l][i]);
    for (std::size_t i = 0; i < target.biases[l].size(); ++i)
      target.biases[l][i] += tau * (source.biases[l][i] - target.biases[l][i]);
  }
}

inline void soft_update(AgentBundle& agent, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("soft_update: tau must be in (0,1]");
  soft_update_net(agent.target_actor, agent.actor, tau);
  soft_update_net(agent.target_critic, agent.critic, tau);
}

// Peer context aligned with a sampled batch; empty for local critics. For
// batch row r, `state[r]` / `action[r]` hold the concatenated peer features
// stored with the transition, and `next_action[r]` the peer target-policy
// actions at the next state.
struct PeerBatch {
  std::vector<std::vector<double>> state;
  std::vector<std::vector<double>> action;
  std::vector<std::vector<double>> next_state;
  std::vector<std::vector<double>> next_action;

  bool empty() const { return state.empty(); }
};

struct UpdateReport {
  double critic_loss = 0.0;      // mean squared TD error over the batch
  double actor_objective = 0.0;  // mean critic value at (s, mu(s))
};

namespace detail {

inline void append(std::vector<double>& dst, std::span<const double> src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

// Critic input layout: [own state, own action, peer states, peer actions].
inline std::vector<double> critic_input(const std::vector<double>& state,
                                        std::span<const double> action,
                                        const std::vector<double>* peer_state,
                                        const std::vector<double>* peer_action) {
  std::vector<double> x;
  x.reserve(state.size() + action.size() + (peer_state ? peer_state->size() : 0) +
            (peer_action ? peer_action->size() : 0));
  append(x, state);
  append(x, action);
  if (peer_state) append(x, *peer_state);
  if (peer_action) append(x, *peer_action);
  return x;
}

}  // namespace detail

// One critic step toward y = r + gamma * (1 - terminal) * Q_target(s', mu_target(s'))
// and one actor ascent step on Q(s, mu(s)).
inline UpdateReport update_agent(AgentBundle& agent, std::span<const Transition> batch,
                                 const PeerBatch* peers, const TrainConfig& cfg) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("update_agent: empty batch");
  if (peers && !peers->empty() && peers->state.size() != n)
    throw std::invalid_argument("update_agent: peer batch size mismatch");
  const bool with_peers = peers != nullptr && !peers->empty();

  UpdateReport report;
  MlpCache cache_a, cache_b;

  // --- critic ---
  MlpGrads critic_grads;
  critic_grads.match(agent.critic);
  for (std::size_t r = 0; r < n; ++r) {
    const Transition& t = batch[r];
    double y = t.reward;
    if (!t.terminal) {
      const auto& mu_next = mlp_forward(agent.target_actor, t.next_state, cache_a);
      const auto x_next = detail::critic_input(t.next_state, mu_next,
                                               with_peers ? &peers->next_state[r] : nullptr,
                                               with_peers ? &peers->next_action[r] : nullptr);
      y += cfg.gamma * mlp_forward(agent.target_critic, x_next, cache_b)[0];
    }
    const auto x = detail::critic_input(t.state, t.action,
                                        with_peers ? &peers->state[r] : nullptr,
                                        with_peers ? &peers->action[r] : nullptr);
    const double q = mlp_forward(agent.critic, x, cache_a)[0];
    const double err = q - y;
    report.critic_loss += err * err;
    // d/dq of (q - y)^2 / (2n); the 1/n makes the loss a batch mean.
    mlp_backward(agent.critic, cache_a, {err / static_cast<double>(n)}, critic_grads);
  }
  report.critic_loss /= static_cast<double>(n);
  agent.opt_critic.apply(agent.critic, critic_grads);

  // --- actor ---
  MlpGrads actor_grads;
  actor_grads.match(agent.actor);
  MlpGrads scratch;
  scratch.match(agent.critic);
  for (std::size_t r = 0; r < n; ++r) {
    const Transition& t = batch[r];
    const auto& mu = mlp_forward(agent.actor, t.state, cache_a);
    const auto x = detail::critic_input(t.state, mu,
                                        with_peers ? &peers->state[r] : nullptr,
                                        with_peers ? &peers->action[r] : nullptr);
    const double q = mlp_forward(agent.critic, x, cache_b)[0];
    report.actor_objective += q;
    // dQ/da: backprop a unit upstream through the critic, slice the action
    // block of the input gradient.
    scratch.zero();
    const auto dx = mlp_backward(agent.critic, cache_b, {1.0}, scratch);
    std::vector<double> dq_da(dx.begin() + t.state.size(),
                              dx.begin() + t.state.size() + kActionDim);
    // Ascent on Q == descent on -Q; also average over the batch.
    for (double& v : dq_da) v = -v / static_cast<double>(n);
    mlp_backward(agent.actor, cache_a, dq_da, actor_grads);
  }
  report.actor_objective /= static_cast<double>(n);
  agent.opt_actor.apply(agent.actor, actor_grads);

  return report;
}

}  // namespace rowbench::rl
