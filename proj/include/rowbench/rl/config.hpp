#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rowbench::rl {

// Which peers a critic conditions on: none, the graph-adjacent edges, or
// every other agent.
enum class CriticScope { local, neighborhood, global };

inline const char* to_string(CriticScope s) {
  switch (s) {
    case CriticScope::local: return "local";
    case CriticScope::neighborhood: return "neighborhood";
    case CriticScope::global: return "global";
  }
  return "?";
}

inline CriticScope critic_scope_from_string(const std::string& s) {
  if (s == "local") return CriticScope::local;
  if (s == "neighborhood") return CriticScope::neighborhood;
  if (s == "global") return CriticScope::global;
  throw std::invalid_argument("unknown critic scope: " + s);
}

struct TrainConfig {
  double gamma = 0.95;
  double tau = 0.01;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t buffer_capacity = 100000;
  std::vector<int> hidden_widths{64, 64};
  double ou_theta = 0.15;
  double ou_sigma = 0.2;
  double ou_sigma_final = 0.02;  // linear decay target over the run
  int updates_per_slot = 1;
  CriticScope critic_scope = CriticScope::neighborhood;
  int episodes = 150;
  std::uint64_t seed = 0;

  double action_scale = 2.0;      // bound of the actor's raw outputs
  double opt_decay = 0.999;       // squared-gradient accumulator decay
  double opt_epsilon = 1e-8;
  int threads = 0;                // 0 = pick from hardware
  int checkpoint_every = 10;      // episodes between checkpoints

  // Exploration sigma for a given episode under the linear decay schedule.
  double sigma_for_episode(int episode) const {
    if (episodes <= 1) return ou_sigma;
    const double f = static_cast<double>(episode) / (episodes - 1);
    return ou_sigma + (ou_sigma_final - ou_sigma) * std::min(1.0, std::max(0.0, f));
  }

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in (0,1]");
    if (!(actor_lr > 0.0) || !(critic_lr > 0.0))
      throw std::invalid_argument("learning rates must be positive");
    if (batch_size == 0 || buffer_capacity == 0)
      throw std::invalid_argument("batch size and buffer capacity must be positive");
    if (episodes < 0) throw std::invalid_argument("episodes must be >= 0");
    if (updates_per_slot < 0) throw std::invalid_argument("updates_per_slot must be >= 0");
  }
};

// Normalization constants for the observation features fed to the agents.
struct FeatureScales {
  double np_scale = 100.0;
  double nv_scale = 100.0;
  double k_dem_scale = 50.0;
};

}  // namespace rowbench::rl
