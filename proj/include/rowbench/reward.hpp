// The four per-edge-per-slot sub-rewards and their aggregation.
//
//   r_sidewalk = beta_sidewalk
//   r_ped      = mean over the slot's pedestrian samples of v / v_max_ped, 0 when empty
//   r_veh      = mean over the slot's vehicle samples of v / v_max_veh, 0 when empty
//   r_park     = min(k_dem / k_park, 1), 0 when k_park = 0
//
// An edge with no observed road users scores 0, not 1: an empty street is
// not an efficient one. The parking term is a service level, capped at 1 so
// that starving provision below demand is never rewarded.

#pragma once

#include <algorithm>
#include <cstdint>
#include <span>

#include "rowbench/net/allocation.hpp"
#include "rowbench/sim/observation.hpp"

namespace rowbench::reward {

struct RewardVector {
  double r_sidewalk = 0.0;
  double r_ped = 0.0;
  double r_veh = 0.0;
  double r_park = 0.0;
  double total = 0.0;
};

inline double reward_sidewalk(const net::RowAllocation& alloc) { return alloc.beta_sidewalk; }

inline double reward_ped(const sim::SlotObservation& obs) {
  return obs.np == 0 ? 0.0 : obs.mean_rel_ped_speed;
}

inline double reward_veh(const sim::SlotObservation& obs) {
  return obs.nv == 0 ? 0.0 : obs.mean_rel_veh_speed;
}

inline double reward_park(std::int64_t k_dem, std::int64_t k_park) {
  if (k_park <= 0) return 0.0;
  return std::min(static_cast<double>(k_dem) / static_cast<double>(k_park), 1.0);
}

inline RewardVector slot_reward(const net::RowAllocation& alloc, const sim::SlotObservation& obs) {
  RewardVector r;
  r.r_sidewalk = reward_sidewalk(alloc);
  r.r_ped = reward_ped(obs);
  r.r_veh = reward_veh(obs);
  r.r_park = reward_park(obs.k_dem, obs.k_park);
  r.total = r.r_sidewalk + r.r_ped + r.r_veh + r.r_park;
  return r;
}

// Sum of slot totals over every (edge, slot) pair supplied.
inline double episode_return(std::span<const RewardVector> rewards) {
  double sum = 0.0;
  for (const auto& r : rewards) sum += r.total;
  return sum;
}

}  // namespace rowbench::reward
