#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rowbench/net/allocation.hpp"
#include "rowbench/rl/config.hpp"
#include "rowbench/sim/observation.hpp"

namespace rowbench::rl {

inline constexpr int kFeatureDim = 11;

// Per-edge agent state: the allocation in force during the observed slot,
// the slot's observation summary, and a cyclic encoding of the upcoming
// slot's time of day.
//
//   [beta_sidewalk, beta_veh, beta_park,
//    np / np_scale, nv / nv_scale,
//    mean_rel_ped_speed, mean_rel_veh_speed,
//    k_dem / k_dem_scale, k_occupied_mean / max(k_park, 1),
//    sin(2 pi t / slots), cos(2 pi t / slots)]
inline std::vector<double> feature_vector(const sim::SlotObservation& obs,
                                          const net::RowAllocation& alloc, int slot_index,
                                          int slots_per_day, const FeatureScales& scales) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  const double phase = two_pi * static_cast<double>(slot_index) / slots_per_day;
  return {alloc.beta_sidewalk,
          alloc.beta_veh,
          alloc.beta_park,
          static_cast<double>(obs.np) / scales.np_scale,
          static_cast<double>(obs.nv) / scales.nv_scale,
          obs.mean_rel_ped_speed,
          obs.mean_rel_veh_speed,
          static_cast<double>(obs.k_dem) / scales.k_dem_scale,
          obs.k_occupied_mean / std::max<double>(static_cast<double>(obs.k_park), 1.0),
          std::sin(phase),
          std::cos(phase)};
}

}  // namespace rowbench::rl
