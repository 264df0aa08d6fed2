#pragma once

#include <cstdint>

namespace rowbench::sim {

// Per-edge aggregates over one slot. Speed statistics come from snapshot
// sampling every obs_interval_s: at each snapshot every trip present on the
// edge contributes one relative-speed sample (v / v_max of its mode). Counts
// are distinct trips seen at any snapshot; demand and expiry are event counts
// over the whole slot.
struct SlotObservation {
  std::int64_t np = 0;  // distinct pedestrians observed
  std::int64_t nv = 0;  // distinct vehicles observed
  double mean_rel_ped_speed = 0.0;  // 0 when np == 0
  double mean_rel_veh_speed = 0.0;  // 0 when nv == 0
  std::int64_t k_dem = 0;           // parking requests targeting the edge
  std::int64_t k_park = 0;          // bay capacity under the slot's layout
  double k_occupied_mean = 0.0;     // mean occupied bays over snapshots
  std::int64_t expired_requests = 0;
};

}  // namespace rowbench::sim
