// Speed-density relations. Edges are mesoscopic: one prevailing speed per
// edge per tick from a linear (Greenshields) fundamental diagram, with jam
// densities derived from the physical constants.

#pragma once

#include <algorithm>
#include <optional>

#include "rowbench/sim/params.hpp"

namespace rowbench::sim {

// Jam density in vehicles per meter per lane: one vehicle every
// (vehicle length + headway distance at the nominal speed).
inline double veh_jam_density(const SimParams& p) {
  return 1.0 / (p.veh_length_m + p.veh_headway_s * p.k_jam_nominal_speed_mps);
}

// v = v_max * max(0, 1 - k / k_jam), clamped to [0, v_max * (1 + speed_factor)].
inline double veh_edge_speed(double density_veh_per_m_per_lane, const SimParams& p,
                             std::optional<double> v_max_override = std::nullopt) {
  const double v_max = v_max_override.value_or(p.veh_max_speed_mps);
  const double k_jam = veh_jam_density(p);
  const double v = v_max * std::max(0.0, 1.0 - density_veh_per_m_per_lane / k_jam);
  return std::clamp(v, 0.0, v_max * (1.0 + p.veh_speed_factor));
}

// Pedestrian jam density in persons per square meter.
inline double ped_jam_density(const SimParams& p) {
  return 1.0 / (p.ped_body_width_m * p.ped_following_gap_m);
}

// Linear speed-density law over the usable sidewalk area. A sidewalk
// narrower than one body width pushes walkers onto the carriageway: they
// keep moving at the spill-over penalty speed (density still computed over a
// body-width strip) until true jam density.
inline double ped_edge_speed(double ped_density_per_m2, double sidewalk_width_m,
                             const SimParams& p) {
  const double k_jam = ped_jam_density(p);
  const double v_free =
      p.ped_max_speed_mps * std::max(0.0, 1.0 - ped_density_per_m2 / k_jam);
  if (sidewalk_width_m < p.ped_body_width_m) {
    if (ped_density_per_m2 >= k_jam) return 0.0;
    return p.ped_spill_speed_frac * p.ped_max_speed_mps;
  }
  return std::clamp(v_free, 0.0, p.ped_max_speed_mps);
}

}  // namespace rowbench::sim
