// Quantization of continuous width fractions into the discrete street layout
// the simulator operates on: whole driving lanes, a parking strip that either
// fits or does not, and a metric sidewalk width.

#pragma once

#include <cmath>

#include "rowbench/net/allocation.hpp"
#include "rowbench/net/types.hpp"

namespace rowbench::net {

struct QuantizationConfig {
  double lane_width_m = 3.0;
  double parking_strip_width_m = 2.0;
  double bay_length_m = 6.0;
};

struct DiscreteLayout {
  int n_lanes = 0;
  int parking_capacity = 0;  // bays along the edge
  double sidewalk_width_m = 0.0;
  bool parking_strip_active = false;
};

inline DiscreteLayout quantize_layout(const RowAllocation& alloc, const DirectedEdge& edge,
                                      const QuantizationConfig& geom = {}) {
  DiscreteLayout out;
  out.n_lanes = static_cast<int>(std::floor(alloc.beta_veh * edge.width_m / geom.lane_width_m));
  out.parking_strip_active = alloc.beta_park * edge.width_m >= geom.parking_strip_width_m;
  out.parking_capacity =
      out.parking_strip_active ? static_cast<int>(std::floor(edge.length_m / geom.bay_length_m)) : 0;
  out.sidewalk_width_m = alloc.beta_sidewalk * edge.width_m;
  return out;
}

}  // namespace rowbench::net
