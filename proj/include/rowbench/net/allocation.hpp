// Right-of-way allocation: the four width fractions of one edge and the
// smooth map from unconstrained actor outputs onto the constrained simplex.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace rowbench::net {

// Lower bounds for the three controllable fractions. Streets keep a sliver of
// sidewalk no matter what the policy asks for; driving lanes and parking may
// go to zero.
struct ProjectionConfig {
  double min_sidewalk_frac = 0.05;
  double min_veh_frac = 0.0;
  double min_park_frac = 0.0;

  double minima_sum() const { return min_sidewalk_frac + min_veh_frac + min_park_frac; }
};

struct RowAllocation {
  double beta_sidewalk = 0.0;
  double beta_veh = 0.0;
  double beta_faci = 0.0;
  double beta_park = 0.0;

  double sum() const { return beta_sidewalk + beta_veh + beta_faci + beta_park; }
};

// Maps three unconstrained reals onto a valid allocation:
//
//   beta_i = min_i + (1 - beta_faci - sum(min)) * exp(raw_i) / sum_j exp(raw_j)
//
// for i in {sidewalk, veh, park}. The normalized-exponential term makes the
// map smooth in the raw values and invariant to adding a constant to all
// three, and the construction guarantees the four fractions sum to 1.
inline RowAllocation project_action(const std::array<double, 3>& raw, double beta_faci,
                                    const ProjectionConfig& cfg = {}) {
  for (double r : raw) {
    if (!std::isfinite(r)) throw std::invalid_argument("project_action: non-finite raw input");
  }
  if (beta_faci < 0.0 || !std::isfinite(beta_faci))
    throw std::invalid_argument("project_action: invalid beta_faci");
  const double residual = 1.0 - beta_faci - cfg.minima_sum();
  if (!(residual > 0.0))
    throw std::invalid_argument("project_action: beta_faci + minima leave no residual width");

  // Subtract the max before exponentiating; exp(50) is fine but exp(1000)
  // is not, and shift invariance makes this free.
  const double shift = std::max({raw[0], raw[1], raw[2]});
  const double e0 = std::exp(raw[0] - shift);
  const double e1 = std::exp(raw[1] - shift);
  const double e2 = std::exp(raw[2] - shift);
  const double denom = e0 + e1 + e2;

  RowAllocation a;
  a.beta_faci = beta_faci;
  a.beta_sidewalk = cfg.min_sidewalk_frac + residual * e0 / denom;
  a.beta_veh = cfg.min_veh_frac + residual * e1 / denom;
  a.beta_park = cfg.min_park_frac + residual * e2 / denom;
  return a;
}

// True when the four fractions sum to 1 (tolerance 1e-9) and respect minima.
inline bool allocation_valid(const RowAllocation& a, const ProjectionConfig& cfg = {},
                             double tol = 1e-9) {
  return std::abs(a.sum() - 1.0) <= tol &&
         a.beta_sidewalk >= cfg.min_sidewalk_frac - tol &&
         a.beta_veh >= cfg.min_veh_frac - tol && a.beta_park >= cfg.min_park_frac - tol &&
         a.beta_faci >= -tol;
}

}  // namespace rowbench::net
