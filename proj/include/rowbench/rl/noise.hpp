#pragma once

#include <array>
#include <cmath>

#include "rowbench/rng.hpp"

namespace rowbench::rl {

// Ornstein-Uhlenbeck exploration noise, exact unit-interval discretization:
//
//   x' = x * exp(-theta) + sigma * sqrt((1 - exp(-2 theta)) / (2 theta)) * N(0,1)
//
// so the stationary standard deviation is exactly sigma / sqrt(2 theta).
class OuNoise {
 public:
  OuNoise() = default;
  OuNoise(double theta, double sigma) : theta_(theta), sigma_(sigma) {}

  void reset() { value_ = {0.0, 0.0, 0.0}; }

  void set_sigma(double sigma) { sigma_ = sigma; }
  double sigma() const { return sigma_; }
  double theta() const { return theta_; }

  const std::array<double, 3>& value() const { return value_; }
  void restore(const std::array<double, 3>& v) { value_ = v; }

  std::array<double, 3> sample(SplitMix64& rng) {
    const double a = std::exp(-theta_);
    const double b = sigma_ * std::sqrt((1.0 - std::exp(-2.0 * theta_)) / (2.0 * theta_));
    for (double& x : value_) x = a * x + b * rng.normal();
    return value_;
  }

 private:
  double theta_ = 0.15;
  double sigma_ = 0.2;
  std::array<double, 3> value_{0.0, 0.0, 0.0};
};

}  // namespace rowbench::rl
