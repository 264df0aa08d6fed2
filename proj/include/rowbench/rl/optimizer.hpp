#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rowbench/rl/mlp.hpp"

namespace rowbench::rl {

// Per-parameter adaptive step size: squared-gradient accumulator with decay
// and bias correction (RMSProp-style, no momentum). Always descends; callers
// encode ascent by negating their gradient.
class AdaptiveSgd {
 public:
  AdaptiveSgd() = default;
  AdaptiveSgd(double lr, double decay = 0.999, double eps = 1e-8)
      : lr_(lr), decay_(decay), eps_(eps) {}

  void attach(const Mlp& net) {
    acc_.match(net);
    step_ = 0;
  }

  void apply(Mlp& net, const MlpGrads& grads) {
    ++step_;
    const double correction = 1.0 - std::pow(decay_, static_cast<double>(step_));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      update_block(net.weights[l], grads.weights[l], acc_.weights[l], correction);
      update_block(net.biases[l], grads.biases[l], acc_.biases[l], correction);
    }
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  std::int64_t step_count() const { return step_; }
  const MlpGrads& accumulator() const { return acc_; }

  // Checkpoint restore.
  void restore(MlpGrads acc, std::int64_t step) {
    acc_ = std::move(acc);
    step_ = step;
  }

 private:
  void update_block(std::vector<double>& params, const std::vector<double>& g,
                    std::vector<double>& acc, double correction) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      acc[i] = decay_ * acc[i] + (1.0 - decay_) * g[i] * g[i];
      const double hat = acc[i] / correction;
      params[i] -= lr_ * g[i] / (std::sqrt(hat) + eps_);
    }
  }

  double lr_ = 1e-3;
  double decay_ = 0.999;
  double eps_ = 1e-8;
  MlpGrads acc_;
  std::int64_t step_ = 0;
};

}  // namespace rowbench::rl
