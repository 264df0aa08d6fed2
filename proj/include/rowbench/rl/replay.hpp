#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rowbench/rng.hpp"

namespace rowbench::rl {

// One agent's view of a stored step.
struct Transition {
  std::vector<double> state;
  std::array<double, 3> action{};
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

// One environment step for all agents, stored once and sliced per agent.
struct JointTransition {
  std::vector<std::vector<double>> state;        // [agent][feature]
  std::vector<std::array<double, 3>> action;     // [agent]
  std::vector<double> reward;                    // [agent]
  std::vector<std::vector<double>> next_state;   // [agent][feature]
  bool terminal = false;

  Transition slice(std::size_t agent) const {
    return Transition{state.at(agent), action.at(agent), reward.at(agent), next_state.at(agent),
                      terminal};
  }
};

// Bounded FIFO with uniform without-replacement batch sampling. Index 0 is
// always the oldest stored element.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  }

  void push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
    } else {
      items_[head_] = std::move(item);
      head_ = (head_ + 1) % capacity_;
    }
    ++total_pushed_;
  }

  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t total_pushed() const { return total_pushed_; }

  const T& at(std::size_t logical) const {
    if (logical >= items_.size()) throw std::out_of_range("ReplayBuffer::at");
    return items_[(head_ + logical) % items_.size()];
  }

  // `batch` distinct indices, uniform over the current contents.
  std::vector<std::size_t> sample_indices(std::size_t batch, SplitMix64& rng) const {
    if (batch > items_.size())
      throw std::invalid_argument("ReplayBuffer: batch larger than stored entries");
    // Partial Fisher-Yates over a lazy index permutation.
    std::vector<std::size_t> picked;
    picked.reserve(batch);
    std::vector<std::pair<std::size_t, std::size_t>> swaps;  // sparse overrides
    auto lookup = [&](std::size_t i) {
      // Latest override wins.
      for (auto it = swaps.rbegin(); it != swaps.rend(); ++it)
        if (it->first == i) return it->second;
      return i;
    };
    const std::size_t n = items_.size();
    for (std::size_t k = 0; k < batch; ++k) {
      const std::size_t j = k + rng.uniform_index(n - k);
      const std::size_t vj = lookup(j);
      const std::size_t vk = lookup(k);
      picked.push_back(vj);
      swaps.emplace_back(j, vk);
    }
    return picked;
  }

 private:
  std::size_t capacity_;
  std::vector<T> items_;
  std::size_t head_ = 0;  // physical index of the oldest element once full
  std::size_t total_pushed_ = 0;
};

}  // namespace rowbench::rl
