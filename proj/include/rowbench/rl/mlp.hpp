// Small dense networks with exact reverse-mode gradients.
//
// Parameters are plain double vectors (row-major weight matrices), forward
// passes run against a caller-owned cache so the hot loops never allocate,
// and backward returns gradients for every weight, bias, and the input
// vector. Hidden layers are rectifiers; the output head is either identity
// (critics) or scale * tanh (actors).

#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "rowbench/rng.hpp"

namespace rowbench::rl {

enum class OutputActivation { identity, bounded };

struct Mlp {
  std::vector<int> widths;  // [input, hidden..., output]
  OutputActivation output_activation = OutputActivation::identity;
  double output_scale = 1.0;               // bound for the bounded head
  std::vector<std::vector<double>> weights;  // [layer][out * in], row-major
  std::vector<std::vector<double>> biases;   // [layer][out]

  std::size_t layer_count() const { return weights.size(); }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
  }
};

// Glorot-uniform weights, zero biases.
inline Mlp make_mlp(std::vector<int> widths, OutputActivation out_act, double out_scale,
                    SplitMix64& rng) {
  if (widths.size() < 2) throw std::invalid_argument("make_mlp: need at least two widths");
  Mlp net;
  net.widths = std::move(widths);
  net.output_activation = out_act;
  net.output_scale = out_scale;
  for (std::size_t l = 0; l + 1 < net.widths.size(); ++l) {
    const int in = net.widths[l], out = net.widths[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::vector<double> w(static_cast<std::size_t>(in) * out);
    for (double& v : w) v = rng.uniform(-limit, limit);
    net.weights.push_back(std::move(w));
    net.biases.push_back(std::vector<double>(out, 0.0));
  }
  return net;
}

// Reusable activations from one forward pass. act[0] is the input copy;
// act[l+1] is layer l's output; pre[l] holds layer l's pre-activation.
struct MlpCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> act;
};

inline const std::vector<double>& mlp_forward(const Mlp& net, const std::vector<double>& input,
                                              MlpCache& cache) {
  const std::size_t layers = net.layer_count();
  if (static_cast<int>(input.size()) != net.widths[0])
    throw std::invalid_argument("mlp_forward: input width mismatch");
  cache.pre.resize(layers);
  cache.act.resize(layers + 1);
  cache.act[0] = input;

  for (std::size_t l = 0; l < layers; ++l) {
    const int in = net.widths[l], out = net.widths[l + 1];
    auto& z = cache.pre[l];
    z.assign(out, 0.0);
    const auto& a = cache.act[l];
    const auto& w = net.weights[l];
    for (int o = 0; o < out; ++o) {
      const double* row = w.data() + static_cast<std::size_t>(o) * in;
      double acc = net.biases[l][o];
      for (int i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = acc;
    }
    auto& y = cache.act[l + 1];
    y.resize(out);
    const bool last = l + 1 == layers;
    if (!last) {
      for (int o = 0; o < out; ++o) y[o] = z[o] > 0.0 ? z[o] : 0.0;
    } else if (net.output_activation == OutputActivation::identity) {
      y = z;
    } else {
      for (int o = 0; o < out; ++o) y[o] = net.output_scale * std::tanh(z[o]);
    }
  }
  return cache.act[layers];
}

struct MlpGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  void match(const Mlp& net) {
    weights.resize(net.weights.size());
    biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
      weights[l].assign(net.weights[l].size(), 0.0);
      biases[l].assign(net.biases[l].size(), 0.0);
    }
  }

  void zero() {
    for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
  }

  void scale(double c) {
    for (auto& w : weights)
      for (double& v : w) v *= c;
    for (auto& b : biases)
      for (double& v : b) v *= c;
  }
};

// Accumulates d(output . upstream)/d(params) into `grads` (+=) and returns
// the gradient with respect to the input. `cache` must hold the forward pass
// of the same input.
inline std::vector<double> mlp_backward(const Mlp& net, const MlpCache& cache,
                                        const std::vector<double>& upstream, MlpGrads& grads) {
  const std::size_t layers = net.layer_count();
  if (upstream.size() != cache.act[layers].size())
    throw std::invalid_argument("mlp_backward: upstream width mismatch");

  std::vector<double> dz = upstream;
  // Output head derivative.
  if (net.output_activation == OutputActivation::bounded) {
    const auto& y = cache.act[layers];
    for (std::size_t o = 0; o < dz.size(); ++o) {
      const double th = y[o] / net.output_scale;  // tanh(z)
      dz[o] *= net.output_scale * (1.0 - th * th);
    }
  }

  for (std::size_t l = layers; l-- > 0;) {
    const int in = net.widths[l], out = net.widths[l + 1];
    const auto& a = cache.act[l];
    auto& gw = grads.weights[l];
    auto& gb = grads.biases[l];
    std::vector<double> da(in, 0.0);
    const auto& w = net.weights[l];
    for (int o = 0; o < out; ++o) {
      const double d = dz[o];
      gb[o] += d;
      double* grow = gw.data() + static_cast<std::size_t>(o) * in;
      const double* wrow = w.data() + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) {
        grow[i] += d * a[i];
        da[i] += d * wrow[i];
      }
    }
    if (l > 0) {
      // Rectifier gate of the previous hidden layer.
      const auto& z_prev = cache.pre[l - 1];
      dz.resize(in);
      for (int i = 0; i < in; ++i) dz[i] = z_prev[i] > 0.0 ? da[i] : 0.0;
    } else {
      return da;
    }
  }
  return {};
}

// Convenience single-shot gradient of (output . upstream) for tests.
inline MlpGrads mlp_gradients(const Mlp& net, const std::vector<double>& input,
                              const std::vector<double>& upstream) {
  MlpCache cache;
  mlp_forward(net, input, cache);
  MlpGrads g;
  g.match(net);
  mlp_backward(net, cache, upstream, g);
  return g;
}

}  // namespace rowbench::rl
