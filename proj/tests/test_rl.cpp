#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <vector>

#include "rowbench/rl/agent.hpp"
#include "rowbench/rl/config.hpp"
#include "rowbench/rl/mlp.hpp"
#include "rowbench/rl/noise.hpp"
#include "rowbench/rl/optimizer.hpp"
#include "rowbench/rl/replay.hpp"
#include "rowbench/rng.hpp"

using namespace rowbench;
using rl::Mlp;
using rl::MlpCache;
using rl::MlpGrads;
using rl::OutputActivation;

namespace {

double forward1(const Mlp& net, const std::vector<double>& x) {
  MlpCache c;
  return rl::mlp_forward(net, x, c)[0];
}

// Flatten helpers for the finite-difference check.
std::vector<double*> parameter_pointers(Mlp& net) {
  std::vector<double*> out;
  for (auto& w : net.weights)
    for (double& v : w) out.push_back(&v);
  for (auto& b : net.biases)
    for (double& v : b) out.push_back(&v);
  return out;
}

std::vector<double> flatten(const MlpGrads& g) {
  std::vector<double> out;
  for (const auto& w : g.weights) out.insert(out.end(), w.begin(), w.end());
  for (const auto& b : g.biases) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

TEST_CASE("mlp_forward: zero net annihilates, identity layer passes through") {
  SplitMix64 rng(1);
  Mlp zero = rl::make_mlp({3, 2}, OutputActivation::identity, 1.0, rng);
  for (auto& w : zero.weights) std::fill(w.begin(), w.end(), 0.0);
  MlpCache cache;
  const auto& out = rl::mlp_forward(zero, {1.0, -2.0, 3.0}, cache);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);

  Mlp ident = rl::make_mlp({3, 3}, OutputActivation::identity, 1.0, rng);
  for (auto& w : ident.weights) std::fill(w.begin(), w.end(), 0.0);
  for (int i = 0; i < 3; ++i) ident.weights[0][i * 3 + i] = 1.0;
  const auto& out2 = rl::mlp_forward(ident, {0.5, -1.5, 2.5}, cache);
  CHECK(out2[0] == 0.5);
  CHECK(out2[1] == -1.5);
  CHECK(out2[2] == 2.5);
}

TEST_CASE("mlp_forward matches a hand-computed 2-3-1 pass") {
  // Weights chosen small; expected value computed by hand:
  //   h = relu(W1 x + b1), y = W2 h + b2
  //   x = (1, 2)
  //   W1 = [[0.1, 0.2], [-0.3, 0.4], [0.5, -0.6]], b1 = (0.01, 0.02, 0.03)
  //   z1 = (0.51, 0.52, -0.67) -> h = (0.51, 0.52, 0)
  //   W2 = [[1.0, -1.0, 0.5]], b2 = 0.25 -> y = 0.51 - 0.52 + 0 + 0.25 = 0.24
  SplitMix64 rng(1);
  Mlp net = rl::make_mlp({2, 3, 1}, OutputActivation::identity, 1.0, rng);
  net.weights[0] = {0.1, 0.2, -0.3, 0.4, 0.5, -0.6};
  net.biases[0] = {0.01, 0.02, 0.03};
  net.weights[1] = {1.0, -1.0, 0.5};
  net.biases[1] = {0.25};
  CHECK(forward1(net, {1.0, 2.0}) == Catch::Approx(0.24).margin(1e-15));
}

TEST_CASE("mlp_forward rejects shape mismatches") {
  SplitMix64 rng(1);
  Mlp net = rl::make_mlp({4, 2}, OutputActivation::identity, 1.0, rng);
  MlpCache cache;
  CHECK_THROWS_AS(rl::mlp_forward(net, {1.0, 2.0}, cache), std::invalid_argument);
}

TEST_CASE("gradient of a 1-1 identity net w.r.t. its weight is the input") {
  SplitMix64 rng(1);
  Mlp net = rl::make_mlp({1, 1}, OutputActivation::identity, 1.0, rng);
  net.weights[0] = {0.7};
  net.biases[0] = {0.0};
  const auto g = rl::mlp_gradients(net, {3.5}, {1.0});
  CHECK(g.weights[0][0] == Catch::Approx(3.5));
  CHECK(g.biases[0][0] == Catch::Approx(1.0));
}

TEST_CASE("rectifier blocks gradient at negative pre-activations") {
  SplitMix64 rng(1);
  Mlp net = rl::make_mlp({1, 1, 1}, OutputActivation::identity, 1.0, rng);
  net.weights[0] = {1.0};
  net.biases[0] = {-5.0};  // pre-activation -4 at x=1: rectifier off
  net.weights[1] = {2.0};
  net.biases[1] = {0.0};
  const auto g = rl::mlp_gradients(net, {1.0}, {1.0});
  CHECK(g.weights[0][0] == 0.0);
  CHECK(g.biases[0][0] == 0.0);
  CHECK(g.weights[1][0] == 0.0);  // hidden activation is 0
}

TEST_CASE("analytic gradients match central finite differences on random shapes") {
  SplitMix64 rng(20240811);
  const double step = 1e-5;
  for (int trial = 0; trial < 22; ++trial) {
    // Random depth 2..4, widths 1..9, random head.
    std::vector<int> widths;
    const int layers = 2 + static_cast<int>(rng.uniform_index(3));
    for (int l = 0; l <= layers; ++l) widths.push_back(1 + static_cast<int>(rng.uniform_index(9)));
    const bool bounded = rng.bernoulli(0.5);
    Mlp net = rl::make_mlp(widths, bounded ? OutputActivation::bounded : OutputActivation::identity,
                           bounded ? 2.0 : 1.0, rng);

    // Central differences are blind near rectifier kinks: resample the probe
    // until every hidden pre-activation clears the kink by a wide margin.
    std::vector<double> input(widths.front());
    for (int attempt = 0;; ++attempt) {
      REQUIRE(attempt < 200);
      for (double& v : input) v = rng.uniform(-2.0, 2.0);
      MlpCache probe;
      rl::mlp_forward(net, input, probe);
      double min_abs = 1e9;  // hidden layers only; the output head is smooth
      for (std::size_t l = 0; l + 1 < net.layer_count(); ++l)
        for (double z : probe.pre[l]) min_abs = std::min(min_abs, std::abs(z));
      if (min_abs > 1e-3) break;
    }
    std::vector<double> upstream(widths.back());
    for (double& v : upstream) v = rng.uniform(-1.0, 1.0);

    const auto analytic = flatten(rl::mlp_gradients(net, input, upstream));

    auto objective = [&]() {
      MlpCache c;
      const auto& y = rl::mlp_forward(net, input, c);
      double s = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * upstream[i];
      return s;
    };
    const auto params = parameter_pointers(net);
    REQUIRE(params.size() == analytic.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = *params[i];
      *params[i] = saved + step;
      const double hi = objective();
      *params[i] = saved - step;
      const double lo = objective();
      *params[i] = saved;
      const double numeric = (hi - lo) / (2.0 * step);
      const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
      CAPTURE(trial, i, numeric, analytic[i]);
      REQUIRE(std::abs(numeric - analytic[i]) / denom < 1e-4);
    }
  }
}

TEST_CASE("replay buffer keeps FIFO order and evicts oldest first") {
  rl::ReplayBuffer<int> buf(5);
  for (int i = 0; i < 8; ++i) buf.push(i);  // capacity + 3
  REQUIRE(buf.size() == 5);
  // First 3 inserted are gone; order of the rest preserved.
  for (std::size_t i = 0; i < 5; ++i) CHECK(buf.at(i) == static_cast<int>(i) + 3);
  CHECK(buf.total_pushed() == 8);
}

TEST_CASE("replay sampling is uniform without replacement within a batch") {
  rl::ReplayBuffer<int> buf(100);
  for (int i = 0; i < 100; ++i) buf.push(i);
  SplitMix64 rng(5);
  std::vector<int> counts(100, 0);
  for (int rounds = 0; rounds < 2000; ++rounds) {
    const auto idx = buf.sample_indices(10, rng);
    std::vector<bool> seen(100, false);
    for (std::size_t j : idx) {
      REQUIRE(!seen[j]);  // no replacement
      seen[j] = true;
      ++counts[j];
    }
  }
  // Each index expected 200 draws; loose uniformity band.
  for (int c : counts) CHECK(std::abs(c - 200) < 80);
  CHECK_THROWS_AS(buf.sample_indices(101, rng), std::invalid_argument);
}

TEST_CASE("OU noise: zero sigma is silent; stationary sd matches sigma/sqrt(2 theta)") {
  rl::OuNoise silent(0.15, 0.0);
  SplitMix64 rng(2);
  const auto v = silent.sample(rng);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 0.0);

  rl::OuNoise noise(0.15, 0.2);
  SplitMix64 rng2(20240811);
  double sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto x = noise.sample(rng2);
    sum_sq += x[0] * x[0];
  }
  const double sd = std::sqrt(sum_sq / n);
  const double expected = 0.2 / std::sqrt(2.0 * 0.15);
  CHECK(std::abs(sd - expected) / expected < 0.05);
}

TEST_CASE("act is deterministic without exploration and under zero sigma") {
  rl::TrainConfig cfg;
  SplitMix64 init(3);
  auto agent = rl::make_agent("e1_2", 11, 14, cfg, init);
  std::vector<double> state(11, 0.3);
  SplitMix64 rng(1);
  const auto a = rl::act(agent, state, false, rng);
  const auto b = rl::act(agent, state, false, rng);
  CHECK(a == b);

  agent.noise.set_sigma(0.0);
  agent.noise.reset();
  const auto c = rl::act(agent, state, true, rng);
  CHECK(c == a);
}

TEST_CASE("soft_update: full copy, midpoint, closed form") {
  rl::TrainConfig cfg;
  SplitMix64 init(4);
  auto agent = rl::make_agent("e", 4, 7, cfg, init);

  // tau = 1: exact copy.
  auto copy = agent;
  for (auto& w : copy.actor.weights)
    for (double& v : w) v += 0.5;
  copy.target_actor = agent.target_actor;
  rl::soft_update(copy, 1.0);
  CHECK(copy.target_actor.weights[0][0] == copy.actor.weights[0][0]);

  // Midpoint.
  Mlp target = agent.actor;
  for (auto& w : target.weights)
    for (double& v : w) v = 0.0;
  Mlp source = agent.actor;
  for (auto& w : source.weights)
    for (double& v : w) v = 2.0;
  rl::soft_update_net(target, source, 0.5);
  CHECK(target.weights[0][0] == Catch::Approx(1.0));

  // Repeated tau = 0.01 from 0 toward 1: after k steps, 1 - 0.99^k.
  Mlp t2 = agent.actor;
  for (auto& w : t2.weights)
    for (double& v : w) v = 0.0;
  for (auto& b : t2.biases)
    for (double& v : b) v = 0.0;
  Mlp s2 = t2;
  for (auto& w : s2.weights)
    for (double& v : w) v = 1.0;
  const int k = 137;
  for (int i = 0; i < k; ++i) rl::soft_update_net(t2, s2, 0.01);
  const double expected = 1.0 - std::pow(0.99, k);
  CHECK(std::abs(t2.weights[0][0] - expected) <= 1e-12);
}

TEST_CASE("target formula: terminal flags and gamma = 0 reduce y to r exactly") {
  // Behavioral identity: if y = r + gamma * (1 - terminal) * Q_target(...),
  // then with terminal batches (any gamma) or gamma = 0 the next state must
  // be completely ignored -- two updates differing only in next_state give
  // bitwise-identical parameters.
  rl::TrainConfig cfg;
  cfg.gamma = 0.9;
  SplitMix64 init(5);
  const auto fresh = rl::make_agent("e", 3, 6, cfg, init);

  auto make_batch = [](bool terminal, double next) {
    rl::Transition t;
    t.state = {0.1, 0.2, 0.3};
    t.action = {0.05, -0.05, 0.1};
    t.reward = 1.7;
    t.next_state = {next, -next, 2.0 * next};
    t.terminal = terminal;
    return std::vector<rl::Transition>(8, t);
  };

  auto a = fresh;
  auto b = fresh;
  rl::update_agent(a, make_batch(true, 0.0), nullptr, cfg);
  rl::update_agent(b, make_batch(true, 5.0), nullptr, cfg);
  CHECK(a.critic.weights == b.critic.weights);
  CHECK(a.critic.biases == b.critic.biases);

  auto c = fresh;
  auto d = fresh;
  cfg.gamma = 0.0;
  rl::update_agent(c, make_batch(false, 0.0), nullptr, cfg);
  rl::update_agent(d, make_batch(false, 5.0), nullptr, cfg);
  CHECK(c.critic.weights == d.critic.weights);
  // And gamma 0 equals the terminal update on the same rewards: y = r both ways.
  CHECK(c.critic.weights == a.critic.weights);
}

TEST_CASE("critic converges to the geometric fixed point r / (1 - gamma)") {
  rl::TrainConfig cfg;
  cfg.gamma = 0.9;
  cfg.critic_lr = 0.1;
  cfg.actor_lr = 0.0;   // frozen actor: mu stays at its initialization
  cfg.tau = 0.1;        // targets track fast enough for 500 updates
  SplitMix64 init(6);
  auto agent = rl::make_agent("e", 3, 6, cfg, init);
  // Zero the actor so mu(s') is exactly 0 and the fixed point is clean.
  for (auto& w : agent.actor.weights)
    for (double& v : w) v = 0.0;
  for (auto& b : agent.actor.biases)
    for (double& v : b) v = 0.0;
  agent.target_actor = agent.actor;

  rl::Transition t;
  t.state = {0.5, -0.5, 0.25};
  t.action = {0.0, 0.0, 0.0};
  t.reward = 1.0;
  t.next_state = t.state;  // self-loop
  t.terminal = false;
  std::vector<rl::Transition> batch(16, t);

  for (int i = 0; i < 500; ++i) {
    rl::update_agent(agent, batch, nullptr, cfg);
    rl::soft_update(agent, cfg.tau);
  }
  MlpCache c;
  std::vector<double> x = {0.5, -0.5, 0.25, 0.0, 0.0, 0.0};
  const double q = rl::mlp_forward(agent.critic, x, c)[0];
  CHECK(std::abs(q - 10.0) / 10.0 < 0.05);
}

TEST_CASE("actor ascends a hand-built L1 critic toward the optimum") {
  // Critic computes Q(s, a) = -sum_i |a_i - a*_i| exactly with one rectifier
  // layer; the actor should walk toward a* and the distance must shrink
  // monotonically over 100 steps. The optimum sits far enough away that no
  // component can overshoot within the step budget.
  const std::array<double, 3> target{1.0, -0.8, 0.9};
  rl::TrainConfig cfg;
  cfg.actor_lr = 1e-4;
  cfg.critic_lr = 0.0;  // critic frozen at the constructed function
  cfg.gamma = 0.9;
  SplitMix64 init(7);
  auto agent = rl::make_agent("e", 2, 5, cfg, init);

  // Critic input = [s(2), a(3)]; hidden 6 units: relu(+-(a_i - a*_i)).
  agent.critic = rl::make_mlp({5, 6, 1}, OutputActivation::identity, 1.0, init);
  for (auto& w : agent.critic.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : agent.critic.biases) std::fill(b.begin(), b.end(), 0.0);
  for (int i = 0; i < 3; ++i) {
    agent.critic.weights[0][(2 * i) * 5 + 2 + i] = 1.0;  // +(a_i - t_i)
    agent.critic.biases[0][2 * i] = -target[i];
    agent.critic.weights[0][(2 * i + 1) * 5 + 2 + i] = -1.0;  // -(a_i - t_i)
    agent.critic.biases[0][2 * i + 1] = target[i];
  }
  for (int h = 0; h < 6; ++h) agent.critic.weights[1][h] = -1.0;
  agent.target_critic = agent.critic;

  rl::Transition t;
  t.state = {0.2, -0.1};
  t.action = {0.0, 0.0, 0.0};
  t.reward = 0.0;
  t.next_state = t.state;
  t.terminal = true;
  std::vector<rl::Transition> batch(8, t);

  MlpCache c;
  auto distance = [&]() {
    const auto& mu = rl::mlp_forward(agent.actor, t.state, c);
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d += (mu[i] - target[i]) * (mu[i] - target[i]);
    return std::sqrt(d);
  };

  double prev = distance();
  for (int step = 0; step < 100; ++step) {
    rl::update_agent(agent, batch, nullptr, cfg);
    const double d = distance();
    REQUIRE(d < prev);
    prev = d;
  }
}

TEST_CASE("agents are isolated: permuting the set leaves an update unchanged") {
  rl::TrainConfig cfg;
  cfg.critic_scope = rl::CriticScope::local;
  SplitMix64 init_a(10), init_b(11), init_c(12);
  auto a1 = rl::make_agent("eA", 4, 7, cfg, init_a);
  auto b1 = rl::make_agent("eB", 4, 7, cfg, init_b);
  auto c1 = rl::make_agent("eC", 4, 7, cfg, init_c);
  auto a2 = a1;
  auto b2 = b1;
  auto c2 = c1;

  SplitMix64 batch_rng(77);
  std::vector<rl::Transition> batch;
  for (int i = 0; i < 8; ++i) {
    rl::Transition t;
    t.state = {batch_rng.uniform01(), batch_rng.uniform01(), batch_rng.uniform01(),
               batch_rng.uniform01()};
    t.action = {batch_rng.uniform(-1, 1), batch_rng.uniform(-1, 1), batch_rng.uniform(-1, 1)};
    t.reward = batch_rng.uniform01();
    t.next_state = t.state;
    t.terminal = false;
    batch.push_back(t);
  }

  // Update in two different agent orders; each agent sees the same batch.
  rl::update_agent(a1, batch, nullptr, cfg);
  rl::update_agent(b1, batch, nullptr, cfg);
  rl::update_agent(c1, batch, nullptr, cfg);

  rl::update_agent(c2, batch, nullptr, cfg);
  rl::update_agent(a2, batch, nullptr, cfg);
  rl::update_agent(b2, batch, nullptr, cfg);

  CHECK(a1.critic.weights[0] == a2.critic.weights[0]);
  CHECK(b1.actor.weights[0] == b2.actor.weights[0]);
  CHECK(c1.critic.biases[1] == c2.critic.biases[1]);
}

TEST_CASE("update_agent rejects an empty batch") {
  rl::TrainConfig cfg;
  SplitMix64 init(13);
  auto agent = rl::make_agent("e", 3, 6, cfg, init);
  std::vector<rl::Transition> batch;
  CHECK_THROWS_AS(rl::update_agent(agent, batch, nullptr, cfg), std::invalid_argument);
}
