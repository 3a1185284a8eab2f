#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "odesa/layer.hpp"
#include "odesa/random.hpp"
#include "oracles.hpp"

using namespace odesa;

namespace {

LayerParams small_params(std::size_t neurons = 3, std::size_t inputs = 4) {
  LayerParams p;
  p.n_neurons = neurons;
  p.n_inputs = inputs;
  p.tau_input = 1.0;
  p.tau_trace = 2.0;
  p.eta = 0.2;
  p.eta_thresh = 0.3;
  p.theta_open = 0.05;
  p.theta_init = 0.0;
  return p;
}

double norm(std::span<const double> v) {
  return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

std::vector<double> unit(std::vector<double> v) {
  const double n = norm(v);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

TEST(Layer, InitialRowsAreUnitAndSeeded) {
  Layer a(small_params(5, 7), 3), b(small_params(5, 7), 3), c(small_params(5, 7), 4);
  for (std::size_t n = 0; n < 5; ++n) {
    EXPECT_NEAR(norm(a.weights(n)), 1.0, 1e-12);
    for (double w : a.weights(n)) EXPECT_GE(w, 0.0);
  }
  EXPECT_TRUE(std::equal(a.weight_matrix().begin(), a.weight_matrix().end(), b.weight_matrix().begin()));
  EXPECT_FALSE(std::equal(a.weight_matrix().begin(), a.weight_matrix().end(), c.weight_matrix().begin()));
}

TEST(Layer, WinnerIsBestEligibleNeuron) {
  Layer l(small_params(), 1);
  l.set_weights(0, std::vector<double>{1, 0, 0, 0});
  l.set_weights(1, std::vector<double>{0, 1, 0, 0});
  l.set_weights(2, std::vector<double>{1, 1, 0, 0});
  l.forward({0, 0.0});
  // Context at t=0.5 after a spike on channel 1: ch0 = e^-0.5, ch1 = 1.
  const auto s = l.forward({1, 0.5});
  ASSERT_TRUE(s);
  const auto ctx = unit({std::exp(-0.5), 1.0, 0.0, 0.0});
  std::vector<double> v(3);
  for (std::size_t n = 0; n < 3; ++n) v[n] = dot(l.weights(n), ctx);
  const auto best = std::max_element(v.begin(), v.end()) - v.begin();
  EXPECT_EQ(s->channel, static_cast<std::size_t>(best));
  EXPECT_DOUBLE_EQ(s->time, 0.5);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_NEAR(l.last_membranes()[n], v[n], 1e-12);
}

TEST(Layer, ThresholdExcludesStrongerNeuron) {
  Layer l(small_params(), 1);
  l.set_weights(0, std::vector<double>{1, 0, 0, 0});
  l.set_weights(1, std::vector<double>{1, 1, 0, 0});
  l.set_weights(2, std::vector<double>{0, 0, 1, 0});
  l.set_threshold(0, 1.5);
  const auto s = l.forward({0, 0.0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->channel, 1u);
}

TEST(Layer, TiesGoToLowestIndex) {
  Layer l(small_params(), 1);
  for (std::size_t n = 0; n < 3; ++n) l.set_weights(n, std::vector<double>{0, 1, 0, 0});
  const auto s = l.forward({1, 0.0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->channel, 0u);
}

TEST(Layer, SilentWhenNoNeuronReachesThreshold) {
  Layer l(small_params(), 1);
  for (std::size_t n = 0; n < 3; ++n) l.set_threshold(n, 1.01);
  EXPECT_FALSE(l.forward({2, 0.0}));
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_FALSE(l.has_eligibility(n));
    EXPECT_EQ(l.traces().read(n, 0.0), 0.0);
  }
}

TEST(Layer, RewardMovesTowardCapturedContext) {
  auto p = small_params();
  Layer l(p, 9);
  l.forward({3, 0.0});
  const auto s = l.forward({1, 0.25});
  ASSERT_TRUE(s);
  const std::size_t n = s->channel;
  const std::vector<double> w0(l.weights(n).begin(), l.weights(n).end());
  const std::vector<double> ctx(l.last_context().begin(), l.last_context().end());
  const double v = dot(w0, ctx);
  const double th0 = l.thresholds()[n];

  ASSERT_TRUE(l.reward(n));
  std::vector<double> want(4);
  for (std::size_t i = 0; i < 4; ++i) want[i] = w0[i] + p.eta * (ctx[i] - w0[i]);
  want = unit(want);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(l.weights(n)[i], want[i], 1e-12);
  EXPECT_NEAR(l.thresholds()[n], th0 + p.eta_thresh * (v - th0), 1e-12);
  EXPECT_GT(dot(l.weights(n), ctx), v);
}

TEST(Layer, ThresholdStaysBelowOneOnExactMatch) {
  auto p = small_params(1, 2);
  p.eta = 1.0;
  p.eta_thresh = 1.0;
  p.theta_init = 0.9;
  Layer l(p, 3);
  l.set_weights(0, std::vector<double>{1, 0});
  for (int i = 0; i < 5; ++i) {
    ASSERT_TRUE(l.forward({0, static_cast<double>(10 * i)}));
    EXPECT_EQ(l.last_membranes()[0], 1.0);
    l.reward(0);
    EXPECT_LT(l.thresholds()[0], 1.0);
    EXPECT_GE(l.thresholds()[0], 0.9);
  }
}

TEST(Layer, EligibilityUsesContextOfLastWin) {
  Layer l(small_params(1, 3), 2);
  l.forward({0, 0.0});
  const std::vector<double> first(l.last_context().begin(), l.last_context().end());
  l.forward({2, 5.0}, false);  // frozen pass: eligibility unchanged
  const auto elig = l.eligibility_context(0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(elig[i], first[i]);
  const auto dw = l.eligibility_dw(0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(dw[i], first[i] - l.weights(0)[i], 1e-15);
}

TEST(Layer, RewardWithoutWinIsNoOp) {
  Layer l(small_params(), 4);
  const std::vector<double> w(l.weight_matrix().begin(), l.weight_matrix().end());
  EXPECT_FALSE(l.reward(1));
  EXPECT_TRUE(std::equal(w.begin(), w.end(), l.weight_matrix().begin()));
  EXPECT_EQ(l.thresholds()[1], 0.0);
  EXPECT_EQ(l.eligibility_dtheta(1), 0.0);
}

TEST(Layer, PunishLowersThresholdsOnly) {
  auto p = small_params();
  Layer l(p, 4);
  const std::vector<double> w(l.weight_matrix().begin(), l.weight_matrix().end());
  l.punish(0);
  l.punish_range(1, 2);
  l.punish_all();
  EXPECT_NEAR(l.thresholds()[0], -2 * p.theta_open, 1e-15);
  EXPECT_NEAR(l.thresholds()[1], -2 * p.theta_open, 1e-15);
  EXPECT_NEAR(l.thresholds()[2], -2 * p.theta_open, 1e-15);
  EXPECT_TRUE(std::equal(w.begin(), w.end(), l.weight_matrix().begin()));
  EXPECT_THROW(l.punish_range(2, 2), BoundsError);
}

TEST(Layer, LocalAttentionSplitsOnTraceRecency) {
  auto p = small_params(3, 2);
  p.tau_trace = 1.0;
  Layer l(p, 5);
  l.set_weights(0, std::vector<double>{1, 0});
  l.set_weights(1, std::vector<double>{0, 1});
  l.set_weights(2, std::vector<double>{1, 1});
  l.set_threshold(2, 2.0);  // never wins
  l.forward({0, 0.0});      // neuron 0
  l.forward({1, 3.0});      // neuron 1 (channel 0 decayed to e^-3)
  // At t=3.5 trace0 = e^-3.5 < 0.1, trace1 = e^-0.5 >= 0.1.
  const auto th = std::vector<double>(l.thresholds().begin(), l.thresholds().end());
  const auto c = l.record_local_attention(3.5);
  EXPECT_EQ(c.rewards, 1u);
  EXPECT_EQ(c.punishes, 2u);
  EXPECT_NEAR(l.thresholds()[0], th[0] - p.theta_open, 1e-15);
  EXPECT_GT(l.thresholds()[1], th[1]);
  EXPECT_NEAR(l.thresholds()[2], th[2] - p.theta_open, 1e-15);
}

TEST(Layer, FeastStepAdaptsWinnerOrOpensAll) {
  auto p = small_params(2, 2);
  p.feast_delta = 0.01;
  Layer l(p, 5);
  l.set_weights(0, std::vector<double>{1, 0});
  l.set_weights(1, std::vector<double>{0, 1});
  const auto s = l.feast_step({0, 0.0});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->channel, 0u);
  EXPECT_DOUBLE_EQ(l.thresholds()[0], 0.01);
  EXPECT_DOUBLE_EQ(l.thresholds()[1], 0.0);

  l.set_threshold(0, 5.0);
  l.set_threshold(1, 5.0);
  EXPECT_FALSE(l.feast_step({1, 1.0}));
  EXPECT_DOUBLE_EQ(l.thresholds()[0], 4.99);
  EXPECT_DOUBLE_EQ(l.thresholds()[1], 4.99);
}

TEST(Layer, ResetDynamicsKeepsParameters) {
  Layer l(small_params(), 6);
  l.forward({0, 1.0});
  const std::vector<double> w(l.weight_matrix().begin(), l.weight_matrix().end());
  l.reset_dynamics();
  EXPECT_TRUE(std::equal(w.begin(), w.end(), l.weight_matrix().begin()));
  for (std::size_t n = 0; n < l.size(); ++n) EXPECT_FALSE(l.has_eligibility(n));
  EXPECT_NO_THROW(l.forward({0, 0.0}));
}

TEST(Layer, ParamsValidation) {
  auto p = small_params();
  p.phi = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = small_params();
  p.eta = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = small_params();
  p.n_neurons = 0;
  EXPECT_THROW(p.validate(), ConfigError);
}

// Property: arbitrary interleavings of wins, rewards and punishes keep every
// row on the unit sphere, rewards never lower a threshold, and thresholds
// that started below 1 and only saw rewards stay below 1.
TEST(LayerProperty, RandomOperationsPreserveInvariants) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = small_params(rng.between(1, 6), rng.between(1, 8));
    p.eta = rng.uniform(0.001, 1.0);
    p.eta_thresh = rng.uniform(0.001, 1.0);
    p.theta_init = rng.uniform(0.0, 0.99);
    Layer l(p, trial);
    std::vector<bool> punished(p.n_neurons, false);
    double t = 0.0;
    for (int op = 0; op < 2000; ++op) {
      const std::size_t n = rng.below(p.n_neurons);
      switch (rng.below(3)) {
        case 0: l.forward({rng.below(p.n_inputs), t += rng.uniform(0.0, 1.0)}); break;
        case 1: {
          const double before = l.thresholds()[n];
          l.reward(n);
          EXPECT_GE(l.thresholds()[n], before);
          break;
        }
        default: l.punish(n); punished[n] = true;
      }
    }
    for (std::size_t n = 0; n < p.n_neurons; ++n) {
      EXPECT_NEAR(norm(l.weights(n)), 1.0, 1e-9);
      if (!punished[n]) {
        EXPECT_LT(l.thresholds()[n], 1.0);
      }
    }
  }
}
