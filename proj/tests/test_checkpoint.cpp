#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "odesa/checkpoint.hpp"
#include "odesa/random.hpp"

using namespace odesa;

namespace {

NetworkConfig two_layer(std::uint64_t seed = 3) {
  NetworkConfig c;
  c.n_inputs = 4;
  LayerParams h;
  h.n_neurons = 5;
  h.tau_input = 1.5;
  h.eta = 0.05;
  h.eta_thresh = 0.02;
  h.theta_open = 0.01;
  h.theta_init = 0.0;
  c.hidden.push_back(h);
  c.output.n_classes = 3;
  c.output.k = 2;
  c.output.tau_input = 4.0;
  c.output.theta_init = 0.0;
  c.seed = seed;
  c.link();
  return c;
}

// Trains on a short random labeled stream so weights, thresholds and
// dynamics all move away from their initial values.
void exercise(Network& net, std::uint64_t seed, double t0 = 0.0) {
  Rng rng(seed);
  double t = t0;
  for (int i = 0; i < 400; ++i) {
    t += rng.uniform(0.01, 0.5);
    std::optional<LabeledEvent> label;
    if (i % 17 == 16) label = LabeledEvent{rng.below(3), t};
    net.train_step({rng.below(4), t}, label);
  }
}

std::vector<double> flat(const Network& net) {
  std::vector<double> out;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    out.insert(out.end(), net.layer(l).weight_matrix().begin(), net.layer(l).weight_matrix().end());
    out.insert(out.end(), net.layer(l).thresholds().begin(), net.layer(l).thresholds().end());
  }
  return out;
}

}  // namespace

TEST(Checkpoint, ParametersRoundTripExactly) {
  Network a(two_layer());
  exercise(a, 11);
  const json j = json::parse(network_to_json(a).dump());
  Network b = network_from_json(j);
  EXPECT_EQ(flat(a), flat(b));
  EXPECT_EQ(b.config().output.k, 2u);
  EXPECT_EQ(b.config().hidden.at(0).n_neurons, 5u);
  EXPECT_DOUBLE_EQ(b.config().hidden.at(0).tau_input, 1.5);
}

TEST(Checkpoint, DynamicsRoundTripContinuesIdentically) {
  Network a(two_layer());
  exercise(a, 12);
  Network b = network_from_json(json::parse(network_to_json(a, true).dump()));
  // Both copies continue on the same stream and must stay in lockstep.
  exercise(a, 13, 1000.0);
  exercise(b, 13, 1000.0);
  EXPECT_EQ(flat(a), flat(b));
}

TEST(Checkpoint, NeverSpikedTracesAreNull) {
  Network a(two_layer());
  const json j = network_to_json(a, true);
  for (const auto& x : j.at("layers").at(0).at("dynamics").at("last_spike")) EXPECT_TRUE(x.is_null());
  Network b = network_from_json(j);
  EXPECT_EQ(b.layer(0).traces().last_spikes()[0], -std::numeric_limits<double>::infinity());
}

TEST(Checkpoint, RejectsWrongFormatOrVersion) {
  Network a(two_layer());
  json j = network_to_json(a);
  j["version"] = 2;
  EXPECT_THROW(network_from_json(j), ConfigError);
  j = network_to_json(a);
  j["format"] = "something-else";
  EXPECT_THROW(network_from_json(j), ConfigError);
  j = network_to_json(a);
  j["layers"].erase(0);
  EXPECT_THROW(network_from_json(j), ConfigError);
}

TEST(Checkpoint, RejectsUnknownConfigKeys) {
  json j = network_to_json(Network(two_layer()));
  j["config"]["bogus"] = 1;
  EXPECT_THROW(network_from_json(j), ConfigError);
}

TEST(Checkpoint, FileHelpers) {
  const auto dir = std::filesystem::temp_directory_path() / "odesa_checkpoint_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "net.json").string();
  Network a(two_layer(9));
  write_json_file(path, network_to_json(a));
  EXPECT_EQ(flat(network_from_json(read_json_file(path))), flat(a));
  EXPECT_THROW(read_json_file((dir / "missing.json").string()), ConfigError);
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(read_json_file((dir / "bad.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}
