#pragma once

// Versioned JSON form of a network: configuration, per-layer weights and
// thresholds, and optionally the transient dynamics (time surfaces, traces,
// eligibility) needed to resume a continuous stream exactly.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "odesa/error.hpp"
#include "odesa/network.hpp"

namespace odesa {

using json = nlohmann::json;

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kCheckpointFormat = "odesa-checkpoint";

// Rejects keys outside `allowed`.
inline void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items()) {
    if (!ok.contains(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "' in " + where + ": " + e.what());
  }
}

inline json layer_params_to_json(const LayerParams& p) {
  return json{{"neurons", p.n_neurons},     {"inputs", p.n_inputs},         {"tau", p.tau_input},
              {"tau_trace", p.tau_trace},   {"eta", p.eta},                 {"eta_thresh", p.eta_thresh},
              {"theta_open", p.theta_open}, {"phi", p.phi},                 {"theta_init", p.theta_init},
              {"c", p.c},                   {"feast_delta", p.feast_delta}};
}

inline LayerParams layer_params_from_json(const json& j) {
  require_keys(j, {"neurons", "inputs", "tau", "tau_trace", "eta", "eta_thresh", "theta_open", "phi", "theta_init", "c",
                   "feast_delta"},
               "layer");
  LayerParams p;
  p.n_neurons = get_required<std::size_t>(j, "neurons", "layer");
  p.n_inputs = get_or<std::size_t>(j, "inputs", 0);
  p.tau_input = get_required<double>(j, "tau", "layer");
  p.tau_trace = get_or<double>(j, "tau_trace", p.tau_input);
  p.eta = get_or(j, "eta", p.eta);
  p.eta_thresh = get_or(j, "eta_thresh", p.eta_thresh);
  p.theta_open = get_or(j, "theta_open", p.theta_open);
  p.phi = get_or(j, "phi", p.phi);
  p.theta_init = get_or(j, "theta_init", p.theta_init);
  p.c = get_or(j, "c", p.c);
  p.feast_delta = get_or(j, "feast_delta", p.feast_delta);
  return p;
}

inline json output_config_to_json(const OutputLayerConfig& o) {
  return json{{"classes", o.n_classes},   {"k", o.k},                   {"tau", o.tau_input},
              {"eta", o.eta},             {"eta_thresh", o.eta_thresh}, {"theta_open", o.theta_open},
              {"theta_init", o.theta_init}, {"c", o.c}};
}

inline OutputLayerConfig output_config_from_json(const json& j) {
  require_keys(j, {"classes", "k", "tau", "eta", "eta_thresh", "theta_open", "theta_init", "c"}, "output layer");
  OutputLayerConfig o;
  o.n_classes = get_or<std::size_t>(j, "classes", 0);
  o.k = get_or(j, "k", o.k);
  o.tau_input = get_required<double>(j, "tau", "output layer");
  o.eta = get_or(j, "eta", o.eta);
  o.eta_thresh = get_or(j, "eta_thresh", o.eta_thresh);
  o.theta_open = get_or(j, "theta_open", o.theta_open);
  o.theta_init = get_or(j, "theta_init", o.theta_init);
  o.c = get_or(j, "c", o.c);
  return o;
}

inline json network_config_to_json(const NetworkConfig& c) {
  json hidden = json::array();
  for (const auto& h : c.hidden) hidden.push_back(layer_params_to_json(h));
  return json{{"inputs", c.n_inputs}, {"seed", c.seed}, {"hidden", hidden}, {"output", output_config_to_json(c.output)}};
}

inline NetworkConfig network_config_from_json(const json& j) {
  require_keys(j, {"inputs", "seed", "hidden", "output"}, "network config");
  NetworkConfig c;
  c.n_inputs = get_required<std::size_t>(j, "inputs", "network config");
  c.seed = get_or<std::uint64_t>(j, "seed", 0);
  for (const auto& h : get_or<json>(j, "hidden", json::array())) c.hidden.push_back(layer_params_from_json(h));
  c.output = output_config_from_json(get_required<json>(j, "output", "network config"));
  return c;
}

namespace detail {

// JSON has no infinities; never-spiked traces are written as null.
inline json times_to_json(std::span<const double> v) {
  json a = json::array();
  for (double t : v) a.push_back(std::isinf(t) ? json(nullptr) : json(t));
  return a;
}

inline std::vector<double> times_from_json(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(x.is_null() ? -std::numeric_limits<double>::infinity() : x.get<double>());
  return v;
}

}  // namespace detail

inline json network_to_json(const Network& net, bool with_dynamics = false) {
  json layers = json::array();
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const Layer& layer = net.layer(l);
    json rows = json::array();
    for (std::size_t n = 0; n < layer.size(); ++n) {
      auto w = layer.weights(n);
      rows.push_back(std::vector<double>(w.begin(), w.end()));
    }
    auto th = layer.thresholds();
    json lj{{"weights", rows}, {"thresholds", std::vector<double>(th.begin(), th.end())}};
    if (with_dynamics) {
      auto d = layer.dynamics();
      lj["dynamics"] = json{{"potential", d.potential},
                            {"timestamp", d.timestamp},
                            {"last_spike", detail::times_to_json(d.last_spike)},
                            {"eligibility_context", d.elig_context},
                            {"eligibility_membrane", d.elig_membrane},
                            {"eligible", d.eligible}};
    }
    layers.push_back(std::move(lj));
  }
  return json{{"format", kCheckpointFormat},
              {"version", kCheckpointVersion},
              {"config", network_config_to_json(net.config())},
              {"layers", layers}};
}

inline Network network_from_json(const json& j) {
  if (get_or<std::string>(j, "format", "") != kCheckpointFormat) throw ConfigError("not an odesa checkpoint");
  const int version = get_or(j, "version", 0);
  if (version != kCheckpointVersion) {
    throw ConfigError("checkpoint version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  Network net(network_config_from_json(get_required<json>(j, "config", "checkpoint")));
  const auto& layers = get_required<json>(j, "layers", "checkpoint");
  if (!layers.is_array() || layers.size() != net.layer_count()) throw ConfigError("checkpoint layer count mismatch");
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const json& lj = layers[l];
    std::vector<double> w;
    for (const auto& row : lj.at("weights")) {
      for (const auto& x : row) w.push_back(x.get<double>());
    }
    net.layer(l).restore(std::move(w), lj.at("thresholds").get<std::vector<double>>());
    if (const auto it = lj.find("dynamics"); it != lj.end()) {
      const json& d = *it;
      Layer::Dynamics dyn{d.at("potential").get<std::vector<double>>(),
                          d.at("timestamp").get<std::vector<double>>(),
                          detail::times_from_json(d.at("last_spike")),
                          d.at("eligibility_context").get<std::vector<double>>(),
                          d.at("eligibility_membrane").get<std::vector<double>>(),
                          d.at("eligible").get<std::vector<unsigned char>>()};
      net.layer(l).restore(std::move(dyn));
    }
  }
  return net;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("write failed for " + path);
}

}  // namespace odesa
