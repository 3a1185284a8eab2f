#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odesa/error.hpp"
#include "odesa/event.hpp"
#include "odesa/layer.hpp"
#include "odesa/random.hpp"

namespace odesa {

struct OutputLayerConfig {
  std::size_t n_classes = 2;
  std::size_t k = 1;  // neurons per class group
  double tau_input = 1.0;
  double eta = 0.01;
  double eta_thresh = 0.01;
  double theta_open = 0.001;
  double theta_init = 0.001;
  double c = 1.0;

  std::size_t n_neurons() const { return n_classes * k; }
};

struct NetworkConfig {
  std::size_t n_inputs = 1;
  std::vector<LayerParams> hidden;
  OutputLayerConfig output;
  std::uint64_t seed = 0;

  // Fills the derived fields: each hidden layer's input count from the layer
  // below, and its trace constant from the layer above.
  void link() {
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      hidden[h].n_inputs = h == 0 ? n_inputs : hidden[h - 1].n_neurons;
      hidden[h].tau_trace = h + 1 < hidden.size() ? hidden[h + 1].tau_input : output.tau_input;
    }
  }

  void validate() const {
    if (n_inputs == 0) throw ConfigError("network needs at least one input channel");
    if (output.n_classes == 0 || output.k == 0) throw ConfigError("output layer needs classes and k >= 1");
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      hidden[h].validate();
      const std::size_t expect_in = h == 0 ? n_inputs : hidden[h - 1].n_neurons;
      if (hidden[h].n_inputs != expect_in) {
        throw ConfigError("hidden layer " + std::to_string(h) + " expects " + std::to_string(expect_in) +
                          " inputs but declares " + std::to_string(hidden[h].n_inputs));
      }
      const double expect_tau = h + 1 < hidden.size() ? hidden[h + 1].tau_input : output.tau_input;
      if (hidden[h].tau_trace != expect_tau) {
        throw ConfigError("hidden layer " + std::to_string(h) + " trace tau must equal the next layer's tau");
      }
    }
    output_params().validate();
  }

  LayerParams output_params() const {
    LayerParams p;
    p.n_neurons = output.n_neurons();
    p.n_inputs = hidden.empty() ? n_inputs : hidden.back().n_neurons;
    p.tau_input = output.tau_input;
    p.tau_trace = output.tau_input;  // unused: output reward needs exact coincidence
    p.eta = output.eta;
    p.eta_thresh = output.eta_thresh;
    p.theta_open = output.theta_open;
    p.theta_init = output.theta_init;
    p.c = output.c;
    return p;
  }
};

struct UpdateCounts {
  std::size_t hidden_rewards = 0;
  std::size_t hidden_punishes = 0;
  std::size_t output_rewards = 0;
  std::size_t output_punishes = 0;

  std::size_t total() const { return hidden_rewards + hidden_punishes + output_rewards + output_punishes; }
};

// What happened to one input event. Layer index H (== hidden count) is the
// output layer.
struct StepOutcome {
  double time = 0.0;
  std::vector<std::optional<std::size_t>> winners;  // per layer
  std::vector<unsigned char> local_attention;        // layer received a local attention signal
  std::vector<unsigned char> global_attention;       // layer touched by label supervision
  std::optional<std::size_t> label;
  std::optional<std::size_t> prediction;
  UpdateCounts updates;

  std::optional<std::size_t> output_winner() const { return winners.back(); }
};

struct Prediction {
  std::size_t class_id = 0;
  double time = 0.0;
};

class Network {
 public:
  Network() = default;

  explicit Network(NetworkConfig config) : config_(std::move(config)) {
    config_.validate();
    layers_.reserve(config_.hidden.size() + 1);
    for (std::size_t h = 0; h < config_.hidden.size(); ++h) {
      layers_.emplace_back(config_.hidden[h], mix_seed(config_.seed, h));
    }
    layers_.emplace_back(config_.output_params(), mix_seed(config_.seed, config_.hidden.size()));
    const std::size_t n = layers_.size();
    outcome_.winners.assign(n, std::nullopt);
    outcome_.local_attention.assign(n, 0);
    outcome_.global_attention.assign(n, 0);
  }

  const NetworkConfig& config() const { return config_; }
  std::size_t hidden_count() const { return layers_.size() - 1; }
  std::size_t layer_count() const { return layers_.size(); }
  std::size_t n_classes() const { return config_.output.n_classes; }
  std::size_t group_of(std::size_t output_neuron) const { return output_neuron / config_.output.k; }

  Layer& layer(std::size_t l) { return layers_.at(l); }
  const Layer& layer(std::size_t l) const { return layers_.at(l); }
  Layer& hidden(std::size_t h) { return layers_.at(h); }
  const Layer& hidden(std::size_t h) const { return layers_.at(h); }
  Layer& output() { return layers_.back(); }
  const Layer& output() const { return layers_.back(); }

  // One learning step. `label`, when present, must carry the event's time.
  const StepOutcome& train_step(const Event& e, const std::optional<LabeledEvent>& label = std::nullopt) {
    if (label) {
      if (label->time != e.time) throw ContractError("label time does not coincide with the input event");
      if (label->class_id >= n_classes()) throw BoundsError("label class " + std::to_string(label->class_id) + " outside output layer");
    }
    begin(e.time);
    const std::size_t n_hidden = hidden_count();

    // Cascade through hidden layers; a silent layer ends the cascade.
    std::optional<Event> spike = e;
    for (std::size_t h = 0; h < n_hidden && spike; ++h) {
      spike = layers_[h].forward(*spike, true);
      outcome_.winners[h] = winner_of(spike);
      if (spike && h > 0) local_attention(h - 1, e.time);
    }

    // `spike` now holds s^H (the input itself when there are no hidden layers).
    const bool top_spiked = spike.has_value();
    std::optional<Event> out;
    if (top_spiked) {
      out = output().forward(*spike, true);
      outcome_.winners[n_hidden] = winner_of(out);
      // The output trace is instantaneous, so only a labeled output spike
      // feeds attention back; false positives leave every layer untouched.
      if (out && label && n_hidden > 0) local_attention(n_hidden - 1, e.time);
    }
    if (out) outcome_.prediction = group_of(out->channel);

    if (label) {
      outcome_.label = label->class_id;
      record_global_attention();
      Layer& o = output();
      const std::size_t k = config_.output.k;
      if (out && group_of(out->channel) == label->class_id) {
        o.reward(out->channel);
        ++outcome_.updates.output_rewards;
        outcome_.global_attention[n_hidden] = 1;
      } else if (out || top_spiked) {
        o.punish_range(label->class_id * k, k);
        outcome_.updates.output_punishes += k;
        outcome_.global_attention[n_hidden] = 1;
      }
    }
    return outcome_;
  }

  // Frozen pass: surfaces advance, nothing learns.
  const StepOutcome& infer_step(const Event& e) {
    begin(e.time);
    std::optional<Event> spike = e;
    for (std::size_t h = 0; h < hidden_count() && spike; ++h) {
      spike = layers_[h].forward(*spike, false);
      outcome_.winners[h] = winner_of(spike);
    }
    if (spike) {
      auto out = output().forward(*spike, false);
      outcome_.winners.back() = winner_of(out);
      if (out) outcome_.prediction = group_of(out->channel);
    }
    return outcome_;
  }

  std::optional<Prediction> infer(const Event& e) {
    const auto& o = infer_step(e);
    if (!o.prediction) return std::nullopt;
    return Prediction{*o.prediction, e.time};
  }

  // Scans hidden layers bottom-up: active winners are rewarded, the first
  // silent layer is punished as a whole and the scan stops.
  void record_global_attention() {
    for (std::size_t h = 0; h < hidden_count(); ++h) {
      outcome_.global_attention[h] = 1;
      if (const auto w = outcome_.winners[h]) {
        layers_[h].reward(*w);
        ++outcome_.updates.hidden_rewards;
      } else {
        layers_[h].punish_all();
        outcome_.updates.hidden_punishes += layers_[h].size();
        break;
      }
    }
  }

  // Clears time surfaces, traces and eligibility in every layer.
  void reset_dynamics() {
    for (auto& l : layers_) l.reset_dynamics();
  }

  const StepOutcome& last_outcome() const { return outcome_; }

 private:
  static std::optional<std::size_t> winner_of(const std::optional<Event>& s) {
    return s ? std::optional<std::size_t>(s->channel) : std::nullopt;
  }

  void begin(double t) {
    outcome_.time = t;
    std::fill(outcome_.winners.begin(), outcome_.winners.end(), std::nullopt);
    std::fill(outcome_.local_attention.begin(), outcome_.local_attention.end(), 0);
    std::fill(outcome_.global_attention.begin(), outcome_.global_attention.end(), 0);
    outcome_.label.reset();
    outcome_.prediction.reset();
    outcome_.updates = {};
  }

  void local_attention(std::size_t layer, double t) {
    const auto c = layers_[layer].record_local_attention(t);
    outcome_.local_attention[layer] = 1;
    outcome_.updates.hidden_rewards += c.rewards;
    outcome_.updates.hidden_punishes += c.punishes;
  }

  NetworkConfig config_;
  std::vector<Layer> layers_;  // hidden layers then the output layer
  StepOutcome outcome_;
};

// One row of the training log: what one layer did for one input event.
struct RecordRow {
  std::size_t epoch = 0;
  double time = 0.0;
  std::size_t layer = 0;
  std::optional<std::size_t> winner;
  bool local_attention = false;
  bool global_attention = false;
  std::optional<std::size_t> label;
  std::optional<std::size_t> prediction;
};

using RecordSink = std::function<void(const RecordRow&)>;

struct EpochStats {
  std::size_t n_events = 0;
  std::size_t n_labels = 0;
  std::size_t hits = 0;
  std::size_t misses = 0;  // output silent at a label
  std::size_t wrong = 0;   // output spiked with the wrong group at a label
  std::size_t false_positives = 0;  // output spikes at unlabeled events
  std::vector<std::size_t> spikes_per_layer;
  std::vector<std::size_t> labels_per_class;
  std::vector<std::size_t> hits_per_class;
  UpdateCounts updates;

  double accuracy() const { return n_labels == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n_labels); }
  double false_positive_rate() const {
    const std::size_t unlabeled = n_events - n_labels;
    return unlabeled == 0 ? 0.0 : static_cast<double>(false_positives) / static_cast<double>(unlabeled);
  }

  void merge(const EpochStats& o) {
    n_events += o.n_events;
    n_labels += o.n_labels;
    hits += o.hits;
    misses += o.misses;
    wrong += o.wrong;
    false_positives += o.false_positives;
    auto add = [](std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
      if (a.size() < b.size()) a.resize(b.size(), 0);
      for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    };
    add(spikes_per_layer, o.spikes_per_layer);
    add(labels_per_class, o.labels_per_class);
    add(hits_per_class, o.hits_per_class);
    updates.hidden_rewards += o.updates.hidden_rewards;
    updates.hidden_punishes += o.updates.hidden_punishes;
    updates.output_rewards += o.updates.output_rewards;
    updates.output_punishes += o.updates.output_punishes;
  }
};

struct EpochOptions {
  bool learn = true;
  // Example-segmented data: dynamics are reset before every stream.
  bool segmented = false;
  // Added to every event and label time (continuous streams replayed across
  // epochs keep time increasing).
  double time_offset = 0.0;
  std::size_t epoch = 0;
  const RecordSink* record = nullptr;
};

// Feeds one stream through the network, attaching each label to the last
// input event sharing its time.
inline EpochStats run_stream(Network& net, const Stream& stream, const EpochOptions& opt) {
  EpochStats stats;
  const std::size_t n_layers = net.layer_count();
  stats.spikes_per_layer.assign(n_layers, 0);
  stats.labels_per_class.assign(net.n_classes(), 0);
  stats.hits_per_class.assign(net.n_classes(), 0);
  if (opt.segmented) net.reset_dynamics();

  const auto& events = stream.events;
  const auto& labels = stream.labels;
  std::size_t next_label = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& raw = events[i];
    if (raw.channel >= stream.n_channels) {
      throw BoundsError("event channel " + std::to_string(raw.channel) + " outside stream of " +
                        std::to_string(stream.n_channels) + " channels");
    }
    if (next_label < labels.size() && labels[next_label].time < raw.time) {
      throw ContractError("label at t=" + std::to_string(labels[next_label].time) + " has no coincident input event");
    }
    std::optional<LabeledEvent> label;
    const bool last_at_time = i + 1 == events.size() || events[i + 1].time != raw.time;
    if (last_at_time && next_label < labels.size() && labels[next_label].time == raw.time) {
      label = LabeledEvent{labels[next_label].class_id, raw.time + opt.time_offset};
      ++next_label;
      if (next_label < labels.size() && labels[next_label].time == raw.time) {
        throw ContractError("two labels at t=" + std::to_string(raw.time));
      }
    }

    const Event e{raw.channel, raw.time + opt.time_offset};
    const StepOutcome& o = opt.learn ? net.train_step(e, label) : net.infer_step(e);

    ++stats.n_events;
    for (std::size_t l = 0; l < n_layers; ++l) {
      if (o.winners[l]) ++stats.spikes_per_layer[l];
    }
    if (label) {
      if (label->class_id >= net.n_classes()) throw BoundsError("label class outside output layer");
      ++stats.n_labels;
      ++stats.labels_per_class[label->class_id];
      if (!o.prediction) {
        ++stats.misses;
      } else if (*o.prediction == label->class_id) {
        ++stats.hits;
        ++stats.hits_per_class[label->class_id];
      } else {
        ++stats.wrong;
      }
    } else if (o.prediction) {
      ++stats.false_positives;
    }
    stats.updates.hidden_rewards += o.updates.hidden_rewards;
    stats.updates.hidden_punishes += o.updates.hidden_punishes;
    stats.updates.output_rewards += o.updates.output_rewards;
    stats.updates.output_punishes += o.updates.output_punishes;

    if (opt.record && *opt.record) {
      for (std::size_t l = 0; l < n_layers; ++l) {
        (*opt.record)(RecordRow{opt.epoch, e.time, l, o.winners[l], o.local_attention[l] != 0,
                                o.global_attention[l] != 0, label ? std::optional<std::size_t>(label->class_id) : std::nullopt,
                                l + 1 == n_layers ? o.prediction : std::nullopt});
      }
    }
  }
  if (next_label < labels.size()) {
    throw ContractError("label at t=" + std::to_string(labels[next_label].time) + " has no coincident input event");
  }
  return stats;
}

// Runs a sequence of streams in the given order.
inline EpochStats run_epoch(Network& net, std::span<const Stream> streams, const EpochOptions& opt) {
  EpochStats total;
  total.spikes_per_layer.assign(net.layer_count(), 0);
  total.labels_per_class.assign(net.n_classes(), 0);
  total.hits_per_class.assign(net.n_classes(), 0);
  for (const auto& s : streams) total.merge(run_stream(net, s, opt));
  return total;
}

}  // namespace odesa
