#pragma once

// Experiment configuration documents. A config is a JSON object with nested
// sections; unknown keys anywhere are errors.
//
//   {
//     "version": 1,
//     "dataset": {"task": "iris", "path": "data/iris.csv", "grf": {"fields": 5, "beta": 1.5, "window": 1.0}},
//     "network": {"hidden": [{"neurons": 10, "tau": 0.6}], "output": {"k": 1, "tau": 0.9}},
//     "training": {"epochs": 400},
//     "evaluation": {"mode": "holdout", "test_fraction": 0.5},
//     "seeds": [1, 2, 3, 4, 5],
//     "output_dir": "runs/iris"
//   }

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "odesa/checkpoint.hpp"
#include "odesa/encoders/grf.hpp"
#include "odesa/encoders/morse.hpp"
#include "odesa/encoders/random_pattern.hpp"
#include "odesa/error.hpp"
#include "odesa/network.hpp"

namespace odesa::harness {

inline constexpr int kConfigVersion = 1;

enum class Task { random_pattern, morse_names, morse_positional, morse_sonnet, iris, csv };

inline Task parse_task(const std::string& name) {
  if (name == "random-pattern") return Task::random_pattern;
  if (name == "morse-names") return Task::morse_names;
  if (name == "morse-positional") return Task::morse_positional;
  if (name == "morse-sonnet") return Task::morse_sonnet;
  if (name == "iris") return Task::iris;
  if (name == "csv") return Task::csv;
  throw ConfigError("unknown task '" + name +
                    "' (expected random-pattern, morse-names, morse-positional, morse-sonnet, iris or csv)");
}

inline std::string task_name(Task t) {
  switch (t) {
    case Task::random_pattern: return "random-pattern";
    case Task::morse_names: return "morse-names";
    case Task::morse_positional: return "morse-positional";
    case Task::morse_sonnet: return "morse-sonnet";
    case Task::iris: return "iris";
    case Task::csv: return "csv";
  }
  return "?";
}

struct CsvSpec {
  std::string events;  // spike file
  std::optional<std::string> labels;
  std::optional<std::size_t> channels;
  std::optional<std::size_t> classes;
  std::optional<double> segment_gap;  // split into examples at gaps this long
};

struct DatasetSpec {
  Task task = Task::random_pattern;
  RandomPatternTaskConfig random_pattern;
  MorseTaskConfig morse;
  GrfEncoderConfig grf;
  std::string iris_path = "data/iris.csv";
  CsvSpec csv;

  bool segmented() const { return task == Task::iris || (task == Task::csv && csv.segment_gap.has_value()); }
};

// Network layout without the data-dependent fields (input and class counts).
struct NetworkSpec {
  std::vector<LayerParams> hidden;
  OutputLayerConfig output;
};

enum class RecordMode { none, last, all };

struct TrainingSpec {
  std::size_t epochs = 10;
  // Silence inserted between replays of a continuous stream.
  double epoch_gap = 1000.0;
  RecordMode record = RecordMode::last;
};

enum class EvalMode { train, holdout, kfold };

struct EvalSpec {
  EvalMode mode = EvalMode::train;
  double test_fraction = 0.5;
  std::size_t folds = 2;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  NetworkSpec network;
  TrainingSpec training;
  EvalSpec evaluation;
  std::vector<std::uint64_t> seeds = {0};
  std::string output_dir = "runs/default";
  json source;  // the document this was parsed from, normalized

  // Builds the network config for a dataset of n_inputs channels and n_classes classes.
  NetworkConfig network_config(std::size_t n_inputs, std::size_t n_classes, std::uint64_t seed) const {
    NetworkConfig c;
    c.n_inputs = n_inputs;
    c.hidden = network.hidden;
    c.output = network.output;
    if (c.output.n_classes != 0 && c.output.n_classes != n_classes) {
      throw ConfigError("output.classes = " + std::to_string(c.output.n_classes) + " but the dataset has " +
                        std::to_string(n_classes) + " classes");
    }
    c.output.n_classes = n_classes;
    c.seed = seed;
    c.link();
    c.validate();
    return c;
  }
};

namespace detail {

inline LayerParams hidden_from_json(const json& j) {
  require_keys(j, {"neurons", "tau", "eta", "eta_thresh", "theta_open", "phi", "theta_init", "c", "feast_delta"},
               "hidden layer");
  LayerParams p;
  p.n_neurons = get_required<std::size_t>(j, "neurons", "hidden layer");
  p.tau_input = get_required<double>(j, "tau", "hidden layer");
  p.eta = get_or(j, "eta", p.eta);
  p.eta_thresh = get_or(j, "eta_thresh", p.eta_thresh);
  p.theta_open = get_or(j, "theta_open", p.theta_open);
  p.phi = get_or(j, "phi", p.phi);
  p.theta_init = get_or(j, "theta_init", p.theta_init);
  p.c = get_or(j, "c", p.c);
  p.feast_delta = get_or(j, "feast_delta", p.feast_delta);
  return p;
}

inline MorseTiming morse_timing_from_json(const json& j, MorseTiming t) {
  t.unit = get_or(j, "unit", t.unit);
  t.intra_letter_gap = get_or(j, "intra_letter_gap", t.intra_letter_gap);
  t.inter_letter_gap = get_or(j, "inter_letter_gap", t.inter_letter_gap);
  t.inter_word_gap = get_or(j, "inter_word_gap", t.inter_word_gap);
  return t;
}

inline DatasetSpec dataset_from_json(const json& j) {
  DatasetSpec d;
  d.task = parse_task(get_required<std::string>(j, "task", "dataset"));
  switch (d.task) {
    case Task::random_pattern: {
      require_keys(j, {"task", "channels", "symbols", "min_spikes", "max_spikes", "symbol_window", "time_resolution",
                       "targets", "length"},
                   "dataset");
      auto& r = d.random_pattern;
      r.n_channels = get_or(j, "channels", r.n_channels);
      r.n_symbols = get_or(j, "symbols", r.n_symbols);
      r.min_spikes = get_or(j, "min_spikes", r.min_spikes);
      r.max_spikes = get_or(j, "max_spikes", r.max_spikes);
      r.symbol_window = get_or(j, "symbol_window", r.symbol_window);
      r.time_resolution = get_or(j, "time_resolution", r.time_resolution);
      r.targets = get_or(j, "targets", r.targets);
      r.stream_length = get_or(j, "length", r.stream_length);
      r.validate();
      break;
    }
    case Task::morse_names:
    case Task::morse_positional:
    case Task::morse_sonnet: {
      require_keys(j, {"task", "unit", "intra_letter_gap", "inter_letter_gap", "inter_word_gap", "sequence_gap",
                       "repeats", "vocabulary"},
                   "dataset");
      d.morse = d.task == Task::morse_names        ? morse_names_task()
                : d.task == Task::morse_positional ? morse_positional_task()
                                                   : morse_sonnet_task();
      d.morse.timing = morse_timing_from_json(j, d.morse.timing);
      d.morse.sequence_gap = get_or(j, "sequence_gap", d.morse.sequence_gap);
      d.morse.repeats = get_or(j, "repeats", d.morse.repeats);
      d.morse.vocabulary = get_or(j, "vocabulary", d.morse.vocabulary);
      d.morse.timing.validate();
      break;
    }
    case Task::iris: {
      require_keys(j, {"task", "path", "grf"}, "dataset");
      d.iris_path = get_or(j, "path", d.iris_path);
      const json g = get_or(j, "grf", json::object());
      require_keys(g, {"fields", "beta", "window", "cutoff"}, "dataset.grf");
      d.grf.m = get_or(g, "fields", d.grf.m);
      d.grf.beta = get_or(g, "beta", d.grf.beta);
      d.grf.window = get_or(g, "window", d.grf.window);
      if (g.contains("cutoff")) d.grf.cutoff = g.at("cutoff").get<double>();
      d.grf.validate();
      break;
    }
    case Task::csv: {
      require_keys(j, {"task", "events", "labels", "channels", "classes", "segment_gap"}, "dataset");
      d.csv.events = get_required<std::string>(j, "events", "dataset");
      if (j.contains("labels")) d.csv.labels = j.at("labels").get<std::string>();
      if (j.contains("channels")) d.csv.channels = j.at("channels").get<std::size_t>();
      if (j.contains("classes")) d.csv.classes = j.at("classes").get<std::size_t>();
      if (j.contains("segment_gap")) d.csv.segment_gap = j.at("segment_gap").get<double>();
      if (d.csv.segment_gap && !(*d.csv.segment_gap > 0.0)) throw ConfigError("segment_gap must be positive");
      break;
    }
  }
  return d;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const json& j) {
  require_keys(j, {"version", "dataset", "network", "training", "evaluation", "seeds", "output_dir"},
               "experiment config");
  const int version = get_required<int>(j, "version", "experiment config");
  if (version != kConfigVersion) {
    throw ConfigError("config version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kConfigVersion) + ")");
  }
  ExperimentConfig c;
  c.dataset = detail::dataset_from_json(get_required<json>(j, "dataset", "experiment config"));

  const json net = get_required<json>(j, "network", "experiment config");
  require_keys(net, {"hidden", "output"}, "network");
  for (const auto& h : get_or(net, "hidden", json::array())) c.network.hidden.push_back(detail::hidden_from_json(h));
  c.network.output = output_config_from_json(get_required<json>(net, "output", "network"));

  const json tr = get_or(j, "training", json::object());
  require_keys(tr, {"epochs", "epoch_gap", "record"}, "training");
  c.training.epochs = get_or(tr, "epochs", c.training.epochs);
  c.training.epoch_gap = get_or(tr, "epoch_gap", c.training.epoch_gap);
  const auto record = get_or<std::string>(tr, "record", "last");
  if (record == "none") c.training.record = RecordMode::none;
  else if (record == "last") c.training.record = RecordMode::last;
  else if (record == "all") c.training.record = RecordMode::all;
  else throw ConfigError("training.record must be none, last or all");
  if (c.training.epochs == 0) throw ConfigError("training.epochs must be at least 1");
  if (!(c.training.epoch_gap > 0.0)) throw ConfigError("training.epoch_gap must be positive");

  const json ev = get_or(j, "evaluation", json::object());
  require_keys(ev, {"mode", "test_fraction", "folds"}, "evaluation");
  const auto mode = get_or<std::string>(ev, "mode", c.dataset.segmented() ? "holdout" : "train");
  if (mode == "train") c.evaluation.mode = EvalMode::train;
  else if (mode == "holdout") c.evaluation.mode = EvalMode::holdout;
  else if (mode == "kfold") c.evaluation.mode = EvalMode::kfold;
  else throw ConfigError("evaluation.mode must be train, holdout or kfold");
  c.evaluation.test_fraction = get_or(ev, "test_fraction", c.evaluation.test_fraction);
  c.evaluation.folds = get_or(ev, "folds", c.evaluation.folds);
  if (!(c.evaluation.test_fraction > 0.0 && c.evaluation.test_fraction < 1.0)) {
    throw ConfigError("evaluation.test_fraction must be in (0, 1)");
  }
  if (c.evaluation.folds < 2) throw ConfigError("evaluation.folds must be at least 2");
  if (c.evaluation.mode != EvalMode::train && !c.dataset.segmented()) {
    throw ConfigError("holdout and kfold evaluation need an example-segmented dataset");
  }

  c.seeds = get_or(j, "seeds", c.seeds);
  if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  c.output_dir = get_or(j, "output_dir", c.output_dir);
  c.source = j;
  return c;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  auto c = parse_experiment_config(read_json_file(path));
  // Relative data paths resolve against the config's directory when they
  // do not exist relative to the working directory.
  const auto base = std::filesystem::path(path).parent_path();
  json& ds = c.source["dataset"];
  auto resolve = [&](const char* key) {
    if (!ds.contains(key)) return;
    const auto p = ds.at(key).get<std::string>();
    if (p.empty() || std::filesystem::path(p).is_absolute() || std::filesystem::exists(p)) return;
    const auto alt = base / p;
    if (std::filesystem::exists(alt)) ds[key] = alt.string();
  };
  for (const char* key : {"path", "events", "labels"}) resolve(key);
  return parse_experiment_config(c.source);
}

}  // namespace odesa::harness
