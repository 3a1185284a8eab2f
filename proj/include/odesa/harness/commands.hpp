#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "odesa/checkpoint.hpp"
#include "odesa/encoders/grf.hpp"
#include "odesa/encoders/iris.hpp"
#include "odesa/encoders/spike_csv.hpp"
#include "odesa/harness/config.hpp"
#include "odesa/harness/dataset.hpp"
#include "odesa/harness/experiment.hpp"

namespace odesa::harness {

namespace fs = std::filesystem;

// Files written by `generate` and read back through --data.
struct DataDir {
  fs::path dir;
  fs::path spikes() const { return dir / "spikes.csv"; }
  fs::path labels() const { return dir / "labels.csv"; }
  fs::path meta() const { return dir / "meta.json"; }
};

struct GenerateOptions {
  std::string task;
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::string out = "data/generated";
  std::optional<std::string> data;  // source CSV for iris-encode
};

// Writes spikes.csv, labels.csv and meta.json for a generator task.
inline json cmd_generate(const GenerateOptions& o) {
  const std::uint64_t seed = o.seed.value_or(0);
  std::optional<ExperimentConfig> cfg;
  if (o.config) cfg = load_experiment_config(*o.config);

  Stream stream;
  json meta{{"format", "odesa-spikes"}, {"version", 1}, {"task", o.task}, {"seed", seed}};
  std::vector<std::string> class_names;
  if (o.task == "random-pattern") {
    RandomPatternTaskConfig rp = cfg && cfg->dataset.task == Task::random_pattern ? cfg->dataset.random_pattern
                                                                                   : RandomPatternTaskConfig{};
    rp.seed = seed;
    auto task = build_random_pattern_task(rp);
    stream = std::move(task.stream);
    class_names = rp.targets;
    meta["symbol_sequence"] = task.sequence;
  } else if (o.task == "morse-names" || o.task == "morse-positional" || o.task == "morse-sonnet") {
    const Task t = parse_task(o.task);
    MorseTaskConfig mc = cfg && cfg->dataset.task == t ? cfg->dataset.morse
                         : t == Task::morse_names      ? morse_names_task()
                         : t == Task::morse_positional ? morse_positional_task()
                                                       : morse_sonnet_task();
    stream = build_morse_task(mc);
    class_names = mc.vocabulary;
  } else if (o.task == "iris-encode") {
    GrfEncoderConfig grf = cfg && cfg->dataset.task == Task::iris ? cfg->dataset.grf : GrfEncoderConfig{};
    const std::string path = o.data.value_or(cfg && cfg->dataset.task == Task::iris ? cfg->dataset.iris_path
                                                                                      : "data/iris.csv");
    const auto samples = load_labeled_csv(path);
    grf.ranges = fit_ranges(samples.features);
    // Samples are laid out 3 windows apart; any gap >= 1.5 windows separates them.
    const double spacing = 3.0 * grf.window;
    stream.n_channels = grf.ranges.size() * grf.m;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Stream s = grf_encode(samples.features[i], grf, samples.classes[i]);
      const double onset = static_cast<double>(i) * spacing;
      for (const auto& e : s.events) stream.events.push_back(Event{e.channel, quantize_time(onset + e.time)});
      stream.labels.push_back(LabeledEvent{samples.classes[i], stream.events.back().time});
    }
    class_names = samples.class_names;
    meta["segment_gap"] = 1.5 * grf.window;
    json ranges = json::array();
    for (const auto& r : grf.ranges) ranges.push_back({r.min, r.max});
    meta["grf_ranges"] = ranges;
  } else {
    throw ConfigError("unknown generate task '" + o.task +
                      "' (expected random-pattern, morse-names, morse-positional, morse-sonnet or iris-encode)");
  }
  meta["channels"] = stream.n_channels;
  meta["classes"] = class_names.size();
  meta["class_names"] = class_names;
  meta["events"] = stream.events.size();
  meta["labels"] = stream.labels.size();

  const DataDir out{o.out};
  fs::create_directories(out.dir);
  save_spike_csv(out.spikes().string(), out.labels().string(), stream);
  write_json_file(out.meta().string(), meta);
  return meta;
}

// Replaces the dataset section with a generated data directory.
inline void use_data_dir(ExperimentConfig& cfg, const std::string& dir) {
  const DataDir d{dir};
  json ds{{"task", "csv"}, {"events", d.spikes().string()}};
  if (fs::exists(d.labels())) ds["labels"] = d.labels().string();
  if (fs::exists(d.meta())) {
    const json meta = read_json_file(d.meta().string());
    if (meta.contains("channels")) ds["channels"] = meta.at("channels");
    if (meta.contains("classes")) ds["classes"] = meta.at("classes");
    if (meta.contains("segment_gap")) ds["segment_gap"] = meta.at("segment_gap");
  }
  json src = cfg.source;
  src["dataset"] = ds;
  if (!ds.contains("segment_gap") && src.contains("evaluation")) src["evaluation"]["mode"] = "train";
  cfg = parse_experiment_config(src);
}

struct TrainOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> epochs;
  std::optional<std::string> data;
  bool resume = false;
};

inline ExperimentConfig load_with_overrides(const std::string& path, std::optional<std::size_t> epochs,
                                            const std::optional<std::string>& data) {
  ExperimentConfig cfg = load_experiment_config(path);
  if (data) use_data_dir(cfg, *data);
  if (epochs) {
    json src = cfg.source;
    src["training"]["epochs"] = *epochs;
    cfg = parse_experiment_config(src);
  }
  return cfg;
}

inline RunResult cmd_train(const TrainOptions& o) {
  const ExperimentConfig cfg = load_with_overrides(o.config, o.epochs, o.data);
  const std::uint64_t seed = o.seed.value_or(cfg.seeds.front());
  RunOutputs out{o.out ? fs::path(*o.out) : fs::path(cfg.output_dir), o.resume};
  return train_run(cfg, seed, make_split(cfg, seed, selector_for(cfg)), out);
}

struct EvalOptions {
  std::string checkpoint;
  std::optional<std::string> data;
  std::string split = "test";  // or "train"
  std::optional<std::string> out;
};

inline json cmd_eval(const EvalOptions& o) {
  if (!fs::exists(o.checkpoint)) throw ConfigError("checkpoint not found: " + o.checkpoint);
  const json ck = read_json_file(o.checkpoint);
  Network net = network_from_json(ck);
  if (o.split != "train" && o.split != "test") throw ConfigError("split must be train or test");

  ExperimentConfig cfg = parse_experiment_config(ck.at("experiment"));
  if (o.data) use_data_dir(cfg, *o.data);
  const auto seed = ck.at("training").at("seed").get<std::uint64_t>();
  const SplitData d = make_split(cfg, seed, selector_for(cfg));
  if (d.n_channels != net.config().n_inputs || d.n_classes != net.n_classes()) {
    throw ConfigError("data shape (" + std::to_string(d.n_channels) + " channels, " + std::to_string(d.n_classes) +
                      " classes) does not match the checkpoint");
  }
  const auto& streams = o.split == "train" ? d.train : d.test;
  const EpochStats stats = evaluate(net, streams, d.segmented);
  json report = stats_to_json(stats, d.class_names);
  report["split"] = o.split;
  report["seed"] = seed;
  if (o.out) {
    fs::create_directories(*o.out);
    write_json_file((fs::path(*o.out) / "eval.json").string(), report);
  }
  return report;
}

struct CrossValidateOptions {
  std::string config;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<std::string> data;
  std::optional<std::string> out;
  unsigned workers = 0;
};

inline CrossValidationReport cmd_cross_validate(const CrossValidateOptions& o) {
  const ExperimentConfig cfg = load_with_overrides(o.config, o.epochs, o.data);
  const std::size_t folds = o.folds.value_or(cfg.evaluation.folds);
  const std::vector<std::uint64_t> seeds = o.seed ? std::vector<std::uint64_t>{*o.seed} : cfg.seeds;
  auto rep = cross_validate(cfg, folds, seeds, o.workers);
  const fs::path out = o.out ? fs::path(*o.out) : fs::path(cfg.output_dir);
  fs::create_directories(out);
  write_json_file((out / "cross_validation.json").string(), cross_validation_json(rep));
  return rep;
}

}  // namespace odesa::harness
