#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "odesa/checkpoint.hpp"
#include "odesa/harness/config.hpp"
#include "odesa/harness/dataset.hpp"
#include "odesa/network.hpp"

namespace odesa::harness {

inline constexpr std::uint64_t kShuffleTag = 0xE90C;

// Label-coincident scoring summary of one pass.
inline json stats_to_json(const EpochStats& s, const std::vector<std::string>& class_names = {}) {
  json per_class = json::array();
  for (std::size_t c = 0; c < s.labels_per_class.size(); ++c) {
    const double acc = s.labels_per_class[c] == 0
                           ? 0.0
                           : static_cast<double>(s.hits_per_class[c]) / static_cast<double>(s.labels_per_class[c]);
    json entry{{"class", c}, {"labels", s.labels_per_class[c]}, {"hits", s.hits_per_class[c]}, {"accuracy", acc}};
    if (c < class_names.size()) entry["name"] = class_names[c];
    per_class.push_back(std::move(entry));
  }
  json sparsity = json::array();
  for (auto n : s.spikes_per_layer) {
    sparsity.push_back(s.n_events == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(s.n_events));
  }
  return json{{"accuracy", s.accuracy()},
              {"events", s.n_events},
              {"labels", s.n_labels},
              {"hits", s.hits},
              {"misses", s.misses},
              {"wrong_class", s.wrong},
              {"false_positives", s.false_positives},
              {"false_positive_rate", s.false_positive_rate()},
              {"per_class", per_class},
              {"spikes_per_event", sparsity},
              {"updates",
               {{"hidden_rewards", s.updates.hidden_rewards},
                {"hidden_punishes", s.updates.hidden_punishes},
                {"output_rewards", s.updates.output_rewards},
                {"output_punishes", s.updates.output_punishes}}}};
}

inline std::string record_header() { return "epoch,time,layer,winner,local,global,label,prediction\n"; }

inline void append_record(std::string& out, const RecordRow& r) {
  auto opt = [&](const std::optional<std::size_t>& v) {
    if (v) out.append(std::to_string(*v));
    else out.append("-1");
  };
  out.append(std::to_string(r.epoch)).push_back(',');
  append_time(out, r.time);
  out.push_back(',');
  out.append(std::to_string(r.layer)).push_back(',');
  opt(r.winner);
  out.push_back(',');
  out.push_back(r.local_attention ? '1' : '0');
  out.push_back(',');
  out.push_back(r.global_attention ? '1' : '0');
  out.push_back(',');
  opt(r.label);
  out.push_back(',');
  opt(r.prediction);
  out.push_back('\n');
}

// Where a training run writes its artifacts; empty paths disable output.
struct RunOutputs {
  std::filesystem::path dir;
  bool resume = false;

  std::filesystem::path checkpoint() const { return dir / "checkpoint.json"; }
  std::filesystem::path events() const { return dir / "events.csv"; }
  std::filesystem::path metrics() const { return dir / "metrics.json"; }
};

struct RunResult {
  std::uint64_t seed = 0;
  std::vector<EpochStats> epochs;
  EpochStats final_train;  // frozen pass over the training data
  EpochStats test;         // frozen pass over the held-out data
  Network network;
  SplitData data;
};

// Frozen evaluation: dynamics reset, no learning, streams in their given order.
inline EpochStats evaluate(Network net, const std::vector<Stream>& streams, bool segmented) {
  net.reset_dynamics();
  EpochOptions opt;
  opt.learn = false;
  opt.segmented = segmented;
  return run_epoch(net, streams, opt);
}

// Time shift applied to replay `epoch` of a continuous stream.
inline double epoch_offset(const SplitData& d, const TrainingSpec& t, std::size_t epoch) {
  if (d.segmented) return 0.0;
  return static_cast<double>(epoch) * (d.train.front().duration() + t.epoch_gap);
}

inline std::vector<std::size_t> epoch_order(const SplitData& d, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(d.train.size());
  std::iota(order.begin(), order.end(), 0);
  if (d.segmented) {
    Rng rng(mix_seed(mix_seed(seed, kShuffleTag), epoch));
    rng.shuffle(std::span(order));
  }
  return order;
}

inline json metrics_json(const ExperimentConfig& cfg, const RunResult& r, std::size_t epochs_done) {
  json epochs = json::array();
  json train_acc = json::array();
  for (std::size_t e = 0; e < r.epochs.size(); ++e) {
    json entry = stats_to_json(r.epochs[e]);
    entry["epoch"] = e + 1;
    epochs.push_back(std::move(entry));
    train_acc.push_back(r.epochs[e].accuracy());
  }
  json m{{"format", "odesa-metrics"},
         {"version", 1},
         {"task", task_name(cfg.dataset.task)},
         {"seed", r.seed},
         {"epochs_completed", epochs_done},
         {"train_accuracy", train_acc},
         {"epoch_stats", epochs}};
  if (epochs_done == cfg.training.epochs) {
    m["final_train"] = stats_to_json(r.final_train, r.data.class_names);
    m["test"] = stats_to_json(r.test, r.data.class_names);
    m["test_accuracy"] = r.test.accuracy();
  }
  return m;
}

namespace detail {

inline json epoch_stats_state(const EpochStats& s) {
  return json{{"n_events", s.n_events},
              {"n_labels", s.n_labels},
              {"hits", s.hits},
              {"misses", s.misses},
              {"wrong", s.wrong},
              {"false_positives", s.false_positives},
              {"spikes_per_layer", s.spikes_per_layer},
              {"labels_per_class", s.labels_per_class},
              {"hits_per_class", s.hits_per_class},
              {"updates",
               {s.updates.hidden_rewards, s.updates.hidden_punishes, s.updates.output_rewards,
                s.updates.output_punishes}}};
}

inline EpochStats epoch_stats_from_state(const json& j) {
  EpochStats s;
  s.n_events = j.at("n_events").get<std::size_t>();
  s.n_labels = j.at("n_labels").get<std::size_t>();
  s.hits = j.at("hits").get<std::size_t>();
  s.misses = j.at("misses").get<std::size_t>();
  s.wrong = j.at("wrong").get<std::size_t>();
  s.false_positives = j.at("false_positives").get<std::size_t>();
  s.spikes_per_layer = j.at("spikes_per_layer").get<std::vector<std::size_t>>();
  s.labels_per_class = j.at("labels_per_class").get<std::vector<std::size_t>>();
  s.hits_per_class = j.at("hits_per_class").get<std::vector<std::size_t>>();
  const auto u = j.at("updates").get<std::vector<std::size_t>>();
  s.updates = {u.at(0), u.at(1), u.at(2), u.at(3)};
  return s;
}

}  // namespace detail

// Checkpoint = network (with dynamics) + experiment config + training progress.
inline json training_checkpoint(const ExperimentConfig& cfg, const RunResult& r, std::size_t epochs_done,
                                std::uintmax_t events_bytes) {
  json j = network_to_json(r.network, true);
  json progress = json::array();
  for (const auto& e : r.epochs) progress.push_back(detail::epoch_stats_state(e));
  j["experiment"] = cfg.source;
  j["training"] = json{{"seed", r.seed},
                       {"epochs_completed", epochs_done},
                       {"epoch_stats", progress},
                       {"events_bytes", events_bytes}};
  if (!r.data.grf_ranges.empty()) {
    json ranges = json::array();
    for (const auto& rg : r.data.grf_ranges) ranges.push_back({rg.min, rg.max});
    j["grf_ranges"] = ranges;
  }
  return j;
}

// Trains one seed on `data`. With outputs, writes checkpoint.json after every
// epoch, events.csv (per the record mode) and metrics.json; with
// outputs.resume and an existing checkpoint, continues from it.
inline RunResult train_run(const ExperimentConfig& cfg, std::uint64_t seed, SplitData data,
                           const std::optional<RunOutputs>& outputs = std::nullopt) {
  RunResult r;
  r.seed = seed;
  r.network = Network(cfg.network_config(data.n_channels, data.n_classes, seed));
  r.data = std::move(data);
  std::size_t start_epoch = 0;
  std::uintmax_t events_bytes = 0;
  const bool record_all = cfg.training.record == RecordMode::all;

  if (outputs) {
    std::filesystem::create_directories(outputs->dir);
    if (outputs->resume && std::filesystem::exists(outputs->checkpoint())) {
      const json ck = read_json_file(outputs->checkpoint().string());
      if (ck.value("experiment", json()) != cfg.source) {
        throw ConfigError("checkpoint in " + outputs->dir.string() + " was written for a different config");
      }
      const json& tr = ck.at("training");
      if (tr.at("seed").get<std::uint64_t>() != seed) throw ConfigError("checkpoint was written for a different seed");
      r.network = network_from_json(ck);
      start_epoch = tr.at("epochs_completed").get<std::size_t>();
      for (const auto& e : tr.at("epoch_stats")) r.epochs.push_back(detail::epoch_stats_from_state(e));
      events_bytes = tr.at("events_bytes").get<std::uintmax_t>();
      if (record_all && std::filesystem::exists(outputs->events())) {
        std::filesystem::resize_file(outputs->events(), events_bytes);
      }
    } else if (cfg.training.record != RecordMode::none) {
      std::ofstream(outputs->events(), std::ios::binary | std::ios::trunc) << record_header();
      events_bytes = record_header().size();
    }
  }

  std::string rows;
  RecordSink sink = [&rows](const RecordRow& row) { append_record(rows, row); };
  std::vector<Stream> ordered;
  for (std::size_t epoch = start_epoch; epoch < cfg.training.epochs; ++epoch) {
    const bool last = epoch + 1 == cfg.training.epochs;
    const bool recording = outputs && (record_all || (last && cfg.training.record == RecordMode::last));
    EpochOptions opt;
    opt.learn = true;
    opt.segmented = r.data.segmented;
    opt.time_offset = epoch_offset(r.data, cfg.training, epoch);
    opt.epoch = epoch + 1;
    opt.record = recording ? &sink : nullptr;
    rows.clear();

    EpochStats stats;
    stats.spikes_per_layer.assign(r.network.layer_count(), 0);
    stats.labels_per_class.assign(r.network.n_classes(), 0);
    stats.hits_per_class.assign(r.network.n_classes(), 0);
    for (auto i : epoch_order(r.data, seed, epoch)) stats.merge(run_stream(r.network, r.data.train[i], opt));
    r.epochs.push_back(std::move(stats));

    if (outputs) {
      if (recording) {
        if (!record_all) {
          std::ofstream(outputs->events(), std::ios::binary | std::ios::trunc) << record_header();
          events_bytes = record_header().size();
        }
        std::ofstream ev(outputs->events(), std::ios::binary | std::ios::app);
        ev << rows;
        events_bytes += rows.size();
      }
      if (last) {
        r.final_train = evaluate(r.network, r.data.train, r.data.segmented);
        r.test = evaluate(r.network, r.data.test, r.data.segmented);
      }
      write_json_file(outputs->checkpoint().string(), training_checkpoint(cfg, r, epoch + 1, events_bytes));
      write_json_file(outputs->metrics().string(), metrics_json(cfg, r, epoch + 1));
    }
  }
  if (!outputs || start_epoch == cfg.training.epochs) {
    r.final_train = evaluate(r.network, r.data.train, r.data.segmented);
    r.test = evaluate(r.network, r.data.test, r.data.segmented);
    if (outputs) write_json_file(outputs->metrics().string(), metrics_json(cfg, r, cfg.training.epochs));
  }
  return r;
}

struct FoldResult {
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  double test_accuracy = 0.0;
  double final_train_accuracy = 0.0;
  EpochStats test;
};

struct CrossValidationReport {
  std::size_t folds = 0;
  std::vector<FoldResult> results;  // ordered by (seed, fold)
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over folds
  std::vector<double> seed_means;
};

inline double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

// Stratified k-fold cross-validation over every seed. Folds are independent
// and run on up to `workers` threads; results are reduced in (seed, fold)
// order so the report does not depend on scheduling.
inline CrossValidationReport cross_validate(const ExperimentConfig& cfg, std::size_t folds,
                                            const std::vector<std::uint64_t>& seeds, unsigned workers = 0) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (!cfg.dataset.segmented()) throw ConfigError("cross-validation needs an example-segmented dataset");
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());

  struct Job {
    std::uint64_t seed;
    std::size_t fold;
  };
  std::vector<Job> jobs;
  for (auto s : seeds) {
    for (std::size_t f = 0; f < folds; ++f) jobs.push_back({s, f});
  }
  std::vector<FoldResult> results(jobs.size());
  auto run_job = [&](std::size_t j) {
    SplitSelector sel{EvalMode::kfold, 0.5, folds, jobs[j].fold};
    auto r = train_run(cfg, jobs[j].seed, make_split(cfg, jobs[j].seed, sel));
    results[j] = FoldResult{jobs[j].seed, jobs[j].fold, r.test.accuracy(), r.final_train.accuracy(), r.test};
  };
  for (std::size_t begin = 0; begin < jobs.size(); begin += workers) {
    std::vector<std::future<void>> batch;
    for (std::size_t j = begin; j < std::min(jobs.size(), begin + workers); ++j) {
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async, run_job, j));
    }
    for (auto& f : batch) f.get();
  }

  CrossValidationReport rep;
  rep.folds = folds;
  rep.results = std::move(results);
  std::vector<double> accs;
  for (const auto& r : rep.results) accs.push_back(r.test_accuracy);
  rep.mean = mean_of(accs);
  rep.stddev = sample_stddev(accs);
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    std::vector<double> v(accs.begin() + static_cast<std::ptrdiff_t>(s * folds),
                          accs.begin() + static_cast<std::ptrdiff_t>((s + 1) * folds));
    rep.seed_means.push_back(mean_of(v));
  }
  return rep;
}

inline json cross_validation_json(const CrossValidationReport& rep) {
  json folds = json::array();
  for (const auto& r : rep.results) {
    folds.push_back(json{{"seed", r.seed},
                         {"fold", r.fold},
                         {"test_accuracy", r.test_accuracy},
                         {"final_train_accuracy", r.final_train_accuracy},
                         {"test", stats_to_json(r.test)}});
  }
  return json{{"format", "odesa-cross-validation"},
              {"version", 1},
              {"folds", rep.folds},
              {"mean_accuracy", rep.mean},
              {"stddev_accuracy", rep.stddev},
              {"seed_mean_accuracy", rep.seed_means},
              {"results", folds}};
}

}  // namespace odesa::harness
