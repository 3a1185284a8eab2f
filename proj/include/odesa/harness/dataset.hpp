#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "odesa/encoders/grf.hpp"
#include "odesa/encoders/iris.hpp"
#include "odesa/encoders/morse.hpp"
#include "odesa/encoders/random_pattern.hpp"
#include "odesa/encoders/spike_csv.hpp"
#include "odesa/harness/config.hpp"
#include "odesa/random.hpp"

namespace odesa::harness {

// Training and evaluation data for one run.
struct SplitData {
  std::size_t n_channels = 0;
  std::size_t n_classes = 0;
  bool segmented = false;
  std::vector<Stream> train;
  std::vector<Stream> test;  // the training data itself for stream tasks
  std::vector<FeatureRange> grf_ranges;
  std::vector<std::string> class_names;
};

// Which part of a segmented dataset is held out.
struct SplitSelector {
  EvalMode mode = EvalMode::train;
  double test_fraction = 0.5;
  std::size_t folds = 2;
  std::size_t fold = 0;
};

inline SplitSelector selector_for(const ExperimentConfig& cfg, std::size_t fold = 0) {
  return {cfg.evaluation.mode, cfg.evaluation.test_fraction, cfg.evaluation.folds, fold};
}

namespace detail {
inline constexpr std::uint64_t kSplitTag = 0x5917;
}

// Deals each class's shuffled members round-robin over k folds, continuing
// the deal across classes so fold sizes differ by at most one.
inline std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<std::size_t>& classes, std::size_t k,
                                                              std::uint64_t seed) {
  if (k < 2) throw ConfigError("need at least two folds");
  if (classes.size() < k) throw ConfigError("fewer examples than folds");
  Rng rng(mix_seed(seed, detail::kSplitTag));
  std::size_t n_classes = 0;
  for (auto c : classes) n_classes = std::max(n_classes, c + 1);
  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t next = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == c) members.push_back(i);
    }
    rng.shuffle(std::span(members));
    for (auto i : members) {
      folds[next].push_back(i);
      next = (next + 1) % k;
    }
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

// Per class, round(n_c * fraction) shuffled members go to the test side.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_holdout(
    const std::vector<std::size_t>& classes, double test_fraction, std::uint64_t seed) {
  Rng rng(mix_seed(seed, detail::kSplitTag));
  std::size_t n_classes = 0;
  for (auto c : classes) n_classes = std::max(n_classes, c + 1);
  std::vector<std::size_t> train, test;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      if (classes[i] == c) members.push_back(i);
    }
    rng.shuffle(std::span(members));
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(members.size()) * test_fraction));
    for (std::size_t j = 0; j < members.size(); ++j) (j < n_test ? test : train).push_back(members[j]);
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> select_split(
    const std::vector<std::size_t>& classes, const SplitSelector& sel, std::uint64_t seed) {
  std::vector<std::size_t> all(classes.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  switch (sel.mode) {
    case EvalMode::train:
      return {all, all};
    case EvalMode::holdout:
      return stratified_holdout(classes, sel.test_fraction, seed);
    case EvalMode::kfold: {
      const auto folds = stratified_folds(classes, sel.folds, seed);
      if (sel.fold >= folds.size()) throw ConfigError("fold index out of range");
      std::vector<std::size_t> train;
      for (std::size_t f = 0; f < folds.size(); ++f) {
        if (f != sel.fold) train.insert(train.end(), folds[f].begin(), folds[f].end());
      }
      std::sort(train.begin(), train.end());
      return {train, folds[sel.fold]};
    }
  }
  return {all, all};
}

// Cuts a stream into examples wherever consecutive events are at least
// `gap` apart. Labels follow the example whose time span contains them.
inline std::vector<Stream> segment_stream(const Stream& s, double gap) {
  std::vector<Stream> out;
  std::size_t next_label = 0;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    if (i == 0 || s.events[i].time - s.events[i - 1].time >= gap) {
      out.push_back(Stream{s.n_channels, {}, {}});
    }
    out.back().events.push_back(s.events[i]);
    while (next_label < s.labels.size() && s.labels[next_label].time == s.events[i].time) {
      out.back().labels.push_back(s.labels[next_label++]);
    }
  }
  if (next_label < s.labels.size()) {
    throw ContractError("label at t=" + std::to_string(s.labels[next_label].time) + " has no coincident input event");
  }
  return out;
}

// Class used to stratify an example: its last label, or n_classes if unlabeled.
inline std::size_t example_class(const Stream& s, std::size_t n_classes) {
  return s.labels.empty() ? n_classes : s.labels.back().class_id;
}

inline SplitData make_iris_split(const DatasetSpec& spec, const SplitSelector& sel, std::uint64_t seed) {
  const LabeledSamples samples = load_labeled_csv(spec.iris_path);
  const auto [train_idx, test_idx] = select_split(samples.classes, sel, seed);
  SplitData d;
  d.segmented = true;
  d.n_classes = samples.class_names.size();
  d.class_names = samples.class_names;
  std::vector<std::vector<double>> train_features;
  for (auto i : train_idx) train_features.push_back(samples.features[i]);
  GrfEncoderConfig grf = spec.grf;
  grf.ranges = fit_ranges(train_features);
  d.grf_ranges = grf.ranges;
  d.n_channels = grf.ranges.size() * grf.m;
  for (auto i : train_idx) d.train.push_back(grf_encode(samples.features[i], grf, samples.classes[i]));
  for (auto i : test_idx) d.test.push_back(grf_encode(samples.features[i], grf, samples.classes[i]));
  return d;
}

inline SplitData make_split(const ExperimentConfig& cfg, std::uint64_t seed, const SplitSelector& sel) {
  const DatasetSpec& spec = cfg.dataset;
  SplitData d;
  switch (spec.task) {
    case Task::random_pattern: {
      auto rp = spec.random_pattern;
      rp.seed = seed;
      d.train.push_back(build_random_pattern_task(rp).stream);
      d.n_classes = rp.targets.size();
      d.class_names = rp.targets;
      break;
    }
    case Task::morse_names:
    case Task::morse_positional:
    case Task::morse_sonnet:
      d.train.push_back(build_morse_task(spec.morse));
      d.n_classes = spec.morse.vocabulary.size();
      d.class_names = spec.morse.vocabulary;
      break;
    case Task::iris:
      return make_iris_split(spec, sel, seed);
    case Task::csv: {
      Stream s = load_spike_csv(spec.csv.events, spec.csv.labels, spec.csv.channels, spec.csv.classes);
      std::size_t n_classes = spec.csv.classes.value_or(0);
      for (const auto& l : s.labels) n_classes = std::max(n_classes, l.class_id + 1);
      if (n_classes == 0) throw ConfigError("csv dataset has no labels; declare dataset.classes");
      d.n_classes = n_classes;
      for (std::size_t c = 0; c < n_classes; ++c) d.class_names.push_back(std::to_string(c));
      if (!spec.csv.segment_gap) {
        d.train.push_back(std::move(s));
        break;
      }
      d.segmented = true;
      d.n_channels = s.n_channels;
      auto examples = segment_stream(s, *spec.csv.segment_gap);
      std::vector<std::size_t> classes;
      for (const auto& e : examples) classes.push_back(example_class(e, n_classes));
      const auto [train_idx, test_idx] = select_split(classes, sel, seed);
      for (auto i : train_idx) d.train.push_back(examples[i]);
      for (auto i : test_idx) d.test.push_back(examples[i]);
      return d;
    }
  }
  d.n_channels = d.train.front().n_channels;
  d.test = d.train;
  return d;
}

}  // namespace odesa::harness
