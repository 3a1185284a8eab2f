#pragma once

// Gaussian receptive-field population coding: each real feature drives m
// channels whose centers tile the feature range; a channel spikes once, earlier
// the closer the value is to its center.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "odesa/encoders/spike_csv.hpp"
#include "odesa/error.hpp"
#include "odesa/event.hpp"

namespace odesa {

struct FeatureRange {
  double min = 0.0;
  double max = 1.0;
};

struct GrfEncoderConfig {
  std::size_t m = 5;    // fields per feature
  double beta = 1.5;    // width parameter
  double window = 1.0;  // encoding window T
  // Activations below the cutoff produce no spike. Off by default: every
  // channel spikes once.
  std::optional<double> cutoff;
  std::vector<FeatureRange> ranges;

  void validate() const {
    if (m < 3) throw ConfigError("grf needs at least 3 fields per feature");
    if (!(beta > 0.0)) throw ConfigError("grf beta must be positive");
    if (!(window > 0.0)) throw ConfigError("grf window must be positive");
    for (const auto& r : ranges) {
      if (!std::isfinite(r.min) || !std::isfinite(r.max)) throw ConfigError("grf ranges must be finite");
      if (!(r.max > r.min)) throw DegenerateRangeError("feature range has zero width");
    }
  }
};

// Per-feature min/max over the given samples.
inline std::vector<FeatureRange> fit_ranges(std::span<const std::vector<double>> samples) {
  if (samples.empty()) throw ConfigError("cannot fit ranges on an empty sample set");
  const std::size_t d = samples.front().size();
  std::vector<FeatureRange> ranges(d, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
  for (const auto& s : samples) {
    if (s.size() != d) throw ConfigError("samples have inconsistent feature counts");
    for (std::size_t f = 0; f < d; ++f) {
      ranges[f].min = std::min(ranges[f].min, s[f]);
      ranges[f].max = std::max(ranges[f].max, s[f]);
    }
  }
  for (const auto& r : ranges) {
    if (!(r.max > r.min)) throw DegenerateRangeError("constant feature cannot be encoded");
  }
  return ranges;
}

inline double grf_center(const FeatureRange& r, std::size_t m, std::size_t field) {
  const double i = static_cast<double>(field + 1);
  return r.min + ((2.0 * i - 3.0) / 2.0) * (r.max - r.min) / static_cast<double>(m - 2);
}

inline double grf_width(const FeatureRange& r, std::size_t m, double beta) {
  return (1.0 / beta) * (r.max - r.min) / static_cast<double>(m - 2);
}

// Spike time of one field for value x: T (1 - g), g the Gaussian activation.
inline double grf_spike_time(double x, const FeatureRange& r, std::size_t field, const GrfEncoderConfig& cfg) {
  const double mu = grf_center(r, cfg.m, field);
  const double sigma = grf_width(r, cfg.m, cfg.beta);
  const double g = std::exp(-(x - mu) * (x - mu) / (2.0 * sigma * sigma));
  return cfg.window * (1.0 - g);
}

// Encodes one sample into a sorted stream of (features x m) channels. Channel
// f*m + i carries field i of feature f. With `label`, a label is placed on the
// last spike.
inline Stream grf_encode(std::span<const double> sample, const GrfEncoderConfig& cfg,
                         std::optional<std::size_t> label = std::nullopt) {
  cfg.validate();
  if (sample.size() != cfg.ranges.size()) throw ConfigError("sample length does not match the fitted ranges");
  Stream s;
  s.n_channels = sample.size() * cfg.m;
  s.events.reserve(s.n_channels);
  for (std::size_t f = 0; f < sample.size(); ++f) {
    if (!std::isfinite(sample[f])) throw ConfigError("sample features must be finite");
    for (std::size_t i = 0; i < cfg.m; ++i) {
      const double t = grf_spike_time(sample[f], cfg.ranges[f], i, cfg);
      if (cfg.cutoff && 1.0 - t / cfg.window < *cfg.cutoff) continue;
      s.events.push_back(Event{f * cfg.m + i, std::clamp(quantize_time(t), 0.0, cfg.window)});
    }
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const Event& a, const Event& b) { return a.time < b.time; });
  if (label && !s.events.empty()) s.labels.push_back(LabeledEvent{*label, s.events.back().time});
  return s;
}

}  // namespace odesa
