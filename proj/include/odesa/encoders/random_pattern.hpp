#pragma once

// Random pattern association: a few fixed random spatio-temporal symbols are
// streamed back to back in random order; every occurrence of a target symbol
// sequence is labeled at its final spike.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "odesa/encoders/spike_csv.hpp"
#include "odesa/error.hpp"
#include "odesa/event.hpp"
#include "odesa/random.hpp"

namespace odesa {

struct RandomPatternTaskConfig {
  std::size_t n_channels = 8;
  std::size_t n_symbols = 3;
  std::size_t min_spikes = 6;
  std::size_t max_spikes = 8;
  double symbol_window = 10.0;
  double time_resolution = 0.001;  // spike times are multiples of this
  std::vector<std::string> targets = {"BBA", "ACB", "CAC", "CCC"};
  std::size_t stream_length = 300;  // symbols
  std::uint64_t seed = 0;

  void validate() const {
    if (n_channels == 0) throw ConfigError("random pattern task needs channels");
    if (n_symbols == 0 || n_symbols > 26) throw ConfigError("symbol count must be in 1..26");
    if (min_spikes == 0 || min_spikes > max_spikes) throw ConfigError("invalid spikes-per-symbol range");
    if (!(symbol_window > 0.0) || !(time_resolution > 0.0) || time_resolution >= symbol_window) {
      throw ConfigError("invalid symbol window or resolution");
    }
    if (targets.empty()) throw ConfigError("random pattern task needs targets");
    for (const auto& t : targets) {
      if (t.empty()) throw ConfigError("empty target sequence");
      for (char c : t) {
        if (c < 'A' || static_cast<std::size_t>(c - 'A') >= n_symbols) {
          throw ConfigError("target '" + t + "' uses a symbol outside the alphabet");
        }
      }
    }
  }
};

// One symbol: spikes relative to the symbol onset, sorted by time.
using Symbol = std::vector<Event>;

struct RandomPatternTask {
  std::vector<Symbol> symbols;
  std::string sequence;  // symbol letters in stream order
  Stream stream;
};

inline std::vector<Symbol> make_symbols(const RandomPatternTaskConfig& cfg, Rng& rng) {
  const auto slots = static_cast<std::size_t>(cfg.symbol_window / cfg.time_resolution);
  std::vector<Symbol> symbols(cfg.n_symbols);
  for (auto& sym : symbols) {
    const std::size_t count = rng.between(cfg.min_spikes, cfg.max_spikes);
    for (std::size_t k = 0; k < count; ++k) {
      const double t = static_cast<double>(rng.below(slots)) * cfg.time_resolution;
      sym.push_back(Event{rng.below(cfg.n_channels), t});
    }
    std::stable_sort(sym.begin(), sym.end(), [](const Event& a, const Event& b) {
      return a.time < b.time || (a.time == b.time && a.channel < b.channel);
    });
  }
  return symbols;
}

inline RandomPatternTask build_random_pattern_task(const RandomPatternTaskConfig& cfg) {
  cfg.validate();
  Rng rng(mix_seed(cfg.seed, 0x5eed));
  RandomPatternTask task;
  task.symbols = make_symbols(cfg, rng);
  task.stream.n_channels = cfg.n_channels;
  for (std::size_t p = 0; p < cfg.stream_length; ++p) {
    const std::size_t sym = rng.below(cfg.n_symbols);
    task.sequence.push_back(static_cast<char>('A' + sym));
    const double onset = static_cast<double>(p) * cfg.symbol_window;
    for (const auto& e : task.symbols[sym]) {
      task.stream.events.push_back(Event{e.channel, quantize_time(onset + e.time)});
    }
    const double last = task.stream.events.back().time;
    bool labeled = false;
    for (std::size_t k = 0; k < cfg.targets.size(); ++k) {
      const auto& target = cfg.targets[k];
      if (task.sequence.size() < target.size()) continue;
      if (task.sequence.compare(task.sequence.size() - target.size(), target.size(), target) != 0) continue;
      if (labeled) throw ConfigError("two targets end on the same symbol; labels would collide");
      task.stream.labels.push_back(LabeledEvent{k, last});
      labeled = true;
    }
  }
  return task;
}

}  // namespace odesa
