#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "odesa/error.hpp"
#include "odesa/event.hpp"

namespace odesa {

// Per-channel exponentially decaying spike potential. State is stored as
// (potential, timestamp) pairs and decayed lazily on read, so the cost of an
// update is O(1) and of a read O(channels) regardless of the time elapsed.
class TimeSurface {
 public:
  TimeSurface() = default;
  TimeSurface(std::size_t n_channels, double tau, double increment = 1.0)
      : potential_(n_channels, 0.0), timestamp_(n_channels, 0.0), tau_(tau), increment_(increment) {
    if (!(tau > 0.0)) throw ConfigError("time surface tau must be positive");
    if (!(increment > 0.0)) throw ConfigError("time surface increment must be positive");
  }

  std::size_t size() const { return potential_.size(); }
  double tau() const { return tau_; }
  double increment() const { return increment_; }
  double latest() const { return latest_; }
  std::span<const double> potentials() const { return potential_; }
  std::span<const double> timestamps() const { return timestamp_; }

  void update(const Event& e) {
    if (e.channel >= potential_.size()) {
      throw BoundsError("channel " + std::to_string(e.channel) + " outside surface of " +
                        std::to_string(potential_.size()) + " channels");
    }
    double& ts = timestamp_[e.channel];
    if (e.time < ts) {
      throw OutOfOrderError("spike at t=" + std::to_string(e.time) + " precedes last spike at t=" +
                            std::to_string(ts) + " on channel " + std::to_string(e.channel));
    }
    double& p = potential_[e.channel];
    p = p * std::exp(-(e.time - ts) / tau_) + increment_;
    ts = e.time;
    latest_ = std::max(latest_, e.time);
  }

  // S[i] = P[i] exp(-(t - TS[i]) / tau). Does not mutate.
  void read(double t, std::span<double> out) const {
    check_read_time(t);
    for (std::size_t i = 0; i < potential_.size(); ++i) {
      out[i] = potential_[i] == 0.0 ? 0.0 : potential_[i] * std::exp(-(t - timestamp_[i]) / tau_);
    }
  }

  std::vector<double> read(double t) const {
    std::vector<double> s(size());
    read(t, s);
    return s;
  }

  // Unit L2 direction of the surface at time t. Returns the norm of the raw
  // surface. Throws NoContextError when every channel is silent.
  double context(double t, std::span<double> out) const {
    read(t, out);
    double sq = 0.0;
    for (double v : out) sq += v * v;
    if (!(sq > 0.0)) throw NoContextError("time surface is all zero at t=" + std::to_string(t));
    const double norm = std::sqrt(sq);
    for (double& v : out) v /= norm;
    return norm;
  }

  std::vector<double> context(double t) const {
    std::vector<double> c(size());
    context(t, c);
    return c;
  }

  void reset() {
    std::fill(potential_.begin(), potential_.end(), 0.0);
    std::fill(timestamp_.begin(), timestamp_.end(), 0.0);
    latest_ = 0.0;
  }

  // Direct state restore, used by checkpoints.
  void restore(std::vector<double> potential, std::vector<double> timestamp) {
    if (potential.size() != size() || timestamp.size() != size()) {
      throw ConfigError("time surface restore size mismatch");
    }
    potential_ = std::move(potential);
    timestamp_ = std::move(timestamp);
    latest_ = 0.0;
    for (double ts : timestamp_) latest_ = std::max(latest_, ts);
  }

 private:
  void check_read_time(double t) const {
    if (t < latest_) {
      throw OutOfOrderError("read at t=" + std::to_string(t) + " precedes last spike at t=" +
                            std::to_string(latest_));
    }
  }

  std::vector<double> potential_;
  std::vector<double> timestamp_;
  double tau_ = 1.0;
  double increment_ = 1.0;
  double latest_ = 0.0;
};

// Normalizes `values` to unit L2 norm in place. Throws NoContextError on a
// zero vector.
inline void normalize_l2(std::span<double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (!(sq > 0.0)) throw NoContextError("cannot normalize a zero vector");
  const double norm = std::sqrt(sq);
  for (double& v : values) v /= norm;
}

// Exponential memory of each neuron's most recent spike.
class TraceSet {
 public:
  static constexpr double never = -std::numeric_limits<double>::infinity();

  TraceSet() = default;
  TraceSet(std::size_t n_neurons, double tau) : last_spike_(n_neurons, never), tau_(tau) {
    if (!(tau > 0.0)) throw ConfigError("trace tau must be positive");
  }

  std::size_t size() const { return last_spike_.size(); }
  double tau() const { return tau_; }
  std::span<const double> last_spikes() const { return last_spike_; }

  void record(std::size_t neuron, double t) {
    if (t < latest_) throw OutOfOrderError("trace spike at t=" + std::to_string(t) + " precedes t=" + std::to_string(latest_));
    last_spike_.at(neuron) = t;
    latest_ = t;
  }

  double read(std::size_t neuron, double t) const {
    if (t < latest_) throw OutOfOrderError("trace read at t=" + std::to_string(t) + " precedes t=" + std::to_string(latest_));
    const double last = last_spike_.at(neuron);
    return last == never ? 0.0 : std::exp(-(t - last) / tau_);
  }

  void read(double t, std::span<double> out) const {
    for (std::size_t n = 0; n < last_spike_.size(); ++n) out[n] = read(n, t);
  }

  std::vector<double> read(double t) const {
    std::vector<double> v(size());
    read(t, v);
    return v;
  }

  void reset() {
    std::fill(last_spike_.begin(), last_spike_.end(), never);
    latest_ = never;
  }

  void restore(std::vector<double> last_spike) {
    if (last_spike.size() != size()) throw ConfigError("trace restore size mismatch");
    last_spike_ = std::move(last_spike);
    latest_ = never;
    for (double t : last_spike_) latest_ = std::max(latest_, t);
  }

 private:
  std::vector<double> last_spike_;
  double tau_ = 1.0;
  double latest_ = never;
};

}  // namespace odesa
