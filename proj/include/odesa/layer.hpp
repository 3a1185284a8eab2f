#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odesa/error.hpp"
#include "odesa/event.hpp"
#include "odesa/random.hpp"
#include "odesa/time_surface.hpp"

namespace odesa {

struct LayerParams {
  std::size_t n_neurons = 1;
  std::size_t n_inputs = 1;
  double tau_input = 1.0;   // decay of this layer's input time surface
  double tau_trace = 1.0;   // decay of this layer's spike traces (next layer's tau_input)
  double eta = 0.01;        // weight learning rate
  double eta_thresh = 0.01; // threshold learning rate
  double theta_open = 0.001;
  double phi = 0.1;         // trace recency threshold
  double theta_init = 0.001;
  double c = 1.0;           // potential increment per input spike
  double feast_delta = 0.001;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be positive and finite");
    };
    if (n_neurons == 0) throw ConfigError("layer needs at least one neuron");
    if (n_inputs == 0) throw ConfigError("layer needs at least one input channel");
    positive(tau_input, "tau_input");
    positive(tau_trace, "tau_trace");
    positive(theta_open, "theta_open");
    positive(c, "c");
    positive(feast_delta, "feast_delta");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must be in (0, 1]");
    if (!(eta_thresh > 0.0 && eta_thresh <= 1.0)) throw ConfigError("eta_thresh must be in (0, 1]");
    if (!(phi > 0.0 && phi < 1.0)) throw ConfigError("phi must be in (0, 1)");
    if (!std::isfinite(theta_init)) throw ConfigError("theta_init must be finite");
  }
};

struct AttentionCounts {
  std::size_t rewards = 0;
  std::size_t punishes = 0;
};

// A hard winner-take-all layer with adaptive selection thresholds.
//
// Each input spike updates the layer's time surface; the normalized surface
// (the context) is matched against every neuron's unit-norm weight row. Among
// neurons whose membrane value reaches their threshold, the largest wins and
// emits one output spike at the input time. A winning spike captures the
// neuron's eligibility (its context and membrane value); a later reward moves
// the weight row toward that context and the threshold toward that membrane
// value.
class Layer {
 public:
  Layer() = default;

  Layer(const LayerParams& params, std::uint64_t seed)
      : params_(params),
        weights_(params.n_neurons * params.n_inputs),
        thresholds_(params.n_neurons, params.theta_init),
        elig_context_(params.n_neurons * params.n_inputs, 0.0),
        elig_membrane_(params.n_neurons, 0.0),
        eligible_(params.n_neurons, 0),
        traces_(params.n_neurons, params.tau_trace),
        surface_(params.n_inputs, params.tau_input, params.c),
        context_(params.n_inputs, 0.0),
        membrane_(params.n_neurons, 0.0) {
    params_.validate();
    Rng rng(seed);
    for (std::size_t n = 0; n < size(); ++n) {
      auto row = row_of(n);
      for (double& w : row) w = rng.uniform();
      normalize_l2(row);
    }
  }

  const LayerParams& params() const { return params_; }
  std::size_t size() const { return params_.n_neurons; }
  std::size_t inputs() const { return params_.n_inputs; }

  std::span<const double> weights(std::size_t neuron) const {
    return std::span<const double>(weights_).subspan(neuron * inputs(), inputs());
  }
  std::span<const double> weight_matrix() const { return weights_; }
  std::span<const double> thresholds() const { return thresholds_; }
  const TraceSet& traces() const { return traces_; }
  const TimeSurface& surface() const { return surface_; }
  // Context and membrane values computed by the most recent forward pass.
  std::span<const double> last_context() const { return context_; }
  std::span<const double> last_membranes() const { return membrane_; }

  bool has_eligibility(std::size_t neuron) const { return eligible_.at(neuron) != 0; }
  // Context captured at the neuron's last winning spike.
  std::span<const double> eligibility_context(std::size_t neuron) const {
    return std::span<const double>(elig_context_).subspan(neuron * inputs(), inputs());
  }
  // dW: what a reward would add to the weight row before scaling by eta.
  std::vector<double> eligibility_dw(std::size_t neuron) const {
    std::vector<double> dw(inputs(), 0.0);
    if (!has_eligibility(neuron)) return dw;
    auto c = eligibility_context(neuron);
    auto w = weights(neuron);
    for (std::size_t i = 0; i < inputs(); ++i) dw[i] = c[i] - w[i];
    return dw;
  }
  // dTheta: membrane value at the last win minus the current threshold.
  double eligibility_dtheta(std::size_t neuron) const {
    return has_eligibility(neuron) ? elig_membrane_[neuron] - thresholds_[neuron] : 0.0;
  }

  void set_weights(std::size_t neuron, std::span<const double> row) {
    if (row.size() != inputs()) throw BoundsError("weight row has wrong length");
    auto dst = row_of(neuron);
    std::copy(row.begin(), row.end(), dst.begin());
    normalize_l2(dst);
  }
  void set_threshold(std::size_t neuron, double theta) { thresholds_.at(neuron) = theta; }

  // Matches one input spike. With `learn` set, the winner's eligibility and
  // trace are recorded; otherwise the pass only advances the time surface.
  std::optional<Event> forward(const Event& e, bool learn = true) {
    const auto winner = match(e);
    if (!winner) return std::nullopt;
    if (learn) capture(*winner, e.time);
    return Event{*winner, e.time};
  }

  // Moves the neuron toward the context and membrane value of its last win.
  // Returns false (and changes nothing) if the neuron has never won.
  bool reward(std::size_t neuron) {
    if (!has_eligibility(neuron)) return false;
    auto row = row_of(neuron);
    auto target = eligibility_context(neuron);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] += params_.eta * (target[i] - row[i]);
    normalize_l2(row);
    // v <= 1 for unit rows and contexts, so a threshold below 1 only creeps
    // toward it; rounding, or eta_thresh = 1 on an exact match, must not land on it.
    const double before = thresholds_[neuron];
    double after = before + params_.eta_thresh * (elig_membrane_[neuron] - before);
    if (before < 1.0 && after >= 1.0) after = std::nextafter(1.0, 0.0);
    thresholds_[neuron] = after;
    return true;
  }

  void punish(std::size_t neuron) { thresholds_.at(neuron) -= params_.theta_open; }

  void punish_range(std::size_t first, std::size_t count) {
    if (first + count > size()) throw BoundsError("punish range outside layer");
    for (std::size_t n = first; n < first + count; ++n) thresholds_[n] -= params_.theta_open;
  }

  void punish_all() { punish_range(0, size()); }

  // The next layer spiked at t: reward neurons whose trace is still above
  // the recency threshold, punish the rest.
  AttentionCounts record_local_attention(double t) {
    AttentionCounts counts;
    for (std::size_t n = 0; n < size(); ++n) {
      if (traces_.read(n, t) >= params_.phi) {
        reward(n);
        ++counts.rewards;
      } else {
        punish(n);
        ++counts.punishes;
      }
    }
    return counts;
  }

  // Unsupervised step: the winner moves toward the context and raises its
  // threshold by a fixed amount; with no winner every threshold is lowered.
  std::optional<Event> feast_step(const Event& e) {
    const auto winner = match(e);
    if (!winner) {
      for (double& th : thresholds_) th -= params_.feast_delta;
      return std::nullopt;
    }
    auto row = row_of(*winner);
    for (std::size_t i = 0; i < row.size(); ++i) row[i] += params_.eta * (context_[i] - row[i]);
    normalize_l2(row);
    thresholds_[*winner] += params_.feast_delta;
    return Event{*winner, e.time};
  }

  // Clears time surface, traces and eligibility; weights and thresholds stay.
  void reset_dynamics() {
    surface_.reset();
    traces_.reset();
    std::fill(eligible_.begin(), eligible_.end(), 0);
    std::fill(elig_context_.begin(), elig_context_.end(), 0.0);
    std::fill(elig_membrane_.begin(), elig_membrane_.end(), 0.0);
  }

  // Raw state access for checkpoints.
  struct Dynamics {
    std::vector<double> potential;
    std::vector<double> timestamp;
    std::vector<double> last_spike;
    std::vector<double> elig_context;
    std::vector<double> elig_membrane;
    std::vector<unsigned char> eligible;
  };

  Dynamics dynamics() const {
    auto p = surface_.potentials();
    auto ts = surface_.timestamps();
    auto ls = traces_.last_spikes();
    return {{p.begin(), p.end()},   {ts.begin(), ts.end()}, {ls.begin(), ls.end()},
            elig_context_,          elig_membrane_,         eligible_};
  }

  void restore(std::vector<double> weights, std::vector<double> thresholds) {
    if (weights.size() != weights_.size() || thresholds.size() != thresholds_.size()) {
      throw ConfigError("layer restore size mismatch");
    }
    weights_ = std::move(weights);
    thresholds_ = std::move(thresholds);
  }

  void restore(Dynamics d) {
    if (d.elig_context.size() != elig_context_.size() || d.elig_membrane.size() != size() ||
        d.eligible.size() != size()) {
      throw ConfigError("layer dynamics restore size mismatch");
    }
    surface_.restore(std::move(d.potential), std::move(d.timestamp));
    traces_.restore(std::move(d.last_spike));
    elig_context_ = std::move(d.elig_context);
    elig_membrane_ = std::move(d.elig_membrane);
    eligible_ = std::move(d.eligible);
  }

 private:
  std::span<double> row_of(std::size_t neuron) {
    if (neuron >= size()) throw BoundsError("neuron " + std::to_string(neuron) + " outside layer");
    return std::span<double>(weights_).subspan(neuron * inputs(), inputs());
  }

  // Updates the surface and returns the WTA winner, lowest index on ties.
  std::optional<std::size_t> match(const Event& e) {
    surface_.update(e);
    try {
      surface_.context(e.time, context_);
    } catch (const NoContextError&) {
      return std::nullopt;
    }
    std::optional<std::size_t> winner;
    double best = 0.0;
    for (std::size_t n = 0; n < size(); ++n) {
      const double* w = weights_.data() + n * inputs();
      double v = 0.0;
      for (std::size_t i = 0; i < inputs(); ++i) v += w[i] * context_[i];
      membrane_[n] = v;
      if (v >= thresholds_[n] && (!winner || v > best)) {
        winner = n;
        best = v;
      }
    }
    return winner;
  }

  void capture(std::size_t neuron, double t) {
    std::copy(context_.begin(), context_.end(), elig_context_.begin() + neuron * inputs());
    elig_membrane_[neuron] = membrane_[neuron];
    eligible_[neuron] = 1;
    traces_.record(neuron, t);
  }

  LayerParams params_;
  std::vector<double> weights_;  // row-major, n_neurons x n_inputs, unit rows
  std::vector<double> thresholds_;
  std::vector<double> elig_context_;
  std::vector<double> elig_membrane_;
  std::vector<unsigned char> eligible_;
  TraceSet traces_;
  TimeSurface surface_;
  std::vector<double> context_;
  std::vector<double> membrane_;
};

}  // namespace odesa
