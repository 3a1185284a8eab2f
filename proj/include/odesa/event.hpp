#pragma once

#include <cstddef>
#include <vector>

namespace odesa {

// A spike on `channel` at `time`.
struct Event {
  std::size_t channel = 0;
  double time = 0.0;

  friend bool operator==(const Event&, const Event&) = default;
};

// Supervisory spike: the class that should be reported at `time`. Every
// label time must coincide with an input event time of the same stream.
struct LabeledEvent {
  std::size_t class_id = 0;
  double time = 0.0;

  friend bool operator==(const LabeledEvent&, const LabeledEvent&) = default;
};

// A sorted spike stream plus its (time-aligned, sorted) labels.
struct Stream {
  std::size_t n_channels = 0;
  std::vector<Event> events;
  std::vector<LabeledEvent> labels;

  double duration() const { return events.empty() ? 0.0 : events.back().time; }
};

}  // namespace odesa
