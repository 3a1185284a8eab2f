#pragma once

// Spike stream files. Events are `channel,time` rows and labels `class,time`
// rows, each file with a one-line header, LF endings and times written with
// at most nine fractional digits.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "odesa/error.hpp"
#include "odesa/event.hpp"

namespace odesa {

inline constexpr std::string_view kEventsHeader = "channel,time";
inline constexpr std::string_view kLabelsHeader = "class,time";

// Rounds a time onto the 1e-9 grid the CSV format can represent exactly.
inline double quantize_time(double t) { return std::round(t * 1e9) / 1e9; }

// Shortest decimal with at most nine fractional digits, e.g. "1.5", "0", "2.000000001".
inline void append_time(std::string& out, double t) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, t, std::chars_format::fixed, 9);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  while (s.ends_with('0')) s.remove_suffix(1);
  if (s.ends_with('.')) s.remove_suffix(1);
  if (s == "-0") s = "0";
  out.append(s);
}

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

inline void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot write " + path);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw ParseError("write failed for " + path);
}

struct Row {
  std::size_t index = 0;
  double time = 0.0;
};

// Parses `index,time` rows after the expected header.
template <typename OnRow>
void parse_rows(const std::string& text, const std::string& path, std::string_view header, OnRow on_row) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fail = [&](const std::string& what) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    if (!seen_header) {
      if (line != header) fail("expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) fail("expected two comma-separated fields");
    Row row;
    const char* first = line.data();
    auto r1 = std::from_chars(first, first + comma, row.index);
    if (r1.ec != std::errc() || r1.ptr != first + comma) fail("bad index field");
    const char* tfirst = first + comma + 1;
    const char* tlast = line.data() + line.size();
    auto r2 = std::from_chars(tfirst, tlast, row.time);
    if (r2.ec != std::errc() || r2.ptr != tlast) fail("bad time field");
    if (!(row.time >= 0.0) || !std::isfinite(row.time)) fail("time must be finite and non-negative");
    on_row(row, line_no, fail);
  }
  if (!seen_header) throw ParseError(path + ": empty file, expected header '" + std::string(header) + "'");
}

}  // namespace detail

inline std::string format_events_csv(const std::vector<Event>& events) {
  std::string out;
  out.reserve(16 + events.size() * 16);
  out.append(kEventsHeader).push_back('\n');
  for (const auto& e : events) {
    out.append(std::to_string(e.channel)).push_back(',');
    append_time(out, e.time);
    out.push_back('\n');
  }
  return out;
}

inline std::string format_labels_csv(const std::vector<LabeledEvent>& labels) {
  std::string out;
  out.append(kLabelsHeader).push_back('\n');
  for (const auto& l : labels) {
    out.append(std::to_string(l.class_id)).push_back(',');
    append_time(out, l.time);
    out.push_back('\n');
  }
  return out;
}

// Loads a sorted event file. With `n_channels`, channel indices are bounds
// checked; otherwise the channel count is inferred from the largest index.
inline Stream load_events_csv(const std::string& path, std::optional<std::size_t> n_channels = std::nullopt) {
  Stream s;
  const std::string text = detail::read_file(path);
  double last = 0.0;
  std::size_t max_channel = 0;
  detail::parse_rows(text, path, kEventsHeader, [&](const detail::Row& r, std::size_t, auto& fail) {
    if (n_channels && r.index >= *n_channels) {
      fail("channel " + std::to_string(r.index) + " >= declared count " + std::to_string(*n_channels));
    }
    if (!s.events.empty() && r.time < last) fail("out-of-order event (time decreases)");
    last = r.time;
    max_channel = std::max(max_channel, r.index);
    s.events.push_back(Event{r.index, r.time});
  });
  s.n_channels = n_channels ? *n_channels : (s.events.empty() ? 0 : max_channel + 1);
  return s;
}

inline std::vector<LabeledEvent> load_labels_csv(const std::string& path,
                                                 std::optional<std::size_t> n_classes = std::nullopt) {
  std::vector<LabeledEvent> labels;
  const std::string text = detail::read_file(path);
  detail::parse_rows(text, path, kLabelsHeader, [&](const detail::Row& r, std::size_t, auto& fail) {
    if (n_classes && r.index >= *n_classes) {
      fail("class " + std::to_string(r.index) + " >= declared count " + std::to_string(*n_classes));
    }
    if (!labels.empty() && r.time <= labels.back().time) fail("out-of-order label (times must increase)");
    labels.push_back(LabeledEvent{r.index, r.time});
  });
  return labels;
}

inline Stream load_spike_csv(const std::string& events_path, const std::optional<std::string>& labels_path,
                             std::optional<std::size_t> n_channels = std::nullopt,
                             std::optional<std::size_t> n_classes = std::nullopt) {
  Stream s = load_events_csv(events_path, n_channels);
  if (labels_path) s.labels = load_labels_csv(*labels_path, n_classes);
  return s;
}

inline void save_spike_csv(const std::string& events_path, const std::optional<std::string>& labels_path,
                           const Stream& stream) {
  detail::write_file(events_path, format_events_csv(stream.events));
  if (labels_path) detail::write_file(*labels_path, format_labels_csv(stream.labels));
}

}  // namespace odesa
