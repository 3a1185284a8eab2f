#pragma once

#include <charconv>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "odesa/encoders/spike_csv.hpp"
#include "odesa/error.hpp"

namespace odesa {

struct LabeledSamples {
  std::vector<std::vector<double>> features;
  std::vector<std::size_t> classes;
  std::vector<std::string> class_names;  // index -> name, in first-seen order

  std::size_t size() const { return features.size(); }
};

// Reads numeric feature columns followed by a class name column (the common
// 150-row IRIS layout). A non-numeric first line is treated as a header.
inline LabeledSamples load_labeled_csv(const std::string& path) {
  const std::string text = detail::read_file(path);
  LabeledSamples out;
  std::map<std::string, std::size_t, std::less<>> class_index;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    auto fail = [&](const std::string& what) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() < 2) fail("expected feature columns and a class column");
    std::vector<double> row;
    bool numeric = true;
    for (std::size_t i = 0; i + 1 < fields.size(); ++i) {
      double v = 0.0;
      const auto f = fields[i];
      auto r = std::from_chars(f.data(), f.data() + f.size(), v);
      if (r.ec != std::errc() || r.ptr != f.data() + f.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (out.features.empty() && line_no == 1) continue;  // header
      fail("non-numeric feature");
    }
    if (width == 0) width = row.size();
    if (row.size() != width) fail("inconsistent column count");
    const std::string name(fields.back());
    auto it = class_index.find(name);
    if (it == class_index.end()) {
      it = class_index.emplace(name, out.class_names.size()).first;
      out.class_names.push_back(name);
    }
    out.features.push_back(std::move(row));
    out.classes.push_back(it->second);
  }
  if (out.features.empty()) throw ParseError(path + ": no samples");
  return out;
}

}  // namespace odesa
