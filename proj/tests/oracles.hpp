#pragma once

// Independent reference implementations used by the tests. Nothing here
// reuses library internals beyond the plain Event / Rng types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "odesa/event.hpp"
#include "odesa/random.hpp"

namespace oracle {

struct Train {
  std::size_t channels = 1;
  std::vector<odesa::Event> events;
  double last = 0.0;
};

// Sorted random spike train with up to `max_channels` channels and
// `max_spikes` spikes; coincident spikes are allowed.
inline Train random_train(odesa::Rng& rng, std::size_t max_channels, std::size_t max_spikes) {
  Train t;
  t.channels = rng.between(1, max_channels);
  const std::size_t n = rng.between(1, max_spikes);
  double time = rng.uniform(0.0, 2.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (rng.uniform() < 0.9) time += rng.uniform(0.0, 1.0);
    t.events.push_back({rng.below(t.channels), time});
  }
  t.last = time;
  return t;
}

// S[i](t) = sum over spikes on i at or before t of c * exp(-(t - t_k) / tau).
inline std::vector<double> surface(const std::vector<odesa::Event>& events, std::size_t channels, double tau,
                                   double c, double t) {
  std::vector<double> s(channels, 0.0);
  for (const auto& e : events) {
    if (e.time <= t) s[e.channel] += c * std::exp(-(t - e.time) / tau);
  }
  return s;
}

// Start positions of every (possibly overlapping) occurrence of `needle`.
inline std::vector<std::size_t> occurrences(const std::string& hay, const std::string& needle) {
  std::vector<std::size_t> out;
  if (needle.empty() || needle.size() > hay.size()) return out;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool ok = true;
    for (std::size_t j = 0; j < needle.size() && ok; ++j) ok = hay[i + j] == needle[j];
    if (ok) out.push_back(i);
  }
  return out;
}

// Decodes a two-channel Morse stream (channel 0 dot, channel 1 dash) using
// the gap between consecutive onsets: below 2 units stays inside a letter,
// below 5 ends the letter, anything longer also ends the word.
inline std::string morse_decode(const std::vector<odesa::Event>& events, double unit) {
  static const std::map<std::string, char> table = {
      {".-", 'A'},    {"-...", 'B'},  {"-.-.", 'C'},  {"-..", 'D'},   {".", 'E'},     {"..-.", 'F'},
      {"--.", 'G'},   {"....", 'H'},  {"..", 'I'},    {".---", 'J'},  {"-.-", 'K'},   {".-..", 'L'},
      {"--", 'M'},    {"-.", 'N'},    {"---", 'O'},   {".--.", 'P'},  {"--.-", 'Q'},  {".-.", 'R'},
      {"...", 'S'},   {"-", 'T'},     {"..-", 'U'},   {"...-", 'V'},  {".--", 'W'},   {"-..-", 'X'},
      {"-.--", 'Y'},  {"--..", 'Z'},  {"-----", '0'}, {".----", '1'}, {"..---", '2'}, {"...--", '3'},
      {"....-", '4'}, {".....", '5'}, {"-....", '6'}, {"--...", '7'}, {"---..", '8'}, {"----.", '9'}};
  std::string text, symbol;
  auto flush = [&] {
    if (symbol.empty()) return;
    const auto it = table.find(symbol);
    text += it == table.end() ? '?' : it->second;
    symbol.clear();
  };
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (k > 0) {
      const double gap = (events[k].time - events[k - 1].time) / unit;
      if (gap > 2.0) flush();
      if (gap > 5.0) text += ' ';
    }
    symbol += events[k].channel == 0 ? '.' : '-';
  }
  flush();
  return text;
}

}  // namespace oracle
