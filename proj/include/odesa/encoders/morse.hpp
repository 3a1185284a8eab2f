#pragma once

// International Morse code as two-channel spike streams: channel 0 carries
// dots, channel 1 dashes, one spike per element at the element's onset.

#include <array>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "odesa/encoders/spike_csv.hpp"
#include "odesa/error.hpp"
#include "odesa/event.hpp"

namespace odesa {

inline constexpr std::size_t kDotChannel = 0;
inline constexpr std::size_t kDashChannel = 1;

// Dot/dash pattern of A-Z and 0-9; empty for anything else.
inline std::string_view morse_code(char c) {
  static constexpr std::array<std::string_view, 26> letters = {
      ".-",   "-...", "-.-.", "-..",  ".",   "..-.", "--.",  "....", "..",   ".---", "-.-",  ".-..", "--",
      "-.",   "---",  ".--.", "--.-", ".-.", "...",  "-",    "..-",  "...-", ".--",  "-..-", "-.--", "--.."};
  static constexpr std::array<std::string_view, 10> digits = {"-----", ".----", "..---", "...--", "....-",
                                                              ".....", "-....", "--...", "---..", "----."};
  if (c >= 'A' && c <= 'Z') return letters[static_cast<std::size_t>(c - 'A')];
  if (c >= '0' && c <= '9') return digits[static_cast<std::size_t>(c - '0')];
  return {};
}

// Spike spacing in time units: between elements of a letter, between
// letters, and between words.
struct MorseTiming {
  double unit = 1.0;
  double intra_letter_gap = 1.0;
  double inter_letter_gap = 3.0;
  double inter_word_gap = 7.0;

  void validate() const {
    if (!(unit > 0.0 && intra_letter_gap > 0.0 && inter_letter_gap > 0.0 && inter_word_gap > 0.0)) {
      throw ConfigError("morse gaps must be strictly positive");
    }
  }
};

// Encodes `text` (A-Z, 0-9 and single spaces between words) starting at
// `start`. Appends to `out` and returns the time of the last spike.
inline double morse_encode_into(std::string_view text, const MorseTiming& timing, double start,
                                std::vector<Event>& out) {
  timing.validate();
  bool first = true;
  bool word_break = false;
  double t = start;
  for (char c : text) {
    if (c == ' ') {
      word_break = true;
      continue;
    }
    const auto code = morse_code(c);
    if (code.empty()) throw ConfigError(std::string("character '") + c + "' has no Morse encoding");
    bool first_element = true;
    for (char element : code) {
      if (!first) {
        const double gap = !first_element ? timing.intra_letter_gap
                           : word_break   ? timing.inter_word_gap
                                          : timing.inter_letter_gap;
        t += gap * timing.unit;
      }
      out.push_back(Event{element == '.' ? kDotChannel : kDashChannel, quantize_time(t)});
      first = false;
      first_element = false;
    }
    word_break = false;
  }
  if (first) throw ConfigError("nothing to encode");
  return out.back().time;
}

inline std::vector<Event> morse_encode(std::string_view text, const MorseTiming& timing = {}, double start = 0.0) {
  std::vector<Event> events;
  morse_encode_into(text, timing, start, events);
  return events;
}

// Upper-cases letters, turns commas into spaces and drops apostrophes and
// other punctuation; collapses runs of spaces.
inline std::string normalize_morse_text(std::string_view raw) {
  std::string out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    char mapped = 0;
    if (std::isalpha(c)) mapped = static_cast<char>(std::toupper(c));
    else if (std::isdigit(c)) mapped = static_cast<char>(c);
    else if (c == ' ' || c == ',' || c == '\t') mapped = ' ';
    if (mapped == 0) continue;  // apostrophes, UTF-8 punctuation bytes
    if (mapped == ' ' && (out.empty() || out.back() == ' ')) continue;
    out.push_back(mapped);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

struct MorseTaskConfig {
  MorseTiming timing;
  std::vector<std::string> vocabulary;  // one class per entry
  double sequence_gap = 7.0;            // units between consecutive targets
  std::size_t repeats = 1;              // passes over the vocabulary per stream
  bool normalize = true;
};

inline MorseTaskConfig morse_names_task() {
  MorseTaskConfig c;
  c.vocabulary = {"ANDRE", "GREG", "SAEED", "YESH", "YING"};
  return c;
}

inline MorseTaskConfig morse_positional_task() {
  MorseTaskConfig c;
  c.vocabulary = {"0,0,1,0,0", "0,0,0,1,0"};
  return c;
}

inline MorseTaskConfig morse_sonnet_task() {
  MorseTaskConfig c;
  c.vocabulary = {"shall I compare thee to a summers day", "thou art more lovely and more temperate",
                  "rough winds do shake the darling buds of may", "and summer’s lease hath all too short a date"};
  return c;
}

// Streams every vocabulary entry in order (repeated `repeats` times) with a
// label of its class on the entry's last spike.
inline Stream build_morse_task(const MorseTaskConfig& cfg) {
  cfg.timing.validate();
  if (cfg.vocabulary.empty()) throw ConfigError("morse task needs a vocabulary");
  if (!(cfg.sequence_gap > 0.0)) throw ConfigError("sequence gap must be positive");
  if (cfg.repeats == 0) throw ConfigError("morse task needs at least one repeat");
  Stream s;
  s.n_channels = 2;
  double start = 0.0;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    for (std::size_t k = 0; k < cfg.vocabulary.size(); ++k) {
      const std::string text = cfg.normalize ? normalize_morse_text(cfg.vocabulary[k]) : cfg.vocabulary[k];
      const double end = morse_encode_into(text, cfg.timing, start, s.events);
      s.labels.push_back(LabeledEvent{k, end});
      start = quantize_time(end + cfg.sequence_gap * cfg.timing.unit);
    }
  }
  return s;
}

}  // namespace odesa
