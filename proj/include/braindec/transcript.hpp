#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace braindec {

enum class EventKind { word, pause };

/// One row of an events file. Times are in seconds.
struct Event {
  double onset = 0.0;
  double duration = 0.0;
  EventKind kind = EventKind::word;
  std::string token;  // empty for pauses

  friend bool operator==(const Event&, const Event&) = default;
};

/// A maximal run of words between narration pauses.
struct Phrase {
  std::int64_t id = 0;
  std::vector<std::string> tokens;
  double onset = 0.0;   // first word's onset
  double offset = 0.0;  // last word's onset + duration

  std::string text() const;

  friend bool operator==(const Phrase&, const Phrase&) = default;
};

/// Parses the events format: header `onset\tduration\tkind\ttoken`, kind is
/// `word` or `sp`. Tokens are kept verbatim; normalization happens during
/// segmentation. Throws Error naming the line on malformed input.
std::vector<Event> parse_events(std::istream& in);

/// Inverse of parse_events. Times are written with six fractional digits.
void write_events(std::ostream& out, const std::vector<Event>& events);

/// Lowercases and strips leading/trailing ASCII punctuation.
std::string normalize_token(std::string_view raw);

/// Splits the word stream at pauses. Pauses shorter than `min_pause_seconds`
/// do not split. Words whose token normalizes to empty are dropped.
std::vector<Phrase> segment_phrases(const std::vector<Event>& events, double min_pause_seconds = 0.0);

/// Phrases file: header `id\tonset\toffset\ttext`.
void write_phrases(std::ostream& out, const std::vector<Phrase>& phrases);
std::vector<Phrase> parse_phrases(std::istream& in);

}  // namespace braindec
