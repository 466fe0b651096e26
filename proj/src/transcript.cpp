#include "braindec/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/format.h>

#include "braindec/error.hpp"
#include "braindec/io_util.hpp"

namespace braindec {
namespace {

constexpr std::string_view kEventsHeader = "onset\tduration\tkind\ttoken";
constexpr std::string_view kPhrasesHeader = "id\tonset\toffset\ttext";

void expect_header(std::istream& in, std::string_view header, std::string_view file_kind) {
  std::string line;
  if (!read_line(in, line)) throw Error(fmt::format("{} file is empty (missing header)", file_kind));
  if (line != header) {
    throw Error(fmt::format("line 1: expected {} header '{}', found '{}'", file_kind, header, line));
  }
}

bool is_ascii_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string Phrase::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<Event> parse_events(std::istream& in) {
  expect_header(in, kEventsHeader, "events");
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw Error(fmt::format("line {}: expected 4 tab-separated columns, found {}", line_no, fields.size()));
    }
    Event ev;
    ev.onset = parse_double(fields[0], "onset", line_no);
    ev.duration = parse_double(fields[1], "duration", line_no);
    if (!std::isfinite(ev.onset) || ev.onset < 0.0) {
      throw Error(fmt::format("line {}: onset must be finite and non-negative", line_no));
    }
    if (!std::isfinite(ev.duration) || ev.duration < 0.0) {
      throw Error(fmt::format("line {}: duration must be finite and non-negative", line_no));
    }
    if (fields[2] == "word") {
      ev.kind = EventKind::word;
      if (fields[3].empty()) throw Error(fmt::format("line {}: word event with empty token", line_no));
      ev.token = std::string(fields[3]);
    } else if (fields[2] == "sp") {
      ev.kind = EventKind::pause;
      if (!fields[3].empty()) throw Error(fmt::format("line {}: pause event must have an empty token", line_no));
    } else {
      throw Error(fmt::format("line {}: unknown event kind '{}'", line_no, fields[2]));
    }
    if (!events.empty() && ev.onset < events.back().onset) {
      throw Error(fmt::format("non-monotonic onset at line {} ({} follows {})", line_no,
                              format_exact(ev.onset), format_exact(events.back().onset)));
    }
    events.push_back(std::move(ev));
  }
  return events;
}

void write_events(std::ostream& out, const std::vector<Event>& events) {
  out << kEventsHeader << '\n';
  for (const auto& ev : events) {
    out << format_fixed6(ev.onset) << '\t' << format_fixed6(ev.duration) << '\t'
        << (ev.kind == EventKind::word ? "word" : "sp") << '\t' << ev.token << '\n';
  }
}

std::string normalize_token(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && is_ascii_punct(raw[begin])) ++begin;
  while (end > begin && is_ascii_punct(raw[end - 1])) --end;
  std::string out(raw.substr(begin, end - begin));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<Phrase> segment_phrases(const std::vector<Event>& events, double min_pause_seconds) {
  std::vector<Phrase> phrases;
  Phrase current;
  auto flush = [&] {
    if (current.tokens.empty()) return;
    current.id = static_cast<std::int64_t>(phrases.size());
    phrases.push_back(std::move(current));
    current = Phrase{};
  };
  for (const auto& ev : events) {
    if (ev.kind == EventKind::pause) {
      if (ev.duration >= min_pause_seconds) flush();
      continue;
    }
    auto token = normalize_token(ev.token);
    if (token.empty()) continue;
    if (current.tokens.empty()) current.onset = ev.onset;
    current.offset = ev.onset + ev.duration;
    current.tokens.push_back(std::move(token));
  }
  flush();
  return phrases;
}

void write_phrases(std::ostream& out, const std::vector<Phrase>& phrases) {
  out << kPhrasesHeader << '\n';
  for (const auto& p : phrases) {
    out << p.id << '\t' << format_fixed6(p.onset) << '\t' << format_fixed6(p.offset) << '\t' << p.text() << '\n';
  }
}

std::vector<Phrase> parse_phrases(std::istream& in) {
  expect_header(in, kPhrasesHeader, "phrases");
  std::vector<Phrase> phrases;
  std::string line;
  std::size_t line_no = 1;
  while (read_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 4) {
      throw Error(fmt::format("line {}: expected 4 tab-separated columns, found {}", line_no, fields.size()));
    }
    Phrase p;
    p.id = parse_int(fields[0], "id", line_no);
    p.onset = parse_double(fields[1], "onset", line_no);
    p.offset = parse_double(fields[2], "offset", line_no);
    if (p.onset < 0.0 || p.offset < p.onset) throw Error(fmt::format("line {}: invalid phrase span", line_no));
    std::string_view text = fields[3];
    while (!text.empty()) {
      const auto space = text.find(' ');
      const auto tok = text.substr(0, space);
      if (!tok.empty()) p.tokens.emplace_back(tok);
      if (space == std::string_view::npos) break;
      text.remove_prefix(space + 1);
    }
    if (p.tokens.empty()) throw Error(fmt::format("line {}: phrase has no tokens", line_no));
    phrases.push_back(std::move(p));
  }
  return phrases;
}

}  // namespace braindec
