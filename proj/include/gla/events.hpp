#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gla/errors.hpp"

namespace gla {

/// The finite event space: distinct event-type strings with integer codes
/// assigned in first-appearance order.
class EventAlphabet {
 public:
  /// Returns the code of `symbol`, inserting it if unseen.
  int add(const std::string &symbol) {
    auto it = index_.find(symbol);
    if (it != index_.end()) return it->second;
    const int code = static_cast<int>(symbols_.size());
    symbols_.push_back(symbol);
    index_.emplace(symbol, code);
    return code;
  }

  std::optional<int> code(const std::string &symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const std::string &symbol(int code) const { return symbols_.at(code); }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string> &symbols() const { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

/// An encoded event stream over its alphabet.
struct EventSeries {
  std::vector<int> codes;
  EventAlphabet alphabet;

  std::size_t length() const { return codes.size(); }
};

/// One fixed-length subsequence of the series.
struct Window {
  int index = 0;          ///< 1-based window id k
  std::size_t start = 0;  ///< 1-based position of the first event in the series
  std::vector<int> codes;
};

enum class InputFormat { plain, syslog };

namespace detail {

inline bool ascii_letters_only(std::string_view word) {
  for (const char c : word) {
    const bool lower = c >= 'a' && c <= 'z';
    const bool upper = c >= 'A' && c <= 'Z';
    if (!lower && !upper) return false;
  }
  return !word.empty();
}

inline std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t') ++j;
    if (j > i) tokens.push_back(text.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace detail

/// Event-typing rule for log descriptions: the space-joined first up-to-3
/// words that are at least 3 characters long and contain only ASCII letters.
/// Yields "<empty>" when no word qualifies. Idempotent on its own output.
inline std::string first_words_feature(std::string_view description) {
  std::string feature;
  int taken = 0;
  for (const auto word : detail::split_ws(description)) {
    if (word.size() < 3 || !detail::ascii_letters_only(word)) continue;
    if (!feature.empty()) feature += ' ';
    feature.append(word);
    if (++taken == 3) break;
  }
  if (feature.empty()) return "<empty>";
  return feature;
}

/// Header and description of one syslog-style line. The description is
/// everything after the first ": " that follows the process tag; the header
/// before it must hold at least timestamp (3 tokens), host, and tag.
struct SyslogFields {
  std::string process;      ///< tag name with any "[pid]" suffix stripped
  std::string description;  ///< free text after the tag separator
};

inline std::optional<SyslogFields> parse_syslog_line(std::string_view line) {
  const std::size_t sep = line.find(": ");
  if (sep == std::string_view::npos) return std::nullopt;
  const auto header = detail::split_ws(line.substr(0, sep));
  if (header.size() < 5) return std::nullopt;
  std::string_view tag = header.back();
  const std::size_t bracket = tag.find('[');
  if (bracket != std::string_view::npos) tag = tag.substr(0, bracket);
  if (tag.empty()) return std::nullopt;
  return SyslogFields{std::string(tag), std::string(line.substr(sep + 2))};
}

/// Maps a raw syslog line to its event-type string, or "<unparsed>" when the
/// header cannot be split.
inline std::string tokenize_syslog_line(std::string_view line) {
  const auto fields = parse_syslog_line(line);
  if (!fields) return "<unparsed>";
  return first_words_feature(fields->description);
}

/// Reads an event stream. Plain mode takes each nonempty line verbatim as an
/// event type; syslog mode applies tokenize_syslog_line, keeping only lines
/// whose process tag matches `app_filter` when one is given. The alphabet is
/// built over the whole batch in first-appearance order.
inline EventSeries ingest(std::istream &lines, InputFormat format,
                          const std::string &app_filter = "") {
  EventSeries series;
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == InputFormat::plain) {
      series.codes.push_back(series.alphabet.add(line));
      continue;
    }
    const auto fields = parse_syslog_line(line);
    if (!app_filter.empty()) {
      if (!fields || fields->process != app_filter) continue;
    }
    const std::string type =
        fields ? first_words_feature(fields->description) : "<unparsed>";
    series.codes.push_back(series.alphabet.add(type));
  }
  if (series.codes.empty()) throw InputError("empty series");
  return series;
}

inline EventSeries ingest_file(const std::string &path, InputFormat format,
                               const std::string &app_filter = "") {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file: " + path);
  return ingest(in, format, app_filter);
}

/// Slides a window of length `n` with shift `m` over the series and returns
/// the K = floor((N + m - n) / m) complete windows; a trailing incomplete
/// window is dropped.
inline std::vector<Window> extract_windows(const EventSeries &series,
                                           std::size_t n, std::size_t m) {
  const std::size_t total = series.length();
  if (n == 0) throw ConfigError("window length must be positive");
  if (m == 0) throw ConfigError("shift must be positive");
  if (n > total) throw ConfigError("window longer than series");

  const std::size_t count = (total + m - n) / m;
  std::vector<Window> windows;
  windows.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    Window w;
    w.index = static_cast<int>(k);
    w.start = (k - 1) * m + 1;
    w.codes.assign(series.codes.begin() + (w.start - 1),
                   series.codes.begin() + (w.start - 1 + n));
    windows.push_back(std::move(w));
  }
  return windows;
}

}  // namespace gla
