#pragma once

// Small string helpers shared by the parsers and the envelope splitter.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace oowm::detail {

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

inline std::string_view ltrim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  return s;
}

inline std::string_view rtrim(std::string_view s) {
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline std::string_view trim(std::string_view s) { return rtrim(ltrim(s)); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// `lower` starts with `word` followed by a non-word character or the end.
inline bool starts_with_word(std::string_view lower, std::string_view word) {
  return lower.starts_with(word) && (lower.size() == word.size() || !is_word_char(lower[word.size()]));
}

/// Splits on '\n'; a trailing '\r' stays in the line and is removed by trim.
inline std::vector<std::string_view> split_lines(std::string_view src) {
  std::vector<std::string_view> lines;
  std::size_t begin = 0;
  while (begin <= src.size()) {
    std::size_t end = src.find('\n', begin);
    if (end == std::string_view::npos) {
      lines.push_back(src.substr(begin));
      break;
    }
    lines.push_back(src.substr(begin, end - begin));
    begin = end + 1;
  }
  return lines;
}

}  // namespace oowm::detail
