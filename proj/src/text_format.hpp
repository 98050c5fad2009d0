#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dimple/common.hpp"

// line-oriented text parsing shared by the on-disk formats: '#' starts a
// comment, blank lines are skipped, errors carry file:line context

namespace dimple::textio {

struct Line {
  std::size_t number = 0;           // 1-based line number in the file
  std::vector<std::string> tokens;  // whitespace-separated, comments stripped
};

inline std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line) + ": ";
}

inline std::vector<Line> read_lines(const std::string& path) {
  std::ifstream in(path);
  require_data(in.good(), "cannot open " + path);
  std::vector<Line> lines;
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line line;
    line.number = number;
    std::string tok;
    while (ss >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  require_data(!in.bad(), "read failure on " + path);
  return lines;
}

inline long long parse_int(const std::string& tok, const std::string& where) {
  long long v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  require_data(res.ec == std::errc{} && res.ptr == tok.data() + tok.size(),
               where + "expected an integer, got '" + tok + "'");
  return v;
}

inline double parse_real(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  require_data(res.ec == std::errc{} && res.ptr == tok.data() + tok.size(),
               where + "expected a number, got '" + tok + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& tok, const std::string& where) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  require_data(res.ec == std::errc{} && res.ptr == tok.data() + tok.size(),
               where + "expected a non-negative integer, got '" + tok + "'");
  return v;
}

}  // namespace dimple::textio
