#pragma once

// Instance I/O. Two formats:
//
//   matrix   first line M, then M lines of M whitespace-separated distances.
//   tsplib   NAME, TYPE (TSP/ATSP), COMMENT, DIMENSION,
//            EDGE_WEIGHT_TYPE in {EXPLICIT, EUC_2D}, EDGE_WEIGHT_FORMAT: FULL_MATRIX,
//            EDGE_WEIGHT_SECTION or NODE_COORD_SECTION, EOF.
//
// EUC_2D distances use TSPLIB nearest-integer rounding: nint(sqrt(dx^2 + dy^2)).

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/tsp/instance.hpp"

namespace adiabound::tsp {

enum class Format { tsplib, matrix };

inline Format format_from_string(std::string_view s) {
  if (s == "tsplib") return Format::tsplib;
  if (s == "matrix") return Format::matrix;
  throw InvalidArgument("unknown instance format '" + std::string(s) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    const std::size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline double parse_number(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(line, "expected a number, got '" + std::string(tok) + "'");
  }
  return v;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, v);
  if (ec != std::errc() || ptr != end || v == 0) {
    throw ParseError(line, "expected a positive integer, got '" + std::string(tok) + "'");
  }
  return v;
}

// Runs instance validation, attributing failures to the line of the offending row.
inline TspInstance validated(std::size_t M, std::vector<double> d,
                             const std::vector<std::size_t>& row_lines) {
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (d[i * M + j] < 0.0) {
        throw ParseError(row_lines[i], "negative distance at row " + std::to_string(i) +
                                           ", column " + std::to_string(j));
      }
    }
    if (d[i * M + i] != 0.0) throw ParseError(row_lines[i], "nonzero diagonal at row " + std::to_string(i));
  }
  return TspInstance(M, std::move(d));
}

inline TspInstance parse_matrix(std::istream& in) {
  std::string raw;
  std::size_t line = 0;
  std::optional<std::size_t> M;
  std::vector<double> d;
  std::vector<std::size_t> row_lines;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    const auto toks = split_ws(text);
    if (!M) {
      if (toks.size() != 1) throw ParseError(line, "malformed header: expected the city count M");
      M = parse_count(toks[0], line);
      continue;
    }
    if (row_lines.size() == *M) throw ParseError(line, "unexpected content after " + std::to_string(*M) + " rows");
    if (toks.size() != *M) {
      throw ParseError(line, "non-square matrix: row " + std::to_string(row_lines.size()) + " has " +
                                 std::to_string(toks.size()) + " entries, expected " + std::to_string(*M));
    }
    for (auto t : toks) d.push_back(parse_number(t, line));
    row_lines.push_back(line);
  }
  if (!M) throw ParseError(line, "malformed header: empty input");
  if (row_lines.size() != *M) {
    throw ParseError(line, "non-square matrix: " + std::to_string(row_lines.size()) + " rows, expected " +
                               std::to_string(*M));
  }
  return validated(*M, std::move(d), row_lines);
}

inline TspInstance parse_tsplib(std::istream& in) {
  enum class Weights { unset, explicit_matrix, euc_2d };
  std::string raw;
  std::size_t line = 0;
  std::optional<std::size_t> M;
  Weights weights = Weights::unset;
  bool full_matrix = false;
  std::vector<double> d;
  std::vector<std::size_t> row_lines;
  bool have_section = false;

  auto need_dimension = [&](std::size_t at) {
    if (!M) throw ParseError(at, "malformed header: section before DIMENSION");
  };

  while (std::getline(in, raw)) {
    ++line;
    const auto text = trim(raw);
    if (text.empty()) continue;
    if (text == "EOF") break;

    std::string_view key = text;
    std::string_view value;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
      key = trim(text.substr(0, colon));
      value = trim(text.substr(colon + 1));
    }

    if (key == "NAME" || key == "COMMENT") continue;
    if (key == "TYPE") {
      if (value != "TSP" && value != "ATSP") throw ParseError(line, "unsupported TYPE '" + std::string(value) + "'");
    } else if (key == "DIMENSION") {
      M = parse_count(value, line);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value == "EXPLICIT") {
        weights = Weights::explicit_matrix;
      } else if (value == "EUC_2D") {
        weights = Weights::euc_2d;
      } else {
        throw ParseError(line, "unsupported EDGE_WEIGHT_TYPE '" + std::string(value) + "'");
      }
    } else if (key == "EDGE_WEIGHT_FORMAT") {
      if (value != "FULL_MATRIX") throw ParseError(line, "unsupported EDGE_WEIGHT_FORMAT '" + std::string(value) + "'");
      full_matrix = true;
    } else if (key == "EDGE_WEIGHT_SECTION") {
      need_dimension(line);
      if (weights != Weights::explicit_matrix || !full_matrix) {
        throw ParseError(line, "EDGE_WEIGHT_SECTION requires EDGE_WEIGHT_TYPE: EXPLICIT and EDGE_WEIGHT_FORMAT: FULL_MATRIX");
      }
      const std::size_t n = *M;
      d.reserve(n * n);
      while (d.size() < n * n && std::getline(in, raw)) {
        ++line;
        const auto toks = split_ws(raw);
        for (auto t : toks) {
          if (d.size() == n * n) throw ParseError(line, "non-square matrix: too many weights");
          if (d.size() % n == 0) row_lines.push_back(line);
          d.push_back(parse_number(t, line));
        }
      }
      if (d.size() != n * n) {
        throw ParseError(line, "non-square matrix: " + std::to_string(d.size()) + " weights, expected " +
                                   std::to_string(n * n));
      }
      have_section = true;
    } else if (key == "NODE_COORD_SECTION") {
      need_dimension(line);
      if (weights != Weights::euc_2d) throw ParseError(line, "NODE_COORD_SECTION requires EDGE_WEIGHT_TYPE: EUC_2D");
      const std::size_t n = *M;
      std::vector<double> x(n), y(n);
      std::vector<bool> seen(n, false);
      std::size_t read = 0;
      while (read < n && std::getline(in, raw)) {
        ++line;
        const auto toks = split_ws(raw);
        if (toks.empty()) continue;
        if (toks.size() != 3) throw ParseError(line, "expected 'id x y'");
        const std::size_t id = parse_count(toks[0], line);
        if (id > n || seen[id - 1]) throw ParseError(line, "bad or repeated node id " + std::to_string(id));
        seen[id - 1] = true;
        x[id - 1] = parse_number(toks[1], line);
        y[id - 1] = parse_number(toks[2], line);
        ++read;
      }
      if (read != n) throw ParseError(line, "expected " + std::to_string(n) + " node coordinates");
      d.assign(n * n, 0.0);
      row_lines.assign(n, line);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j) continue;
          const double dx = x[i] - x[j];
          const double dy = y[i] - y[j];
          d[i * n + j] = std::floor(std::sqrt(dx * dx + dy * dy) + 0.5);
        }
      }
      have_section = true;
    } else {
      throw ParseError(line, "malformed header: unknown keyword '" + std::string(key) + "'");
    }
  }
  if (!M) throw ParseError(line, "malformed header: missing DIMENSION");
  if (!have_section) throw ParseError(line, "malformed header: missing weight or coordinate section");
  return validated(*M, std::move(d), row_lines);
}

}  // namespace detail

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline TspInstance parse_instance(std::istream& in, Format format) {
  return format == Format::matrix ? detail::parse_matrix(in) : detail::parse_tsplib(in);
}

inline TspInstance parse_instance(std::string_view text, Format format) {
  std::istringstream in{std::string(text)};
  return parse_instance(in, format);
}

inline TspInstance load_instance(const std::filesystem::path& path, Format format) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open instance file '" + path.string() + "'");
  return parse_instance(in, format);
}

/// Matrix format with shortest round-trip decimal representation.
inline std::string serialize_matrix(const TspInstance& inst) {
  const std::size_t M = inst.size();
  std::string out = std::to_string(M) + "\n";
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (j) out += ' ';
      out += format_double(inst.distance(i, j));
    }
    out += '\n';
  }
  return out;
}

inline std::string serialize_tsplib(const TspInstance& inst, std::string_view name = "instance") {
  const std::size_t M = inst.size();
  std::string out;
  out += "NAME: " + std::string(name) + "\n";
  out += "TYPE: ATSP\n";
  out += "DIMENSION: " + std::to_string(M) + "\n";
  out += "EDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n";
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (j) out += ' ';
      out += format_double(inst.distance(i, j));
    }
    out += '\n';
  }
  out += "EOF\n";
  return out;
}

}  // namespace adiabound::tsp
