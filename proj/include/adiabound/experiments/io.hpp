#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/tsp/parse.hpp"

namespace adiabound::experiments {

/// Writes to `<path>.tmp` then renames over `path`, so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

/// Header plus rows of preformatted cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw InvalidArgument("table row width mismatch");
    // cells are numbers or identifiers, so CSV needs no quoting
    for (const auto& c : row) {
      if (c.find_first_of(",\n") != std::string::npos) throw InvalidArgument("table cell '" + c + "' contains a separator");
    }
    rows.push_back(std::move(row));
  }
};

inline std::string cell(double v) { return tsp::format_double(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += r[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline Table table_from_csv(std::string_view text) {
  Table t;
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t f = 0;
    while (true) {
      std::size_t c = line.find(',', f);
      fields.emplace_back(line.substr(f, c == std::string_view::npos ? std::string_view::npos : c - f));
      if (c == std::string_view::npos) break;
      f = c + 1;
    }
    if (first) {
      t.header = std::move(fields);
      first = false;
    } else {
      t.add(std::move(fields));
    }
  }
  return t;
}

/// Column-aligned rendering for terminals.
inline std::string to_pretty(const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto shorten = [](const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    auto [p, ec] = std::from_chars(b, b + s.size(), v);
    if (ec != std::errc() || p != b + s.size() || s.find_first_of(".eE") == std::string::npos) return s;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf);
  };
  std::vector<std::vector<std::string>> shown;
  for (const auto& r : t.rows) {
    std::vector<std::string> s;
    for (const auto& c : r) s.push_back(shorten(c));
    shown.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < width.size(); ++i) {
    width[i] = t.header[i].size();
    for (const auto& r : shown) width[i] = std::max(width[i], r[i].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << (i ? "  " : "") << std::setw(static_cast<int>(width[i])) << r[i];
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : shown) line(r);
  return os.str();
}

}  // namespace adiabound::experiments
