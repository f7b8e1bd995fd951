#pragma once

// Deterministic CSV output: shortest round-trip decimal for doubles.

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "interphase/error.hpp"

namespace interphase::csv {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  Table& row() {
    rows_.emplace_back();
    return *this;
  }
  Table& add(double v) {
    rows_.back().push_back(format_double(v));
    return *this;
  }
  Table& add(long long v) {
    rows_.back().push_back(std::to_string(v));
    return *this;
  }
  Table& add(int v) { return add(static_cast<long long>(v)); }
  Table& add(std::string_view s) {
    rows_.back().emplace_back(s);
    return *this;
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const {
    std::string out;
    append_line(out, header_);
    for (const auto& r : rows_) append_line(out, r);
    return out;
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + path);
    f << str();
  }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace interphase::csv
