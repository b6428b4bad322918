#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace primespan {

// One CSV cell. Integers print exactly; reals print to 6 significant digits.
struct Cell {
  std::variant<int64_t, uint64_t, double, std::string> v;
  Cell(int i) : v(static_cast<int64_t>(i)) {}
  Cell(int64_t i) : v(i) {}
  Cell(uint64_t u) : v(u) {}
  Cell(double d) : v(d) {}
  Cell(const char* s) : v(std::string(s)) {}
  Cell(std::string s) : v(std::move(s)) {}
};

inline std::string format_sig(double x, int sig = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, x);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(int64_t i) const { return std::to_string(i); }
    std::string operator()(uint64_t u) const { return std::to_string(u); }
    std::string operator()(double d) const { return format_sig(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(V{}, c.v);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : out_(path), path_(path), columns_(header.size()) {
    if (!out_) throw std::runtime_error("cannot open for write: " + path);
    write_row_(header);
  }

  void row(std::initializer_list<Cell> cells) {
    if (cells.size() != columns_)
      throw std::logic_error("column count mismatch in " + path_);
    std::vector<std::string> texts;
    texts.reserve(cells.size());
    for (const Cell& c : cells) texts.push_back(cell_text(c));
    write_row_(texts);
  }

  void row(const std::vector<Cell>& cells) {
    if (cells.size() != columns_)
      throw std::logic_error("column count mismatch in " + path_);
    std::vector<std::string> texts;
    texts.reserve(cells.size());
    for (const Cell& c : cells) texts.push_back(cell_text(c));
    write_row_(texts);
  }

  const std::string& path() const { return path_; }

  void close() { out_.close(); }

 private:
  void write_row_(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
  std::string path_;
  size_t columns_;
};

}  // namespace primespan
