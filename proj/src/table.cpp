#include "dshrink/table.hpp"

#include "dshrink/errors.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

namespace dshrink {

std::size_t Table::column(std::string_view name) const {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw DataError("missing column '" + std::string(name) + "'");
}

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0 into 0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto is_blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_blank(s.back())) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

}  // namespace

double parse_double(std::string_view cell, std::string_view where) {
  std::string_view s = trim(cell);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw DataError("non-numeric value '" + std::string(trim(cell)) + "' at " +
                    std::string(where));
  }
  return v;
}

std::vector<std::string> split_record(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (delimiter == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      out.push_back(unquote(line.substr(i, j - i)));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      out.push_back(unquote(line.substr(start)));
      break;
    }
    out.push_back(unquote(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

char detect_delimiter(std::string_view header_line) {
  if (header_line.find('\t') != std::string_view::npos) return '\t';
  if (header_line.find(',') != std::string_view::npos) return ',';
  return ' ';
}

void write_table(std::ostream& out, const Table& t, char delimiter) {
  const auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out << delimiter;
      out << cells[j];
    }
    out << '\n';
  };
  emit(t.header);
  for (const auto& r : t.rows) emit(r);
}

Table read_table(std::istream& in, char delimiter) {
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty table: header row required");
  t.header = split_record(line, delimiter);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_record(line, delimiter);
    if (cells.size() != t.header.size()) {
      throw DataError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  return t;
}

}  // namespace dshrink
