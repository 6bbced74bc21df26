#include "dshrink/prostate_data.hpp"

#include "dshrink/errors.hpp"
#include "dshrink/table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace dshrink {

namespace {

bool is_index_header(const std::string& name) {
  return name.empty() || name == "id" || name == "row" || name == "index" || name == "X" ||
         name == "V1";
}

bool parse_flag(std::string_view cell, std::string_view where) {
  std::string v(cell);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "t" || v == "true" || v == "1") return true;
  if (v == "f" || v == "false" || v == "0") return false;
  throw DataError("invalid train flag '" + std::string(cell) + "' at " + std::string(where));
}

std::string where(std::size_t line, std::string_view column) {
  return "line " + std::to_string(line) + ", column '" + std::string(column) + "'";
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  bool has_index = false;
};

RawTable read_raw(std::istream& in, char delimiter) {
  RawTable raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw DataError("input is empty; a header row is required");
  }
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
    line.erase(0, 3);
  }
  const char delim = delimiter ? delimiter : detect_delimiter(line);
  raw.header = split_record(line, delim);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    raw.rows.push_back(split_record(line, delim));
    raw.line_numbers.push_back(line_no);
  }
  // Index column: either explicitly named/blank, or the header is one short.
  if (!raw.rows.empty() && raw.rows.front().size() == raw.header.size() + 1) {
    raw.header.insert(raw.header.begin(), "");
    raw.has_index = true;
  } else if (!raw.header.empty() && is_index_header(raw.header.front())) {
    raw.has_index = true;
  }
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    if (raw.rows[r].size() != raw.header.size()) {
      throw DataError("line " + std::to_string(raw.line_numbers[r]) + " has " +
                      std::to_string(raw.rows[r].size()) + " fields, expected " +
                      std::to_string(raw.header.size()));
    }
  }
  return raw;
}

void check_range(std::string_view column, double v, const std::string& at) {
  if (column == "svi" && v != 0.0 && v != 1.0) {
    throw DataError("svi must be 0 or 1, got " + format_double(v) + " at " + at);
  }
  if (column == "gleason" && v != 6.0 && v != 7.0 && v != 8.0 && v != 9.0) {
    throw DataError("gleason must be one of 6, 7, 8, 9, got " + format_double(v) + " at " + at);
  }
  if (column == "age" && !(v >= 20.0 && v <= 100.0)) {
    throw DataError("age must lie in [20, 100], got " + format_double(v) + " at " + at);
  }
}

}  // namespace

ProstateData load_prostate(std::istream& in, const ProstateFormat& format) {
  const RawTable raw = read_raw(in, format.delimiter);

  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::array<std::size_t, kProstatePredictors.size()> predictor_col;
  predictor_col.fill(kUnset);
  std::size_t response_col = kUnset;
  std::size_t train_col = kUnset;
  for (std::size_t j = raw.has_index ? 1 : 0; j < raw.header.size(); ++j) {
    const std::string& name = raw.header[j];
    const auto it = std::find(kProstatePredictors.begin(), kProstatePredictors.end(), name);
    if (it != kProstatePredictors.end()) {
      predictor_col[static_cast<std::size_t>(it - kProstatePredictors.begin())] = j;
    } else if (name == kProstateResponse) {
      response_col = j;
    } else if (name == "train") {
      train_col = j;
    } else {
      throw DataError("unknown column '" + name + "' in header");
    }
  }
  for (std::size_t k = 0; k < kProstatePredictors.size(); ++k) {
    if (predictor_col[k] == kUnset) {
      throw DataError("missing required column '" + std::string(kProstatePredictors[k]) + "'");
    }
  }
  if (response_col == kUnset) {
    throw DataError("missing required column '" + std::string(kProstateResponse) + "'");
  }

  const auto n = static_cast<Index>(raw.rows.size());
  if (format.expected_rows && n != *format.expected_rows) {
    throw DataError("expected " + std::to_string(*format.expected_rows) + " data rows, found " +
                    std::to_string(n));
  }
  if (n == 0) throw DataError("no data rows");

  Matrix x(n, static_cast<Index>(kProstatePredictors.size()));
  Vector y(n);
  std::vector<std::string> labels;
  std::vector<bool> flags;
  for (Index i = 0; i < n; ++i) {
    const auto& row = raw.rows[static_cast<std::size_t>(i)];
    const std::size_t line = raw.line_numbers[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < kProstatePredictors.size(); ++k) {
      const std::string at = where(line, kProstatePredictors[k]);
      const double v = parse_double(row[predictor_col[k]], at);
      if (!std::isfinite(v)) throw DataError("non-finite value at " + at);
      check_range(kProstatePredictors[k], v, at);
      x(i, static_cast<Index>(k)) = v;
    }
    const std::string at = where(line, kProstateResponse);
    y(i) = parse_double(row[response_col], at);
    if (!std::isfinite(y(i))) throw DataError("non-finite value at " + at);
    if (raw.has_index) labels.push_back(row.front());
    if (train_col != kUnset) flags.push_back(parse_flag(row[train_col], where(line, "train")));
  }

  std::vector<std::string> names(kProstatePredictors.begin(), kProstatePredictors.end());
  ProstateData data{Dataset(std::move(y), std::move(x), std::move(names), std::move(labels)),
                    std::nullopt};
  if (train_col != kUnset) data.train_flag = std::move(flags);
  return data;
}

ProstateData load_prostate_file(const std::string& path, const ProstateFormat& format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return load_prostate(in, format);
}

void export_prostate(std::ostream& out, const ProstateData& data) {
  const Dataset& d = data.dataset;
  const bool index = !d.row_labels().empty();
  Table t;
  if (index) t.header.push_back("");
  for (const auto& name : d.feature_names()) t.header.push_back(name);
  t.header.emplace_back(kProstateResponse);
  if (data.train_flag) t.header.emplace_back("train");
  for (Index i = 0; i < d.n(); ++i) {
    std::vector<std::string> row;
    if (index) row.push_back(d.row_labels()[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < d.p(); ++j) row.push_back(format_double(d.x()(i, j)));
    row.push_back(format_double(d.y()(i)));
    if (data.train_flag) row.emplace_back((*data.train_flag)[static_cast<std::size_t>(i)] ? "T" : "F");
    t.rows.push_back(std::move(row));
  }
  write_table(out, t, ',');
}

Dataset load_table_dataset(std::istream& in, std::string_view response, char delimiter) {
  std::string header_line;
  if (!std::getline(in, header_line)) throw DataError("input is empty; a header row is required");
  const char delim = delimiter ? delimiter : detect_delimiter(header_line);
  std::stringstream rest;
  rest << header_line << '\n' << in.rdbuf();
  const Table t = read_table(rest, delim);
  const std::size_t ycol = t.column(response);
  const auto n = static_cast<Index>(t.rows.size());
  const auto p = static_cast<Index>(t.header.size()) - 1;
  if (n == 0) throw DataError("no data rows");
  Matrix x(n, p);
  Vector y(n);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < t.header.size(); ++j) {
    if (j != ycol) names.push_back(t.header[j]);
  }
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
      const double v = parse_double(t.rows[static_cast<std::size_t>(i)][j],
                                    where(static_cast<std::size_t>(i) + 2, t.header[j]));
      if (j == ycol) {
        y(i) = v;
      } else {
        x(i, col++) = v;
      }
    }
  }
  return Dataset(std::move(y), std::move(x), std::move(names));
}

}  // namespace dshrink
