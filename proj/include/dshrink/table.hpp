#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace dshrink {

/// Header plus string cells; the common currency of every exporter.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Position of `name` in the header; throws DataError if absent.
  std::size_t column(std::string_view name) const;
};

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Locale-independent parse of a full cell (surrounding blanks allowed).
/// Throws DataError mentioning `where` on failure.
double parse_double(std::string_view cell, std::string_view where);

/// Splits one record, trimming blanks and stripping one level of double quotes.
/// delimiter ' ' means "any run of spaces/tabs".
std::vector<std::string> split_record(std::string_view line, char delimiter);

/// Picks tab, comma or whitespace from a header line.
char detect_delimiter(std::string_view header_line);

void write_table(std::ostream& out, const Table& t, char delimiter = ',');
Table read_table(std::istream& in, char delimiter = ',');

}  // namespace dshrink
