#include "dshrink/errors.hpp"
#include "dshrink/table.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

using namespace dshrink;

TEST_CASE("format_double round-trips") {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 1e22}) {
    CHECK(parse_double(format_double(v), "test") == v);
  }
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("parse_double rejects junk") {
  CHECK(parse_double(" 2.5 ", "x") == 2.5);
  CHECK_THROWS_AS(parse_double("2,5", "x"), DataError);
  CHECK_THROWS_AS(parse_double("", "x"), DataError);
  try {
    parse_double("abc", "row 4, column 'age'");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("row 4") != std::string::npos);
  }
}

TEST_CASE("split_record and delimiter detection") {
  CHECK(split_record("\"a\", b ,c", ',') == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_record("  a \t b   c ", ' ') == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_record("a\t\tc", '\t') == std::vector<std::string>{"a", "", "c"});
  CHECK(detect_delimiter("a\tb,c") == '\t');
  CHECK(detect_delimiter("a,b") == ',');
  CHECK(detect_delimiter("a b") == ' ');
}

TEST_CASE("table write and read") {
  Table t;
  t.header = {"x", "y"};
  t.rows = {{"1", "a"}, {"2", "b"}};
  std::stringstream ss;
  write_table(ss, t);
  CHECK(ss.str() == "x,y\n1,a\n2,b\n");
  const Table back = read_table(ss);
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("y") == 1);
  CHECK_THROWS_AS(back.column("z"), DataError);
}
