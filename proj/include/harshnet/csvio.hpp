#pragma once

#include <string>
#include <vector>

namespace harshnet::csvio {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

double parse_double(const std::string& s);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Plain comma separation, newline \n, no quoting. Fields must not contain
// commas or newlines.
void write_table(const std::string& path, const Table& t);
Table read_table(const std::string& path);

}  // namespace harshnet::csvio
