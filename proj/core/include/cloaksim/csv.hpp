#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cloaksim::csv {

/// Shortest decimal representation that parses back to the same double.
std::string num(double v);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

/// Minimal reader for the files this library writes (no quoting).
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  // -1 if absent
};

Table read(std::istream& in);

}  // namespace cloaksim::csv
