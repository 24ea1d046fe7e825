#pragma once

#include <string>
#include <vector>

namespace wair {

// Minimal numeric CSV: one header row of column names, then rows of doubles
// printed with 17 significant digits so re-reading reproduces the exact
// binary values.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace wair
