#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace advsurr::detail {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Reads a numeric CSV whose header starts with the given column names.
CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required);

// Shortest round-trip decimal form; "inf" and "-inf" for infinities.
std::string format_number(double value);

// Accepts "inf", "+inf", "-inf" besides plain decimals.
double parse_number(std::string_view text, std::string_view what);

}  // namespace advsurr::detail
