#include "csv_util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "advsurr/errors.hpp"
#include "advsurr/extended_real.hpp"

namespace advsurr::detail {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path, const std::vector<std::string>& required) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = cells;
      if (table.header.size() < required.size())
        throw ParseError(path.string() + ":1: expected header starting with " + required.front());
      for (std::size_t i = 0; i < required.size(); ++i)
        if (table.header[i] != required[i])
          throw ParseError(path.string() + ":1: column " + std::to_string(i + 1) + " is '" + table.header[i] +
                           "', expected '" + required[i] + "'");
      continue;
    }
    if (cells.size() != table.header.size())
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      try {
        row.push_back(parse_number(cells[i], table.header[i]));
      } catch (const ParseError& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw ParseError(path.string() + ": empty file, header row is mandatory");
  return table;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  if (t == "nan") return std::nan("");
  double value = 0.0;
  const char* first = t.data();
  if (!t.empty() && t[0] == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ParseError("field '" + std::string(what) + "': cannot parse '" + t + "' as a number");
  return value;
}

}  // namespace advsurr::detail
