#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bdls {

// Shortest decimal text that round-trips to the same double.
std::string format_real(double v);

// Minimal CSV table used for every artifact the harness writes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }
  std::ptrdiff_t column(std::string_view name) const;

  void write(const std::filesystem::path& path) const;
  static CsvTable read(const std::filesystem::path& path);
};

std::vector<std::string> split(std::string_view text, char sep);
std::string trim(std::string_view text);

}  // namespace bdls
