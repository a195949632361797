#ifndef NAGNTK_CSV_H_
#define NAGNTK_CSV_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nagntk::csv {

// Shortest decimal text that parses back to exactly `v`.
std::string format(double v);
std::optional<double> parse_double(std::string_view s);

std::vector<std::string> split_line(std::string_view line);

struct Table {
  std::vector<std::string> header;  // empty when the file had none
  std::vector<std::vector<std::string>> rows;
  // 1-based line number in the file of each entry of rows.
  std::vector<std::size_t> line_numbers;
};

// Reads a comma-separated file. The first row is treated as a header when
// any of its fields is not numeric.
Table read(const std::filesystem::path& path);

// Writes header + rows to `path` through a temporary file and a rename, so
// readers never observe a partially written file.
void write_atomic(const std::filesystem::path& path,
                  const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows);

void write_text_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace nagntk::csv

#endif  // NAGNTK_CSV_H_
