#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bess::io {

struct CsvRow {
  std::size_t line;  // 1-based line number in the source file
  std::vector<double> values;
};

/// Reads a numeric CSV with exactly `columns` fields per row. Blank lines and
/// lines starting with '#' are skipped. A first data line that does not parse
/// as numbers is taken as the header. Throws InputError with the line number
/// on any malformed row.
std::vector<CsvRow> read_numeric_csv(const std::filesystem::path& path, std::size_t columns);

/// Same, parsing from an in-memory string (`origin` is used in messages).
std::vector<CsvRow> parse_numeric_csv(const std::string& text, std::size_t columns,
                                      const std::string& origin);

std::vector<std::string> split_fields(const std::string& line);

/// Fixed-format number for emitted files: %.10g, with "-0" normalised to "0".
std::string fmt_num(double value);

}  // namespace bess::io
