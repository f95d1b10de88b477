#include "bess/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "bess/errors.hpp"

namespace bess::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',' || c == ';') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::vector<CsvRow> parse_numeric_csv(const std::string& text, std::size_t columns,
                                      const std::string& origin) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  bool header_allowed = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    CsvRow row{line_no, {}};
    bool ok = fields.size() == columns;
    if (ok) {
      row.values.resize(columns);
      for (std::size_t i = 0; i < columns && ok; ++i) ok = parse_double(fields[i], row.values[i]);
    }
    if (!ok) {
      if (header_allowed && fields.size() == columns) {
        header_allowed = false;
        continue;
      }
      throw InputError(fmt::format("{}:{}: malformed row '{}' (expected {} numeric fields)", origin,
                                   line_no, t, columns),
                       origin, line_no);
    }
    header_allowed = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> read_numeric_csv(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()), path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_numeric_csv(buffer.str(), columns, path.string());
}

std::string fmt_num(double value) {
  if (value == 0.0) return "0";
  return fmt::format("{:.10g}", value);
}

}  // namespace bess::io
