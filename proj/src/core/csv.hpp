#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace pedrisk::csv {

struct Row {
  std::vector<std::string> fields;
  std::size_t line_number = 0;
};

// Reads a comma-separated file. Lines starting with '#' are metadata stamps
// written by the pipeline and are skipped. No quoting: none of the formats
// written here ever embeds a comma in a field.
std::vector<Row> read_file(const std::string& path);

std::vector<Row> parse(const std::string& text);

void write_file(const std::string& path,
                const std::vector<std::string>& comment_lines,
                const std::vector<std::vector<std::string>>& rows);

// Field converters; `what` names the column in error messages.
int to_int(const std::string& s, const std::string& what, std::size_t line);
double to_double(const std::string& s, const std::string& what,
                 std::size_t line);
std::optional<int> to_opt_int(const std::string& s, const std::string& what,
                              std::size_t line);

std::string format_double(double v);

}  // namespace pedrisk::csv
