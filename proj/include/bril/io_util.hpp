#pragma once

#include <string>
#include <vector>

namespace bril {

// Shortest decimal string that round-trips the exact double value.
// Used for every CSV/SVG artifact so emitted files are byte-stable.
std::string format_double(double x);

std::string read_text_file(const std::string& path);

// Writes to a temp file in the target directory and renames it into
// place, so a failed run never leaves a partial artifact behind.
void write_file_atomic(const std::string& path, const std::string& content);

// CSV artifacts start with a "# format_version=N" comment line
// followed by the header row.
std::string csv_preamble(int version, const std::vector<std::string>& columns);

std::string join_csv_row(const std::vector<std::string>& cells);

}  // namespace bril
