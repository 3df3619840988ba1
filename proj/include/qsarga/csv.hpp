#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal comma-separated reader/writer for the artifact's own files.
// Fields are unquoted; surrounding whitespace and CR are trimmed and blank
// lines skipped.
namespace qsarga::csv {

std::vector<std::vector<std::string>> parse(std::string_view text);

/// Accepts decimal reals plus nan/inf tokens. Throws DataError naming `what`.
double to_double(std::string_view field, std::string_view what);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

} // namespace qsarga::csv
