#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rcmap {

// Shortest decimal string that round-trips the exact double. All numeric
// file output goes through this so reruns are byte-comparable.
std::string fmt_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// One CSV line from preformatted fields; no quoting, fields must not contain
// commas or newlines.
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace rcmap
