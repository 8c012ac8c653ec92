#pragma once

#include <optional>
#include <string>
#include <vector>

namespace graftrl::csv {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

std::string format_optional(const std::optional<double>& v);
std::string format_optional(const std::optional<std::size_t>& v);

double parse_double(const std::string& field);

// Plain split on the separator; fields here never contain quoting.
std::vector<std::string> split(const std::string& line, char sep = ',');

}  // namespace graftrl::csv
