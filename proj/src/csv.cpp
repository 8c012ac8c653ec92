#include "graftrl/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace graftrl::csv {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::string format_optional(const std::optional<std::size_t>& v) {
    return v ? std::to_string(*v) : std::string();
}

double parse_double(const std::string& field) {
    double out = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), out);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw std::invalid_argument("csv: not a number: '" + field + "'");
    }
    return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == sep) {
            fields.emplace_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return fields;
}

}  // namespace graftrl::csv
