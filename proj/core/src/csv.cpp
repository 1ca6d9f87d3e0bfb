#include "semiconj/csv.hpp"

#include <cstdio>

namespace semiconj {

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return std::string(buf);
}

void write_csv_header(std::ostream& out, std::span<const std::string> columns) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i > 0) out << ',';
        out << columns[i];
    }
    out << '\n';
}

void write_csv_row(std::ostream& out, std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out << ',';
        out << format_double(values[i]);
    }
    out << '\n';
}

}  // namespace semiconj
