#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace semiconj {

/// Formats a double with 17 significant digits, '.' decimal separator and no
/// grouping, so a 64-bit float round-trips through the text exactly.
std::string format_double(double value);

void write_csv_header(std::ostream& out, std::span<const std::string> columns);
void write_csv_row(std::ostream& out, std::span<const double> values);

}  // namespace semiconj
