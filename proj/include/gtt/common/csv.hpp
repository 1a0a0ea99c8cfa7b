#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace gtt {

/// RFC 4180 quoting: fields with commas, quotes or newlines are quoted.
std::string csv_field(std::string_view s);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

/// Shortest decimal that round-trips.
std::string format_double(double x);

}  // namespace gtt
