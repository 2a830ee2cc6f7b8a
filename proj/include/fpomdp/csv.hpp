#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fpomdp {

/// Shortest decimal form that round-trips to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string format_double(double value);

/// Writes one comma-separated row followed by '\n'.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace fpomdp
