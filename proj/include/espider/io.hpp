#ifndef ESPIDER_IO_HPP
#define ESPIDER_IO_HPP

#include <ostream>
#include <string>
#include <vector>

namespace espider::io {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Fixed significant-digit representation (transient grids use 12).
std::string format_double(double v, int significant);

/// Writes the standard header: a comment line embedding the tool version
/// and the resolved run configuration (JSON), then the column row.
void write_csv_header(std::ostream& os, const std::string& config_json,
                      const std::vector<std::string>& columns);

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

}  // namespace espider::io

#endif
