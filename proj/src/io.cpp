#include "espider/io.hpp"

#include <charconv>
#include <cstdio>

namespace espider::io {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_double(double v, int significant) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*g", significant, v);
  return std::string(buf);
}

void write_csv_header(std::ostream& os, const std::string& config_json,
                      const std::vector<std::string>& columns) {
  os << "# espider " << kVersion << " config=" << config_json << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    os << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    os << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

}  // namespace espider::io
