#include "jsq/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string_view>

#include "jsq/errors.hpp"

namespace jsq {

std::string format_decimal(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
  std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
  if (text.find('e') == std::string_view::npos) return std::string(text);

  // Exponent form: redo in fixed notation with 12 significant digits.
  const int exponent = static_cast<int>(std::floor(std::log10(std::abs(value))));
  const int decimals = std::clamp(11 - exponent, 0, 400);
  res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, decimals);
  std::string out(buf, static_cast<std::size_t>(res.ptr - buf));
  if (out.find('.') != std::string::npos) {
    while (!out.empty() && out.back() == '0') out.pop_back();
    if (!out.empty() && out.back() == '.') out.pop_back();
  }
  return out;
}

void write_grid_csv(std::ostream& out, const GridPath& path, const std::string& prefix) {
  out << 't';
  for (std::size_t c = 0; c < path.cols(); ++c) out << ',' << prefix << (c + 1);
  out << '\n';
  for (std::size_t j = 0; j < path.rows(); ++j) {
    out << format_decimal(path.time(j));
    for (const double v : path.row(j)) out << ',' << format_decimal(v);
    out << '\n';
  }
}

void write_limit_csv(std::ostream& out, const LimitSolution& solution) {
  const GridPath& x = solution.x;
  const GridPath& u = solution.u;
  if (x.rows() != u.rows()) throw MismatchedInputs("x and u have different grids");
  out << 't';
  for (std::size_t c = 0; c < x.cols(); ++c) out << ",x" << (c + 1);
  out << ",u1,u2\n";
  for (std::size_t j = 0; j < x.rows(); ++j) {
    out << format_decimal(x.time(j));
    for (const double v : x.row(j)) out << ',' << format_decimal(v);
    out << ',' << format_decimal(u.at(j, 0)) << ',' << format_decimal(u.at(j, 1)) << '\n';
  }
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

}  // namespace jsq
