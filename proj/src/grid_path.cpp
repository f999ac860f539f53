#include "jsq/grid_path.hpp"

#include <algorithm>
#include <cmath>

#include "jsq/errors.hpp"

namespace jsq {

void GridSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionViolation("grid step dt must be positive");
  if (count < 1) throw PreconditionViolation("grid needs at least one point");
  if (!std::isfinite(t0)) throw PreconditionViolation("grid origin must be finite");
}

GridSpec GridSpec::covering(double t0, double span, double dt) {
  const auto steps = static_cast<std::size_t>(std::llround(span / dt));
  GridSpec g{t0, dt, steps + 1};
  g.validate();
  return g;
}

GridPath::GridPath(GridSpec grid, std::size_t columns)
    : grid_(grid), cols_(columns), values_(grid.count * columns, 0.0) {
  grid_.validate();
}

std::vector<double> GridPath::column(std::size_t col) const {
  std::vector<double> out(rows());
  for (std::size_t j = 0; j < rows(); ++j) out[j] = at(j, col);
  return out;
}

void GridPath::set_column(std::size_t col, std::span<const double> values) {
  if (values.size() != rows()) throw MismatchedInputs("column length does not match grid");
  for (std::size_t j = 0; j < rows(); ++j) at(j, col) = values[j];
}

GridPath GridPath::from_column(GridSpec grid, std::span<const double> values) {
  GridPath p(grid, 1);
  p.set_column(0, values);
  return p;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw MismatchedInputs("sup_distance: length mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double sup_distance(const GridPath& a, const GridPath& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw MismatchedInputs("sup_distance: shape mismatch");
  double d = 0.0;
  for (std::size_t j = 0; j < a.rows(); ++j) d = std::max(d, sup_distance(a.row(j), b.row(j)));
  return d;
}

}  // namespace jsq
