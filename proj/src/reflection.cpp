#include "jsq/reflection.hpp"

#include <cmath>
#include <string>

#include "jsq/errors.hpp"

namespace jsq {

Barrier::Barrier(double value) : value_(value), infinite_(std::isinf(value) && value > 0) {
  if (std::isnan(value) || value < 0.0) throw PreconditionViolation("barrier must be nonnegative");
}

Reflection reflect_upper(std::span<const double> x, Barrier kappa) {
  Reflection r{std::vector<double>(x.begin(), x.end()), std::vector<double>(x.size(), 0.0)};
  if (x.empty() || kappa.is_infinite()) return r;
  const double level = kappa.value();
  if (x.front() > level) {
    throw PreconditionViolation("reflection needs x(t0) <= kappa; got x(t0)=" + std::to_string(x.front()) +
                                " > " + std::to_string(level));
  }
  double psi = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    psi = reflect_step(psi, x[j], level, r.phi[j]);
    r.psi[j] = psi;
  }
  return r;
}

std::pair<GridPath, GridPath> reflect_upper(const GridPath& x, Barrier kappa) {
  if (x.cols() != 1) throw MismatchedInputs("reflect_upper expects a single-coordinate path");
  const auto values = x.column(0);
  const Reflection r = reflect_upper(values, kappa);
  return {GridPath::from_column(x.grid(), r.phi), GridPath::from_column(x.grid(), r.psi)};
}

Reflection reflect_lower(std::span<const double> x, double level) {
  if (level > 0.0) throw PreconditionViolation("reflect_lower supports levels <= 0");
  std::vector<double> negated(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) negated[j] = -x[j];
  Reflection r = reflect_upper(negated, Barrier(-level));
  for (double& v : r.phi) v = -v;
  return r;
}

}  // namespace jsq
