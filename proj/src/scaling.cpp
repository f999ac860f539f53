#include "jsq/scaling.hpp"

#include <cmath>
#include <string>

#include "jsq/errors.hpp"

namespace jsq {

namespace {

template <typename Transform>
GridPath sample(const StepPath& path, const GridSpec& grid, Transform&& transform) {
  grid.validate();
  if (path.size() == 0) throw GridOutOfRange("empty path");
  const double slack = 1e-12 * std::max(1.0, path.horizon());
  if (grid.t0 < 0.0 || grid.end() > path.horizon() + slack) {
    throw GridOutOfRange("grid [" + std::to_string(grid.t0) + ", " + std::to_string(grid.end()) +
                         "] extends beyond path horizon " + std::to_string(path.horizon()));
  }
  GridPath out(grid, path.dimension());
  std::size_t idx = path.index_at(grid.t0);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double t = grid.time(j);
    while (idx + 1 < path.size() && path.time(idx + 1) <= t) ++idx;
    const auto q = path.state(idx);
    auto row = out.row(j);
    for (std::size_t i = 0; i < q.size(); ++i) row[i] = transform(i, q[i]);
  }
  return out;
}

}  // namespace

GridPath scale_diffusion(const StepPath& path, std::int32_t n, const GridSpec& grid) {
  const double nn = static_cast<double>(n);
  const double root = std::sqrt(nn);
  return sample(path, grid, [&](std::size_t i, std::int32_t q) {
    return i == 0 ? (static_cast<double>(q) - nn) / root : static_cast<double>(q) / root;
  });
}

GridPath scale_fluid(const StepPath& path, std::int32_t n, const GridSpec& grid) {
  const double nn = static_cast<double>(n);
  return sample(path, grid, [&](std::size_t, std::int32_t q) { return static_cast<double>(q) / nn; });
}

std::vector<double> scale_state(std::span<const std::int32_t> q, std::int32_t n) {
  const double nn = static_cast<double>(n);
  const double root = std::sqrt(nn);
  std::vector<double> x(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    x[i] = i == 0 ? (static_cast<double>(q[i]) - nn) / root : static_cast<double>(q[i]) / root;
  }
  return x;
}

CountState unscale_diffusion(std::span<const double> x, std::int32_t n) {
  const double root = std::sqrt(static_cast<double>(n));
  CountState s{std::vector<std::int32_t>(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::round(x[i] * root);
    s.q[i] = static_cast<std::int32_t>(i == 0 ? n + v : v);
  }
  return s;
}

}  // namespace jsq
