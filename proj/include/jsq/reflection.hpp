#pragma once

#include <limits>
#include <span>
#include <vector>

#include "jsq/grid_path.hpp"

namespace jsq {

/// Upper barrier kappa in [0, infinity].
class Barrier {
 public:
  /// Throws PreconditionViolation for negative or NaN values.
  explicit Barrier(double value);
  static Barrier infinite() noexcept { return Barrier(); }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  /// Barrier level; +infinity for the infinite barrier.
  [[nodiscard]] double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend bool operator==(const Barrier&, const Barrier&) = default;

 private:
  Barrier() noexcept : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

struct Reflection {
  std::vector<double> phi;  // reflected path, <= kappa
  std::vector<double> psi;  // regulator, nondecreasing from 0
};

/// One step of the one-sided upper reflection: given the regulator before
/// sample x, returns the regulator after it and writes the reflected value.
/// When the regulator moves the reflected value is exactly the barrier.
inline double reflect_step(double psi_before, double x, double kappa, double& phi) noexcept {
  const double excess = x - kappa;
  if (excess > psi_before) {
    phi = kappa;
    return excess;
  }
  phi = x - psi_before;
  return psi_before;
}

/// Upper reflection of grid samples x at kappa:
///   psi(t_j) = max_{m <= j} (x(t_m) - kappa)^+,  phi = x - psi.
/// For the infinite barrier phi = x and psi = 0.
/// Throws PreconditionViolation if x(t0) > kappa.
Reflection reflect_upper(std::span<const double> x, Barrier kappa);

/// (phi, psi) as single-column paths on x's grid. x must have one column.
std::pair<GridPath, GridPath> reflect_upper(const GridPath& x, Barrier kappa);

/// Lower reflection at `level`, realised as the upper reflection of -x at
/// -level: phi = x + psi >= level with psi nondecreasing. Requires
/// x(t0) >= level and level <= 0.
Reflection reflect_lower(std::span<const double> x, double level = 0.0);

}  // namespace jsq
