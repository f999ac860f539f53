#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jsq {

/// Uniform time grid t0, t0 + dt, ..., t0 + (count-1) dt.
struct GridSpec {
  double t0 = 0.0;
  double dt = 1e-3;
  std::size_t count = 2;

  [[nodiscard]] double time(std::size_t j) const noexcept { return t0 + static_cast<double>(j) * dt; }
  [[nodiscard]] double end() const noexcept { return time(count - 1); }

  /// Throws PreconditionViolation unless dt > 0 and count >= 1.
  void validate() const;

  /// Grid covering [t0, t0 + span] with step dt (span rounded to whole steps).
  static GridSpec covering(double t0, double span, double dt);

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Vector-valued path sampled on a uniform grid, stored row-major.
class GridPath {
 public:
  GridPath() = default;
  GridPath(GridSpec grid, std::size_t columns);

  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] std::size_t rows() const noexcept { return grid_.count; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] double time(std::size_t j) const noexcept { return grid_.time(j); }

  [[nodiscard]] double& at(std::size_t row, std::size_t col) { return values_[row * cols_ + col]; }
  [[nodiscard]] double at(std::size_t row, std::size_t col) const { return values_[row * cols_ + col]; }

  [[nodiscard]] std::span<double> row(std::size_t j) { return {values_.data() + j * cols_, cols_}; }
  [[nodiscard]] std::span<const double> row(std::size_t j) const { return {values_.data() + j * cols_, cols_}; }

  [[nodiscard]] std::vector<double> column(std::size_t col) const;
  void set_column(std::size_t col, std::span<const double> values);

  /// Single-column path holding `values` on `grid`.
  static GridPath from_column(GridSpec grid, std::span<const double> values);

  friend bool operator==(const GridPath&, const GridPath&) = default;

 private:
  GridSpec grid_{};
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// max over rows and columns of |a - b|; shapes must agree.
double sup_distance(const GridPath& a, const GridPath& b);
double sup_distance(std::span<const double> a, std::span<const double> b);

}  // namespace jsq
