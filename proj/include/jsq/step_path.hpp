#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace jsq {

/// Right-continuous piecewise-constant path of integer count vectors.
///
/// Entry j holds on [times[j], times[j+1]) and the last entry holds up to
/// the horizon. Times start at 0 and are strictly increasing. Only state
/// changes are stored, so memory is proportional to the number of events.
class StepPath {
 public:
  StepPath() = default;
  StepPath(std::size_t dimension, double horizon) : dim_(dimension), horizon_(horizon) {}

  void push(double time, std::span<const std::int32_t> state) {
    times_.push_back(time);
    data_.insert(data_.end(), state.begin(), state.end());
  }

  void reserve(std::size_t events) {
    times_.reserve(events);
    data_.reserve(events * dim_);
  }

  [[nodiscard]] std::size_t dimension() const noexcept { return dim_; }
  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] double time(std::size_t j) const { return times_[j]; }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }

  [[nodiscard]] std::span<const std::int32_t> state(std::size_t j) const {
    return {data_.data() + j * dim_, dim_};
  }

  /// Index of the entry in force at time t (the last entry with time <= t).
  [[nodiscard]] std::size_t index_at(double t) const;

  /// Coordinate i of the state in force at t.
  [[nodiscard]] std::int32_t value_at(double t, std::size_t i) const {
    return state(index_at(t))[i];
  }

  friend bool operator==(const StepPath&, const StepPath&) = default;

 private:
  std::size_t dim_ = 0;
  double horizon_ = 0.0;
  std::vector<double> times_;
  std::vector<std::int32_t> data_;
};

}  // namespace jsq
