#include "jsq/step_path.hpp"

#include <algorithm>
#include <string>

#include "jsq/errors.hpp"

namespace jsq {

std::size_t StepPath::index_at(double t) const {
  if (times_.empty()) throw GridOutOfRange("empty path");
  const double slack = 1e-12 * std::max(1.0, horizon_);
  if (t < times_.front() || t > horizon_ + slack) {
    throw GridOutOfRange("time " + std::to_string(t) + " outside path span [0, " + std::to_string(horizon_) + "]");
  }
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  return static_cast<std::size_t>(it - times_.begin()) - 1;
}

}  // namespace jsq
