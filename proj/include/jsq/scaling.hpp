#pragma once

#include <cstdint>
#include <span>

#include "jsq/grid_path.hpp"
#include "jsq/sim_core.hpp"
#include "jsq/step_path.hpp"

namespace jsq {

/// Diffusion scaling sampled right-continuously on `grid`:
/// X_1 = (Q_1 - n) / sqrt(n), X_i = Q_i / sqrt(n) for i >= 2.
/// Throws GridOutOfRange if the grid leaves [0, horizon].
GridPath scale_diffusion(const StepPath& path, std::int32_t n, const GridSpec& grid);

/// Fluid scaling Psi_i = Q_i / n on `grid`.
GridPath scale_fluid(const StepPath& path, std::int32_t n, const GridSpec& grid);

/// Single diffusion-scaled vector of a count state.
std::vector<double> scale_state(std::span<const std::int32_t> q, std::int32_t n);

/// Inverse of the diffusion scaling, rounding to the nearest integer count.
CountState unscale_diffusion(std::span<const double> x, std::int32_t n);

}  // namespace jsq
