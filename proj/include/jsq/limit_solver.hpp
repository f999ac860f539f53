#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jsq/grid_path.hpp"
#include "jsq/reflection.hpp"

namespace jsq {

/// Brownian driver specification: W on `grid`, drift coefficient beta.
struct NoiseSpec {
  double beta = 1.0;
  std::uint64_t seed = 0;
  GridSpec grid{};
  /// Replication index; with `seed` it selects the Gaussian stream.
  std::uint64_t replication = 0;
};

/// Arguments of the reflected integral system
///   x_1 = b_1 + y_1 + int(-x_1 + x_2) - u_1,                 x_1 <= 0
///   x_2 = b_2 + y_2 + int(-x_2 + x_3) + u_1 - u_2,           0 <= x_2 <= B
///   x_i = b_i + y_i + int(-x_i + x_{i+1}),  3 <= i <= k,     x_{k+1} = 0
/// where u_1 grows only when x_1 = 0 and u_2 only when x_2 = B.
struct DrivingInput {
  Barrier barrier = Barrier::infinite();
  std::vector<double> b;
  GridPath y;  // k columns

  /// Throws PreconditionViolation unless b_1 <= 0, 0 <= b_2 <= B, b_i >= 0
  /// and y has one column per coordinate.
  void validate() const;
};

struct LimitSolution {
  GridPath x;  // k columns
  GridPath u;  // 2 columns: u_1, u_2
};

enum class Quadrature {
  kLeftEndpoint,  // exact for right-continuous step data, first order for smooth data
  kTrapezoid,     // second order for smooth data
};

/// First guess of each Picard window.
enum class InitialIterate {
  kHold,    // last converged value held constant across the window
  kZero,
  kDriver,  // b + y on the window
};

enum class TailMethod {
  kAuto,    // closed form when y_i == 0 for all i >= 3, Picard otherwise
  kPicard,  // always integrate the tail numerically
};

struct SolverOptions {
  /// Window length; the T map is a contraction for windows shorter than 1/5.
  double window = 0.15;
  /// Sup-norm stopping tolerance, relative to max(1, |b|, sup|y|).
  double tol = 1e-10;
  int max_iters = 200;
  Quadrature quadrature = Quadrature::kLeftEndpoint;
  InitialIterate initial = InitialIterate::kHold;
  TailMethod tail = TailMethod::kAuto;
};

/// Standard Brownian motion on spec.grid: W(t0) = 0 and independent
/// N(0, dt) increments.
GridPath sample_brownian(const NoiseSpec& spec);

/// Drivers of the limit system: y_1 = sqrt(2) W(t) - beta (t - t0), y_i = 0
/// for i >= 2. Requires k >= 3.
GridPath make_limit_drivers(const NoiseSpec& spec, int k);

/// Windowed Picard solution of the reflected system on y's grid.
///
/// Coordinates k, k-1, ..., 3 are solved first; x_3 then enters the
/// reflected (x_1, x_2) block through y_2 + int x_3. The block is solved in
/// the unreflected variables (w_1, w_2), with x_1 = phi_0(w_1),
/// u_1 = psi_0(w_1), x_2 = phi_B(w_2), u_2 = psi_B(w_2).
/// Throws NonConvergence if a window needs more than max_iters iterations.
LimitSolution solve_limit_system(const DrivingInput& input, const SolverOptions& options = {});

/// Closed-form tail of the limit system with zero drivers:
///   X_i(t) = e^{-t} sum_{j=0}^{k-i} t^j / j! X_{i+j}(0),  3 <= i <= k,
/// with t measured from grid.t0. `b_tail` holds X_3(0), ..., X_k(0).
GridPath explicit_tail_solution(std::span<const double> b_tail, const GridSpec& grid);

/// One sample path of the limit diffusion (B = infinity, so u_2 = 0).
LimitSolution simulate_limit_diffusion(std::span<const double> x0, const NoiseSpec& spec, int k,
                                       const SolverOptions& options = {});

/// Sup-norm residual of the discretized integral equations at (x, u).
double fixed_point_residual(const DrivingInput& input, const LimitSolution& solution,
                            Quadrature quadrature = Quadrature::kLeftEndpoint);

}  // namespace jsq
