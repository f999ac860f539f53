#include "jsq/limit_solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "jsq/errors.hpp"
#include "jsq/rng.hpp"

namespace jsq {

namespace {

double increment(Quadrature q, double dt, double f_prev, double f_cur) noexcept {
  return q == Quadrature::kLeftEndpoint ? dt * f_prev : 0.5 * dt * (f_prev + f_cur);
}

std::vector<double> cumulative(std::span<const double> f, double dt, Quadrature q) {
  std::vector<double> out(f.size(), 0.0);
  for (std::size_t j = 1; j < f.size(); ++j) out[j] = out[j - 1] + increment(q, dt, f[j - 1], f[j]);
  return out;
}

/// Grid steps per Picard window (at least one).
std::size_t window_steps(double window, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(window / dt + 1e-9)));
}

[[noreturn]] void throw_nonconvergence(const char* block, double t, int iters, double diff) {
  throw NonConvergence(std::string(block) + " Picard window starting at t=" + std::to_string(t) +
                       " did not converge in " + std::to_string(iters) +
                       " iterations (last sup change " + std::to_string(diff) + ")");
}

/// x = b + yhat - int x, by windowed Picard iteration.
std::vector<double> solve_decay(double b, std::span<const double> yhat, const GridSpec& grid,
                                const SolverOptions& opt, double tol) {
  const std::size_t count = yhat.size();
  const double dt = grid.dt;
  std::vector<double> x(count), integral(count, 0.0);
  x[0] = b + yhat[0];
  const std::size_t steps = window_steps(opt.window, dt);
  std::vector<double> guess, next;

  for (std::size_t a = 0; a + 1 < count; a += steps) {
    const std::size_t lo = a + 1;
    const std::size_t hi = std::min(a + steps, count - 1);
    const std::size_t len = hi - lo + 1;
    guess.assign(len, 0.0);
    next.assign(len, 0.0);
    for (std::size_t m = 0; m < len; ++m) {
      switch (opt.initial) {
        case InitialIterate::kHold: guess[m] = x[a]; break;
        case InitialIterate::kZero: guess[m] = 0.0; break;
        case InitialIterate::kDriver: guess[m] = b + yhat[lo + m]; break;
      }
    }
    bool converged = false;
    double diff = 0.0;
    for (int iter = 0; iter < opt.max_iters; ++iter) {
      double acc = integral[a];
      double prev = x[a];
      diff = 0.0;
      for (std::size_t m = 0; m < len; ++m) {
        acc += increment(opt.quadrature, dt, prev, guess[m]);
        next[m] = b + yhat[lo + m] - acc;
        diff = std::max(diff, std::abs(next[m] - guess[m]));
        prev = guess[m];
      }
      if (diff < tol) {
        // Keep the iterate the integrals were evaluated at.
        acc = integral[a];
        prev = x[a];
        for (std::size_t m = 0; m < len; ++m) {
          acc += increment(opt.quadrature, dt, prev, guess[m]);
          x[lo + m] = guess[m];
          integral[lo + m] = acc;
          prev = guess[m];
        }
        converged = true;
        break;
      }
      guess.swap(next);
    }
    if (!converged) throw_nonconvergence("tail", grid.time(a), opt.max_iters, diff);
  }
  return x;
}

struct BlockState {
  double w1, w2;      // unreflected iterate (w2 before adding u_1)
  double x1, u1;      // phi_0 / psi_0 of w1
  double x2, u2;      // phi_B / psi_B of w2 + u1
  double f1, f2;      // integrands
  double int1, int2;  // running integrals
};

/// Evaluates the reflected quantities and integrals along a candidate
/// iterate, continuing from the converged state `start`.
void evaluate_block(const BlockState& start, std::span<const double> g1, std::span<const double> g2,
                    double barrier, bool finite_barrier, double dt, Quadrature q,
                    std::span<BlockState> out) {
  double u1 = start.u1;
  double u2 = start.u2;
  double int1 = start.int1;
  double int2 = start.int2;
  double f1_prev = start.f1;
  double f2_prev = start.f2;
  for (std::size_t m = 0; m < g1.size(); ++m) {
    BlockState& s = out[m];
    s.w1 = g1[m];
    s.w2 = g2[m];
    u1 = reflect_step(u1, g1[m], 0.0, s.x1);
    const double z = g2[m] + u1;
    if (finite_barrier) {
      u2 = reflect_step(u2, z, barrier, s.x2);
    } else {
      s.x2 = z;
    }
    s.u1 = u1;
    s.u2 = u2;
    s.f1 = -s.x1 + s.x2;
    s.f2 = -s.x2;
    int1 += increment(q, dt, f1_prev, s.f1);
    int2 += increment(q, dt, f2_prev, s.f2);
    s.int1 = int1;
    s.int2 = int2;
    f1_prev = s.f1;
    f2_prev = s.f2;
  }
}

void solve_block(double b1, double b2, std::span<const double> y1, std::span<const double> yhat2,
                 const Barrier& barrier, const GridSpec& grid, const SolverOptions& opt, double tol,
                 std::span<BlockState> states) {
  const std::size_t count = y1.size();
  const bool finite_barrier = !barrier.is_infinite();
  const double level = barrier.value();
  const double dt = grid.dt;

  {
    BlockState s{};
    s.w1 = b1 + y1[0];
    s.w2 = b2 + yhat2[0];
    s.u1 = reflect_step(0.0, s.w1, 0.0, s.x1);
    const double z = s.w2 + s.u1;
    if (finite_barrier) {
      s.u2 = reflect_step(0.0, z, level, s.x2);
    } else {
      s.x2 = z;
      s.u2 = 0.0;
    }
    s.f1 = -s.x1 + s.x2;
    s.f2 = -s.x2;
    s.int1 = s.int2 = 0.0;
    states[0] = s;
  }

  const std::size_t steps = window_steps(opt.window, dt);
  std::vector<double> g1, g2, n1, n2;
  std::vector<BlockState> scratch;

  for (std::size_t a = 0; a + 1 < count; a += steps) {
    const std::size_t lo = a + 1;
    const std::size_t hi = std::min(a + steps, count - 1);
    const std::size_t len = hi - lo + 1;
    g1.assign(len, 0.0);
    g2.assign(len, 0.0);
    n1.assign(len, 0.0);
    n2.assign(len, 0.0);
    scratch.assign(len, BlockState{});
    const BlockState& start = states[a];
    for (std::size_t m = 0; m < len; ++m) {
      switch (opt.initial) {
        case InitialIterate::kHold:
          g1[m] = start.w1;
          g2[m] = start.w2;
          break;
        case InitialIterate::kZero: break;
        case InitialIterate::kDriver:
          g1[m] = b1 + y1[lo + m];
          g2[m] = b2 + yhat2[lo + m];
          break;
      }
    }

    bool converged = false;
    double diff = 0.0;
    for (int iter = 0; iter < opt.max_iters; ++iter) {
      evaluate_block(start, g1, g2, level, finite_barrier, dt, opt.quadrature, scratch);
      diff = 0.0;
      for (std::size_t m = 0; m < len; ++m) {
        n1[m] = b1 + y1[lo + m] + scratch[m].int1;
        n2[m] = b2 + yhat2[lo + m] + scratch[m].int2;
        diff = std::max({diff, std::abs(n1[m] - g1[m]), std::abs(n2[m] - g2[m])});
      }
      if (diff < tol) {
        std::copy(scratch.begin(), scratch.end(), states.begin() + static_cast<std::ptrdiff_t>(lo));
        converged = true;
        break;
      }
      g1.swap(n1);
      g2.swap(n2);
    }
    if (!converged) throw_nonconvergence("reflected block", grid.time(a), opt.max_iters, diff);
  }
}

bool all_zero(const GridPath& y, std::size_t first_col) {
  for (std::size_t j = 0; j < y.rows(); ++j) {
    for (std::size_t c = first_col; c < y.cols(); ++c) {
      if (y.at(j, c) != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

void DrivingInput::validate() const {
  const std::size_t k = b.size();
  if (k < 2) throw PreconditionViolation("limit system needs at least 2 coordinates");
  if (y.cols() != k) {
    throw PreconditionViolation("driver has " + std::to_string(y.cols()) + " columns but b has " +
                                std::to_string(k) + " entries");
  }
  if (!(b[0] <= 0.0)) throw PreconditionViolation("b_1 must be <= 0");
  if (!(b[1] >= 0.0 && b[1] <= barrier.value())) throw PreconditionViolation("b_2 must lie in [0, B]");
  for (std::size_t i = 2; i < k; ++i) {
    if (!(b[i] >= 0.0)) throw PreconditionViolation("b_" + std::to_string(i + 1) + " must be >= 0");
  }
}

GridPath sample_brownian(const NoiseSpec& spec) {
  spec.grid.validate();
  GridPath w(spec.grid, 1);
  Engine rng = make_stream(spec.seed, spec.replication, StreamTag::kBrownian);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(spec.grid.dt);
  double value = 0.0;
  w.at(0, 0) = 0.0;
  for (std::size_t j = 1; j < spec.grid.count; ++j) {
    value += sd * normal(rng);
    w.at(j, 0) = value;
  }
  return w;
}

GridPath make_limit_drivers(const NoiseSpec& spec, int k) {
  if (k < 3) throw PreconditionViolation("limit drivers need k >= 3");
  const GridPath w = sample_brownian(spec);
  GridPath y(spec.grid, static_cast<std::size_t>(k));
  const double root2 = std::sqrt(2.0);
  for (std::size_t j = 0; j < y.rows(); ++j) {
    y.at(j, 0) = root2 * w.at(j, 0) - spec.beta * (spec.grid.time(j) - spec.grid.t0);
  }
  return y;
}

GridPath explicit_tail_solution(std::span<const double> b_tail, const GridSpec& grid) {
  grid.validate();
  const std::size_t m = b_tail.size();
  for (const double v : b_tail) {
    if (!(v >= 0.0)) throw PreconditionViolation("tail initial values must be >= 0");
  }
  GridPath out(grid, m);
  std::vector<double> powers(m);
  for (std::size_t j = 0; j < grid.count; ++j) {
    const double t = grid.time(j) - grid.t0;
    // powers[p] = t^p / p!
    double term = 1.0;
    for (std::size_t p = 0; p < m; ++p) {
      powers[p] = term;
      term *= t / static_cast<double>(p + 1);
    }
    const double decay = std::exp(-t);
    for (std::size_t i = 0; i < m; ++i) {
      double sum = 0.0;
      for (std::size_t p = 0; i + p < m; ++p) sum += powers[p] * b_tail[i + p];
      out.at(j, i) = decay * sum;
    }
  }
  return out;
}

LimitSolution solve_limit_system(const DrivingInput& input, const SolverOptions& options) {
  input.validate();
  if (!(options.window > 0.0) || !(options.tol > 0.0) || options.max_iters < 1) {
    throw PreconditionViolation("solver options need window > 0, tol > 0 and max_iters >= 1");
  }
  const GridSpec& grid = input.y.grid();
  const std::size_t k = input.b.size();
  const std::size_t count = grid.count;

  double scale = 1.0;
  for (const double v : input.b) scale = std::max(scale, std::abs(v));
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t c = 0; c < k; ++c) scale = std::max(scale, std::abs(input.y.at(j, c)));
  }
  const double tol = options.tol * scale;

  LimitSolution sol{GridPath(grid, k), GridPath(grid, 2)};

  // Tail: x_k, x_{k-1}, ..., x_3.
  if (k >= 3) {
    if (options.tail == TailMethod::kAuto && all_zero(input.y, 2)) {
      const GridPath tail = explicit_tail_solution(std::span(input.b).subspan(2), grid);
      for (std::size_t c = 0; c + 2 < k; ++c) sol.x.set_column(c + 2, tail.column(c));
    } else {
      std::vector<double> above(count, 0.0);  // x_{i+1}
      for (std::size_t c = k; c-- > 2;) {
        const auto pushed = cumulative(above, grid.dt, options.quadrature);
        std::vector<double> yhat(count);
        for (std::size_t j = 0; j < count; ++j) yhat[j] = input.y.at(j, c) + pushed[j];
        above = solve_decay(input.b[c], yhat, grid, options, tol);
        sol.x.set_column(c, above);
      }
    }
  }

  // Reflected block, with int x_3 absorbed into the second driver.
  const auto y1 = input.y.column(0);
  auto yhat2 = input.y.column(1);
  if (k >= 3) {
    const auto pushed = cumulative(sol.x.column(2), grid.dt, options.quadrature);
    for (std::size_t j = 0; j < count; ++j) yhat2[j] += pushed[j];
  }
  std::vector<BlockState> states(count);
  solve_block(input.b[0], input.b[1], y1, yhat2, input.barrier, grid, options, tol, states);
  for (std::size_t j = 0; j < count; ++j) {
    sol.x.at(j, 0) = states[j].x1;
    sol.x.at(j, 1) = states[j].x2;
    sol.u.at(j, 0) = states[j].u1;
    sol.u.at(j, 1) = states[j].u2;
  }
  return sol;
}

LimitSolution simulate_limit_diffusion(std::span<const double> x0, const NoiseSpec& spec, int k,
                                       const SolverOptions& options) {
  if (x0.size() != static_cast<std::size_t>(k)) {
    throw PreconditionViolation("initial state has " + std::to_string(x0.size()) + " coordinates, expected k=" +
                                std::to_string(k));
  }
  DrivingInput input{Barrier::infinite(), std::vector<double>(x0.begin(), x0.end()), make_limit_drivers(spec, k)};
  return solve_limit_system(input, options);
}

double fixed_point_residual(const DrivingInput& input, const LimitSolution& solution, Quadrature quadrature) {
  const std::size_t k = input.b.size();
  const std::size_t count = input.y.rows();
  const double dt = input.y.grid().dt;
  if (solution.x.cols() != k || solution.x.rows() != count || solution.u.rows() != count) {
    throw MismatchedInputs("solution shape does not match driving input");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<double> f(count);
    for (std::size_t j = 0; j < count; ++j) {
      const double above = i + 1 < k ? solution.x.at(j, i + 1) : 0.0;
      f[j] = -solution.x.at(j, i) + above;
    }
    const auto integral = cumulative(f, dt, quadrature);
    for (std::size_t j = 0; j < count; ++j) {
      double rhs = input.b[i] + input.y.at(j, i) + integral[j];
      if (i == 0) rhs -= solution.u.at(j, 0);
      if (i == 1) rhs += solution.u.at(j, 0) - solution.u.at(j, 1);
      worst = std::max(worst, std::abs(solution.x.at(j, i) - rhs));
    }
  }
  return worst;
}

}  // namespace jsq
