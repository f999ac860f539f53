#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include <boost/numeric/odeint.hpp>

namespace oracle {

/// Random walk with increments on the 2^-30 lattice and |values| < 2^10.
/// Sums and differences of such values are exact in double precision.
inline std::vector<double> dyadic_walk(std::mt19937_64& rng, std::size_t steps, double start = 0.0) {
  constexpr double kUnit = 1.0 / 1073741824.0;  // 2^-30
  std::uniform_int_distribution<std::int64_t> step(-(std::int64_t{1} << 26), std::int64_t{1} << 26);
  std::vector<double> x{start};
  for (std::size_t i = 1; i < steps; ++i) {
    double next = x.back() + static_cast<double>(step(rng)) * kUnit;
    next = std::clamp(next, -512.0, 512.0);
    x.push_back(next);
  }
  return x;
}

/// Dyadic barrier in [0, 4].
inline double dyadic_level(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> d(0, std::int64_t{4} << 20);
  return static_cast<double>(d(rng)) / 1048576.0;
}

/// Piecewise-linear path through random dyadic knots, sampled at 64 points
/// per segment. Knots lie on the 2^-30 lattice and samples on the 2^-36
/// lattice, all below 2^9 in magnitude, so sums and differences are exact.
inline std::vector<double> dyadic_piecewise_linear(std::mt19937_64& rng, std::size_t segments, double start) {
  constexpr double kUnit = 1.0 / 1073741824.0;
  std::uniform_int_distribution<std::int64_t> step(-(std::int64_t{3} << 29), std::int64_t{3} << 29);
  std::vector<double> x{start};
  double knot = start;
  for (std::size_t s = 0; s < segments; ++s) {
    const double next = std::clamp(knot + static_cast<double>(step(rng)) * kUnit, -256.0, 256.0);
    for (int m = 1; m <= 64; ++m) x.push_back(knot + (next - knot) * (m / 64.0));
    knot = next;
  }
  return x;
}

/// Brute-force regulator psi_j = max_{m <= j} (x_m - kappa)^+, O(n^2).
inline std::vector<double> brute_regulator(std::span<const double> x, double kappa) {
  std::vector<double> psi(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    double best = 0.0;
    for (std::size_t m = 0; m <= j; ++m) best = std::max(best, x[m] - kappa);
    psi[j] = best;
  }
  return psi;
}

/// Two-sample KS by evaluating both empirical CDFs at every sample point.
inline double brute_ks(std::span<const double> a, std::span<const double> b) {
  std::set<double> points(a.begin(), a.end());
  points.insert(b.begin(), b.end());
  double best = 0.0;
  for (const double p : points) {
    const auto fa = static_cast<double>(std::count_if(a.begin(), a.end(), [p](double v) { return v <= p; }));
    const auto fb = static_cast<double>(std::count_if(b.begin(), b.end(), [p](double v) { return v <= p; }));
    best = std::max(best, std::abs(fa / static_cast<double>(a.size()) - fb / static_cast<double>(b.size())));
  }
  return best;
}

/// Unreflected linear system x1' = -x1 + x2 + y1', x2' = -x2 + x3,
/// x_i' = -x_i + x_{i+1} (x_{k+1} = 0) with y1(t) = slope * t, integrated
/// by adaptive Dormand-Prince. Returns x at the requested times.
inline std::vector<std::vector<double>> linear_system(std::vector<double> x0, double slope,
                                                      std::span<const double> times) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  const std::size_t k = x0.size();
  auto rhs = [k, slope](const State& x, State& dx, double) {
    for (std::size_t i = 0; i < k; ++i) dx[i] = -x[i] + (i + 1 < k ? x[i + 1] : 0.0);
    dx[0] += slope;
  };
  std::vector<std::vector<double>> out;
  State x = x0;
  double t = 0.0;
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  for (const double target : times) {
    if (target > t) {
      odeint::integrate_adaptive(stepper, rhs, x, t, target, 1e-4);
      t = target;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace oracle
