#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jsq/grid_path.hpp"
#include "jsq/replicate.hpp"
#include "jsq/sim_core.hpp"
#include "jsq/step_path.hpp"

namespace jsq {

// ---------------------------------------------------------------------------
// Reducers

/// Count, mean and central moments up to order 4. merge() is associative
/// (up to rounding), so partial results from workers can be combined in any
/// grouping.
class Moments {
 public:
  void add(double x);
  void merge(const Moments& other);

  [[nodiscard]] std::size_t count() const noexcept { return n_; }
  [[nodiscard]] double mean() const noexcept { return mean_; }
  /// Unbiased sample variance (0 for fewer than two samples).
  [[nodiscard]] double variance() const noexcept;
  /// Standard error of the mean.
  [[nodiscard]] double mean_se() const noexcept;
  /// Large-sample standard error of the sample variance,
  /// sqrt((m4 - m2^2) / N) with central moments m2, m4.
  [[nodiscard]] double variance_se() const noexcept;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Empirical q-quantile (linear interpolation between order statistics).
double quantile(std::vector<double> samples, double q);

/// Ordinary least-squares fit y = intercept + slope x.
struct LinearTrend {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
LinearTrend linear_trend(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

/// Two-sample KS statistic sup_x |F_a(x) - F_b(x)|. Throws EmptySample.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// One-sample KS statistic against a continuous CDF. Throws EmptySample.
double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Asymptotic p-value P(D > d) of the KS statistic with effective sample
/// size n_eff (n for one sample, n m / (n + m) for two samples).
double ks_pvalue(double d, double n_eff);

// ---------------------------------------------------------------------------
// Path functionals

/// Z = int_s^t sum_{i>=2} Q_i(r) dr, summed exactly over constant segments.
/// Throws GridOutOfRange if [s, t] is not inside [0, horizon].
double aggregate_waiting_time(const StepPath& path, double s, double t);
inline double aggregate_waiting_time(const StepPath& path, double t) { return aggregate_waiting_time(path, 0.0, t); }

/// First time Q_2 = n on the path, if any.
std::optional<double> first_hit_time(const StepPath& path, std::int32_t n);

/// Scaled martingales of the truncated system on a grid.
///
/// Column 0 is M_0 = A(lambda n t)/sqrt(n) - lambda sqrt(n) t; column i >= 1
/// is M_i = (D_i - C_i) / sqrt(n) with C_i = int (Q_i - Q_{i+1}) and
/// Q_{k+1} = 0. `qv` holds the predictable quadratic variations lambda t and
/// C_i / n. `counts` holds A/sqrt(n), D_i/sqrt(n) and `compensators` holds
/// lambda sqrt(n) t, C_i/sqrt(n), so counts = martingales + compensators.
struct MartingalePath {
  GridPath martingales;
  GridPath qv;
  GridPath counts;
  GridPath compensators;
};

/// Throws MismatchedInputs if the counters or parameters do not belong to
/// the path, GridOutOfRange if the grid leaves [0, horizon].
MartingalePath extract_martingales(const StepPath& path, const TruncationCounters& counters,
                                   const ModelParams& params, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Replication summaries

struct RunStats {
  std::optional<double> hit_time;  // first time Q_2 = n
  double agg_wait = 0.0;           // Z_t over [0, horizon]
  double scaled_agg_wait = 0.0;    // Z_t / sqrt(n)
  std::vector<double> delayed_waits;
  double delayed_fraction = 0.0;
  std::vector<double> terminal_scaled_state;
};

/// Summary of one run; the wait fields are filled only when `waits` is given.
RunStats summarize_run(const StepPath& path, std::int32_t n, const WaitRecords* waits = nullptr);

/// Hitting probability sweep: P(sup_{s <= t} Q^_2(s) >= n) per n.
struct HittingSweep {
  std::vector<std::int32_t> ns;
  double beta = 1.0;
  /// Diffusion-scaled initial state (X_1(0), X_2(0), ...).
  std::vector<double> initial_scaled{0.0};
  double t = 2.0;
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  std::int32_t k_max = 3;
};

struct HittingRow {
  std::int32_t n = 0;
  std::size_t hits = 0;
  std::size_t replications = 0;
  double estimate = 0.0;
  Interval ci;
};

/// Time of the first hit of Q^_2 = n in the truncated chain on [0, horizon].
std::optional<double> truncated_hit_time(const ModelParams& params, const CountState& initial);

std::vector<HittingRow> estimate_hitting_probability(const HittingSweep& sweep,
                                                     Execution exec = Execution::kParallel);

struct DelayedWaitSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  /// One-sample KS statistic against Exp(1) and its asymptotic p-value.
  double ks_statistic = 0.0;
  double ks_pvalue = 0.0;
};

/// Summary of the strictly positive waits. Throws EmptySample if nobody waited.
DelayedWaitSummary delayed_wait_distribution(const WaitRecords& records);
DelayedWaitSummary delayed_wait_distribution(std::span<const double> waits);

}  // namespace jsq
