#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "jsq/config.hpp"
#include "jsq/replicate.hpp"

namespace jsq {

/// Rows of preformatted cells; written as CSV and as one JSON object per row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// KS distance between pre-limit and limit marginals at one time.
struct CompareRow {
  std::int32_t n = 0;
  double t = 0.0;
  int coordinate = 0;  // 1-based
  double ks_statistic = 0.0;
  double ks_pvalue = 0.0;
  double mean_prelimit = 0.0;
  double mean_limit = 0.0;
};

/// Mode `compare`: X^n_i(t) from `replications` counts runs per n against
/// the limit diffusion from `replications` independent driver seeds.
std::vector<CompareRow> compare_marginals(const ExperimentConfig& config, Execution exec = Execution::kParallel);

struct WaitSweepRow {
  std::int32_t n = 0;
  std::size_t replications = 0;
  std::size_t arrivals = 0;
  std::size_t delayed = 0;
  /// Per-replication Y = Z / sqrt(n).
  double scaled_agg_wait_mean = 0.0;
  double scaled_agg_wait_se = 0.0;
  double scaled_agg_wait_q99 = 0.0;
  /// Per-replication delayed fraction times sqrt(n).
  double scaled_delayed_fraction_mean = 0.0;
  double scaled_delayed_fraction_se = 0.0;
  /// Pooled positive waits; count 0 if nobody waited.
  std::size_t wait_count = 0;
  double wait_mean = 0.0;
  double wait_mean_se = 0.0;
  double wait_ks = 0.0;
  double wait_ks_pvalue = 0.0;
};

/// Mode `waits`: per-queue runs over `ns` (or the single `n`).
std::vector<WaitSweepRow> waiting_sweep(const ExperimentConfig& config, Execution exec = Execution::kParallel);

/// Queue lengths realizing a count state: server s holds #{i : s < q[i]}.
std::vector<std::int32_t> lengths_from_counts(const CountState& state, std::int32_t n);

/// Diffusion-scaled initial state of the limit system, padded to k_max.
std::vector<double> limit_initial_state(const ExperimentConfig& config);

struct RunOutcome {
  std::filesystem::path directory;
  /// Data files relative to `directory`, in the order they were written.
  std::vector<std::string> files;
  double wall_seconds = 0.0;
};

/// `output` if set, else $JSQ_OUTPUT_ROOT/<mode>-seed<seed>, else
/// runs/<mode>-seed<seed>.
std::filesystem::path output_directory(const ExperimentConfig& config);

/// Validates the config, runs the pipeline of its mode and writes
/// meta.json, summary.csv, summary.jsonl and paths/*.csv.
RunOutcome run_experiment(const ExperimentConfig& config, Execution exec = Execution::kParallel);

}  // namespace jsq
