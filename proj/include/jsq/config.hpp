#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "jsq/grid_path.hpp"
#include "jsq/sim_core.hpp"

namespace jsq {

inline constexpr const char* kVersion = "0.1.0";

/// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "JSQ_OUTPUT_ROOT";

enum class Mode { kSimulate, kSimulateTruncated, kLimit, kCompare, kWaits, kSweep, kFigure1 };

std::string to_string(Mode mode);
/// Throws ConfigError for unknown names.
Mode parse_mode(const std::string& name);

/// Initial condition: a named preset, explicit counts, or a diffusion-scaled
/// state converted with the run's n. Exactly one is set.
struct InitialSpec {
  std::string preset;           // "empty" or "all-busy"
  std::vector<std::int32_t> counts;
  std::vector<double> scaled;

  /// Count state for a system with n servers and k_max levels.
  [[nodiscard]] CountState resolve(std::int32_t n, std::int32_t k_max) const;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct Tolerances {
  double solver_tol = 1e-10;
  double window = 0.15;
  std::int32_t max_iters = 200;
  /// Grid step of the limit solver in `compare`; `limit` uses `grid`.
  double limit_dt = 1e-3;
  /// Slack allowed on monotone trend checks.
  double trend_slack = 0.02;

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct ExperimentConfig {
  Mode mode = Mode::kSimulate;
  std::int32_t n = 100;
  double beta = 1.0;
  std::int32_t k_max = 3;
  double horizon = 1.0;
  std::uint64_t seed = 1;
  InitialSpec initial{"all-busy", {}, {}};
  std::uint64_t replications = 1;
  /// count == 0 means "cover [t0, horizon]".
  GridSpec grid{0.0, 1e-3, 0};
  std::string output;
  /// Server counts for `compare` and `sweep`; optional n sweep for `waits`.
  std::vector<std::int32_t> ns;
  /// Marginal times for `compare`.
  std::vector<double> times{2.0};
  Tolerances tolerance{};

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Grid with count resolved against the horizon.
  [[nodiscard]] GridSpec resolved_grid() const;
  [[nodiscard]] ModelParams params() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

nlohmann::json to_json(const ExperimentConfig& config);
/// Strict parse: unknown keys and wrongly typed fields raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& doc);

/// Applies `path=value` to a JSON document. `path` uses dots
/// (params.n=1000); `value` is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Defaults of a mode, as a JSON document ready for overrides.
nlohmann::json default_config(Mode mode);

}  // namespace jsq
