#include "jsq/config.hpp"

#include <cmath>
#include <set>

#include "jsq/errors.hpp"

namespace jsq {

using nlohmann::json;

namespace {

constexpr std::pair<Mode, const char*> kModeNames[] = {
    {Mode::kSimulate, "simulate"}, {Mode::kSimulateTruncated, "simulate-truncated"},
    {Mode::kLimit, "limit"},       {Mode::kCompare, "compare"},
    {Mode::kWaits, "waits"},       {Mode::kSweep, "sweep"},
    {Mode::kFigure1, "figure1"},
};

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!names.contains(key)) throw ConfigError((where.empty() ? key : where + "." + key) + ": unknown field");
  }
}

template <typename T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError((where.empty() ? std::string(key) : where + "." + key) + ": " + e.what());
  }
}

}  // namespace

std::string to_string(Mode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (const auto& [m, text] : kModeNames) {
    if (name == text) return m;
  }
  throw ConfigError("mode: unknown mode '" + name + "'");
}

CountState InitialSpec::resolve(std::int32_t n, std::int32_t k_max) const {
  CountState s;
  if (!counts.empty()) {
    s.q = counts;
    s.q.resize(static_cast<std::size_t>(k_max), 0);
    if (counts.size() > static_cast<std::size_t>(k_max)) throw ConfigError("initial.counts: more levels than k_max");
  } else if (!scaled.empty()) {
    s = CountState::from_scaled(n, scaled, k_max);
  } else if (preset == "empty") {
    s = CountState::empty(k_max);
  } else if (preset == "all-busy") {
    s = CountState::all_busy(n, k_max);
  } else {
    throw ConfigError("initial.preset: unknown preset '" + preset + "'");
  }
  try {
    s.validate(n, k_max);
  } catch (const PreconditionViolation& e) {
    throw ConfigError(std::string("initial: ") + e.what());
  }
  return s;
}

void ExperimentConfig::validate() const {
  if (n < 1) throw ConfigError("params.n: must be positive");
  if (!(beta > 0.0)) throw ConfigError("params.beta: must be positive");
  if (k_max < 2) throw ConfigError("params.k_max: must be at least 2");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ConfigError("params.horizon: must be finite and >= 0");
  if (replications < 1) throw ConfigError("replications: must be positive");
  if (!(grid.dt > 0.0)) throw ConfigError("grid.dt: must be positive");
  if (grid.t0 < 0.0 || grid.t0 > horizon) throw ConfigError("grid.t0: must lie in [0, horizon]");
  if (grid.count > 0 && grid.end() > horizon * (1.0 + 1e-12) + 1e-12) {
    throw ConfigError("grid.count: grid extends beyond params.horizon");
  }
  const int set = static_cast<int>(!initial.preset.empty()) + static_cast<int>(!initial.counts.empty()) +
                  static_cast<int>(!initial.scaled.empty());
  if (set != 1) throw ConfigError("initial: exactly one of preset, counts, scaled must be given");
  if (!(tolerance.solver_tol > 0.0)) throw ConfigError("tolerance.solver_tol: must be positive");
  if (!(tolerance.window > 0.0 && tolerance.window < 0.2)) {
    throw ConfigError("tolerance.window: must lie in (0, 0.2) for the Picard map to contract");
  }
  if (tolerance.max_iters < 1) throw ConfigError("tolerance.max_iters: must be positive");
  if (!(tolerance.limit_dt > 0.0)) throw ConfigError("tolerance.limit_dt: must be positive");

  const bool sweeps = mode == Mode::kCompare || mode == Mode::kSweep;
  if (sweeps && ns.empty()) throw ConfigError("sweep.ns: required for mode " + to_string(mode));
  std::vector<std::int32_t> check_ns = sweeps ? ns : std::vector<std::int32_t>{n};
  if (mode == Mode::kWaits) check_ns.insert(check_ns.end(), ns.begin(), ns.end());
  for (const std::int32_t m : check_ns) {
    if (m < 1 || !(beta < std::sqrt(static_cast<double>(m)))) {
      throw ConfigError((sweeps ? "sweep.ns" : "params.n") + std::string(": beta must be < sqrt(n) for n=") +
                        std::to_string(m));
    }
  }
  if (mode == Mode::kCompare) {
    if (times.empty()) throw ConfigError("sweep.times: required for mode compare");
    for (const double t : times) {
      if (!(t >= 0.0) || t > horizon) throw ConfigError("sweep.times: each time must lie in [0, horizon]");
    }
  }
  if (!sweeps) (void)initial.resolve(n, k_max);
  if (mode == Mode::kWaits) {
    for (const std::int32_t m : ns) (void)initial.resolve(m, k_max);
  }
  if (mode == Mode::kFigure1 && k_max < 5) throw ConfigError("params.k_max: figure1 emits X1..X5, needs k_max >= 5");
}

GridSpec ExperimentConfig::resolved_grid() const {
  if (grid.count > 0) return grid;
  return GridSpec::covering(grid.t0, horizon - grid.t0, grid.dt);
}

ModelParams ExperimentConfig::params() const { return ModelParams{n, beta, k_max, horizon, seed, 0}; }

json to_json(const ExperimentConfig& c) {
  json initial = json::object();
  if (!c.initial.preset.empty()) initial["preset"] = c.initial.preset;
  if (!c.initial.counts.empty()) initial["counts"] = c.initial.counts;
  if (!c.initial.scaled.empty()) initial["scaled"] = c.initial.scaled;
  return json{
      {"mode", to_string(c.mode)},
      {"params", {{"n", c.n}, {"beta", c.beta}, {"k_max", c.k_max}, {"horizon", c.horizon}, {"seed", c.seed}}},
      {"initial", initial},
      {"replications", c.replications},
      {"grid", {{"t0", c.grid.t0}, {"dt", c.grid.dt}, {"count", c.grid.count}}},
      {"output", c.output},
      {"sweep", {{"ns", c.ns}, {"times", c.times}}},
      {"tolerance",
       {{"solver_tol", c.tolerance.solver_tol},
        {"window", c.tolerance.window},
        {"max_iters", c.tolerance.max_iters},
        {"limit_dt", c.tolerance.limit_dt},
        {"trend_slack", c.tolerance.trend_slack}}},
  };
}

ExperimentConfig config_from_json(const json& doc) {
  reject_unknown(doc, "", {"mode", "params", "initial", "replications", "grid", "output", "sweep", "tolerance"});
  ExperimentConfig c;
  if (doc.contains("mode")) {
    std::string mode;
    read(doc, "mode", "", mode);
    c.mode = parse_mode(mode);
  }
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    reject_unknown(p, "params", {"n", "beta", "k_max", "horizon", "seed"});
    read(p, "n", "params", c.n);
    read(p, "beta", "params", c.beta);
    read(p, "k_max", "params", c.k_max);
    read(p, "horizon", "params", c.horizon);
    read(p, "seed", "params", c.seed);
  }
  if (doc.contains("initial")) {
    const json& i = doc.at("initial");
    reject_unknown(i, "initial", {"preset", "counts", "scaled"});
    c.initial = InitialSpec{};
    read(i, "preset", "initial", c.initial.preset);
    read(i, "counts", "initial", c.initial.counts);
    read(i, "scaled", "initial", c.initial.scaled);
  }
  read(doc, "replications", "", c.replications);
  if (doc.contains("grid")) {
    const json& g = doc.at("grid");
    reject_unknown(g, "grid", {"t0", "dt", "count"});
    read(g, "t0", "grid", c.grid.t0);
    read(g, "dt", "grid", c.grid.dt);
    read(g, "count", "grid", c.grid.count);
  }
  read(doc, "output", "", c.output);
  if (doc.contains("sweep")) {
    const json& s = doc.at("sweep");
    reject_unknown(s, "sweep", {"ns", "times"});
    read(s, "ns", "sweep", c.ns);
    read(s, "times", "sweep", c.times);
  }
  if (doc.contains("tolerance")) {
    const json& t = doc.at("tolerance");
    reject_unknown(t, "tolerance", {"solver_tol", "window", "max_iters", "limit_dt", "trend_slack"});
    read(t, "solver_tol", "tolerance", c.tolerance.solver_tol);
    read(t, "window", "tolerance", c.tolerance.window);
    read(t, "max_iters", "tolerance", c.tolerance.max_iters);
    read(t, "limit_dt", "tolerance", c.tolerance.limit_dt);
    read(t, "trend_slack", "tolerance", c.tolerance.trend_slack);
  }
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set: expected path=value, got '" + assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::string pointer;
  for (char ch : path) pointer += ch == '.' ? '/' : ch;
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  try {
    doc[json::json_pointer("/" + pointer)] = value;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json default_config(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  switch (mode) {
    case Mode::kSimulate:
    case Mode::kSimulateTruncated:
      break;
    case Mode::kLimit:
      c.horizon = 5.0;
      c.initial = {"", {}, {0.0, 0.0, 0.0}};
      break;
    case Mode::kCompare:
      c.horizon = 2.0;
      c.k_max = 4;
      c.replications = 2000;
      c.ns = {100, 1000, 10000};
      c.times = {2.0};
      c.initial = {"", {}, {0.0}};
      break;
    case Mode::kWaits:
      c.n = 400;
      c.horizon = 5.0;
      c.k_max = 4;
      c.replications = 20;
      c.initial = {"", {}, {0.0}};
      break;
    case Mode::kSweep:
      c.horizon = 2.0;
      c.replications = 10000;
      c.ns = {25, 100, 400, 1600};
      c.initial = {"", {}, {0.0}};
      break;
    case Mode::kFigure1:
      c.n = 100000;
      c.beta = 2.0;
      c.k_max = 5;
      c.horizon = 10.0;
      // Queue lengths up to 5; the split across lengths is a choice, not data.
      c.initial = {"", {}, {0.0, 1.5, 0.3, 0.08, 0.02}};
      break;
  }
  return to_json(c);
}

}  // namespace jsq
