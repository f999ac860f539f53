#include "jsq/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include "jsq/analysis.hpp"
#include "jsq/csv.hpp"
#include "jsq/errors.hpp"
#include "jsq/limit_solver.hpp"
#include "jsq/rng.hpp"
#include "jsq/scaling.hpp"

namespace jsq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string cell(double v) { return format_decimal(v); }
std::string cell(std::size_t v) { return std::to_string(v); }
std::string cell(std::int32_t v) { return std::to_string(v); }
std::string cell(const std::optional<double>& v) { return v ? format_decimal(*v) : std::string(); }

std::uint64_t sweep_seed(std::uint64_t seed, std::int32_t n) { return mix64(seed + static_cast<std::uint64_t>(n)); }

SolverOptions solver_options(const Tolerances& tol) {
  SolverOptions opts;
  opts.window = tol.window;
  opts.tol = tol.solver_tol;
  opts.max_iters = tol.max_iters;
  return opts;
}

std::ofstream open_output(const fs::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  return out;
}

// Empty cells become null, finite numbers stay numbers, anything else is a string.
void write_jsonl(std::ostream& out, const Table& table) {
  for (const auto& row : table.rows) {
    out << '{';
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << json(table.header[i]).dump() << ':';
      const std::string& c = row[i];
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (c.empty()) {
        out << "null";
      } else if (res.ec == std::errc() && res.ptr == c.data() + c.size()) {
        out << (std::isfinite(v) ? c : "null");
      } else {
        out << json(c).dump();
      }
    }
    out << "}\n";
  }
}

class RunWriter {
 public:
  explicit RunWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_ / "paths"); }

  void table(const std::string& stem, const Table& t) {
    {
      auto out = open_output(dir_ / (stem + ".csv"));
      write_table_csv(out, t.header, t.rows);
    }
    {
      auto out = open_output(dir_ / (stem + ".jsonl"));
      write_jsonl(out, t);
    }
    files_.push_back(stem + ".csv");
    files_.push_back(stem + ".jsonl");
  }

  void grid(const std::string& name, const GridPath& path, const std::string& prefix = "x") {
    auto out = open_output(dir_ / "paths" / name);
    write_grid_csv(out, path, prefix);
    files_.push_back("paths/" + name);
  }

  void limit(const std::string& name, const LimitSolution& sol) {
    auto out = open_output(dir_ / "paths" / name);
    write_limit_csv(out, sol);
    files_.push_back("paths/" + name);
  }

  std::vector<std::string> files() && { return std::move(files_); }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::vector<std::string> coordinate_names(const std::string& prefix, std::size_t first, std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back(prefix + std::to_string(first + i));
  return names;
}

template <typename T>
void append(std::vector<T>& a, std::vector<T> b) {
  a.insert(a.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
}

// ---------------------------------------------------------------------------
// Pipelines

void run_simulate(const ExperimentConfig& c, Execution exec, RunWriter& w) {
  const CountState initial = c.initial.resolve(c.n, c.k_max);
  const GridSpec grid = c.resolved_grid();
  struct Rep {
    GridPath x;
    RunStats stats;
  };
  const auto reps = replicate(
      c.replications,
      [&](std::size_t r) {
        ModelParams p = c.params();
        p.replication = r;
        const StepPath path = simulate_jsq_counts(p, initial);
        return Rep{scale_diffusion(path, c.n, grid), summarize_run(path, c.n)};
      },
      exec);

  Table t{{"replication", "hit_time", "agg_wait", "scaled_agg_wait"}, {}};
  append(t.header, coordinate_names("x", 1, static_cast<std::size_t>(c.k_max)));
  for (std::size_t r = 0; r < reps.size(); ++r) {
    w.grid("rep_" + std::to_string(r) + ".csv", reps[r].x);
    const RunStats& s = reps[r].stats;
    std::vector<std::string> row{cell(r), cell(s.hit_time), cell(s.agg_wait), cell(s.scaled_agg_wait)};
    for (const double x : s.terminal_scaled_state) row.push_back(cell(x));
    t.rows.push_back(std::move(row));
  }
  w.table("summary", t);
}

void run_simulate_truncated(const ExperimentConfig& c, Execution exec, RunWriter& w) {
  const CountState initial = c.initial.resolve(c.n, c.k_max);
  const GridSpec grid = c.resolved_grid();
  struct Rep {
    GridPath x;
    MartingalePath m;
    std::size_t u1 = 0, u2 = 0;
    std::optional<double> hit;
  };
  const auto reps = replicate(
      c.replications,
      [&](std::size_t r) {
        ModelParams p = c.params();
        p.replication = r;
        const TruncatedRun run = simulate_jsq_truncated(p, initial);
        return Rep{scale_diffusion(run.path, c.n, grid), extract_martingales(run.path, run.counters, p, grid),
                   run.counters.u1_events.size(), run.counters.u2_events.size(), first_hit_time(run.path, c.n)};
      },
      exec);

  const auto levels = static_cast<std::size_t>(c.k_max) + 1;
  Table t{{"replication", "u1_events", "u2_events", "hit_time"}, {}};
  append(t.header, coordinate_names("m", 0, levels));
  append(t.header, coordinate_names("qv", 0, levels));
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Rep& rep = reps[r];
    w.grid("rep_" + std::to_string(r) + ".csv", rep.x);
    w.grid("martingales_rep_" + std::to_string(r) + ".csv", rep.m.martingales, "m");
    w.grid("qv_rep_" + std::to_string(r) + ".csv", rep.m.qv, "qv");
    std::vector<std::string> row{cell(r), cell(rep.u1), cell(rep.u2), cell(rep.hit)};
    const std::size_t last = rep.m.martingales.rows() - 1;
    for (std::size_t i = 0; i < levels; ++i) row.push_back(cell(rep.m.martingales.at(last, i)));
    for (std::size_t i = 0; i < levels; ++i) row.push_back(cell(rep.m.qv.at(last, i)));
    t.rows.push_back(std::move(row));
  }
  w.table("summary", t);
}

void run_limit(const ExperimentConfig& c, Execution exec, RunWriter& w) {
  const std::vector<double> x0 = limit_initial_state(c);
  const GridSpec grid = c.resolved_grid();
  const SolverOptions opts = solver_options(c.tolerance);
  const auto sols = replicate(
      c.replications,
      [&](std::size_t r) { return simulate_limit_diffusion(x0, NoiseSpec{c.beta, c.seed, grid, r}, c.k_max, opts); },
      exec);

  Table t{{"replication"}, {}};
  append(t.header, coordinate_names("x", 1, static_cast<std::size_t>(c.k_max)));
  append(t.header, std::vector<std::string>{"u1", "u2"});
  for (std::size_t r = 0; r < sols.size(); ++r) {
    w.limit("limit_rep_" + std::to_string(r) + ".csv", sols[r]);
    const std::size_t last = sols[r].x.rows() - 1;
    std::vector<std::string> row{cell(r)};
    for (const double x : sols[r].x.row(last)) row.push_back(cell(x));
    for (const double u : sols[r].u.row(last)) row.push_back(cell(u));
    t.rows.push_back(std::move(row));
  }
  w.table("summary", t);
}

void run_compare(const ExperimentConfig& c, Execution exec, RunWriter& w) {
  Table t{{"n", "t", "coordinate", "ks_statistic", "ks_pvalue", "mean_prelimit", "mean_limit"}, {}};
  for (const CompareRow& r : compare_marginals(c, exec)) {
    t.rows.push_back({cell(r.n), cell(r.t), std::to_string(r.coordinate), cell(r.ks_statistic), cell(r.ks_pvalue),
                      cell(r.mean_prelimit), cell(r.mean_limit)});
  }
  w.table("summary", t);
}

void run_waits(const ExperimentConfig& c, Execution exec, RunWriter& w) {
  Table t{{"n", "replications", "arrivals", "delayed", "scaled_agg_wait_mean", "scaled_agg_wait_se",
           "scaled_agg_wait_q99", "scaled_delayed_fraction_mean", "scaled_delayed_fraction_se", "wait_count",
           "wait_mean", "wait_mean_se", "wait_ks", "wait_ks_pvalue"},
          {}};
  for (const WaitSweepRow& r : waiting_sweep(c, exec)) {
    t.rows.push_back({cell(r.n), cell(r.replications), cell(r.arrivals), cell(r.delayed),
                      cell(r.scaled_agg_wait_mean), cell(r.scaled_agg_wait_se), cell(r.scaled_agg_wait_q99),
                      cell(r.scaled_delayed_fraction_mean), cell(r.scaled_delayed_fraction_se), cell(r.wait_count),
                      cell(r.wait_mean), cell(r.wait_mean_se), cell(r.wait_ks), cell(r.wait_ks_pvalue)});
  }
  w.table("summary", t);
}

void run_sweep(const ExperimentConfig& c, Execution exec, RunWriter& w) {
  HittingSweep sweep;
  sweep.ns = c.ns;
  sweep.beta = c.beta;
  sweep.initial_scaled = c.initial.scaled;
  sweep.t = c.horizon;
  sweep.replications = c.replications;
  sweep.seed = c.seed;
  sweep.k_max = c.k_max;
  if (c.initial.scaled.empty()) throw ConfigError("initial.scaled: mode sweep takes a diffusion-scaled initial state");

  Table t{{"n", "t", "hits", "replications", "estimate", "ci_low", "ci_high"}, {}};
  for (const HittingRow& r : estimate_hitting_probability(sweep, exec)) {
    t.rows.push_back({cell(r.n), cell(c.horizon), cell(r.hits), cell(r.replications), cell(r.estimate),
                      cell(r.ci.low), cell(r.ci.high)});
  }
  w.table("summary", t);
}

void run_figure1(const ExperimentConfig& c, RunWriter& w) {
  const CountState initial = c.initial.resolve(c.n, c.k_max);
  const StepPath path = simulate_jsq_counts(c.params(), initial);
  const GridPath x = scale_diffusion(path, c.n, c.resolved_grid());
  w.grid("figure1.csv", x);

  Table t{{"coordinate", "initial", "final", "min", "max", "sup_abs", "nonincreasing", "first_zero_time"}, {}};
  for (std::size_t i = 0; i < x.cols(); ++i) {
    const std::vector<double> col = x.column(i);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    const bool monotone = std::is_sorted(col.rbegin(), col.rend());
    std::optional<double> zero;
    for (std::size_t j = 0; j < col.size(); ++j) {
      if (col[j] == 0.0) {
        zero = x.time(j);
        break;
      }
    }
    t.rows.push_back({std::to_string(i + 1), cell(col.front()), cell(col.back()), cell(*lo), cell(*hi),
                      cell(std::max(std::abs(*lo), std::abs(*hi))), monotone ? "1" : "0", cell(zero)});
  }
  w.table("summary", t);
}

json metadata(const ExperimentConfig& c, double wall_seconds) {
  json meta{
      {"seed", c.seed},
      {"n", c.n},
      {"beta", c.beta},
      {"lambda_n", ModelParams{c.n, c.beta}.lambda()},
      {"k_max", c.k_max},
      {"horizon", c.horizon},
      {"dt", c.grid.dt},
      {"replications", c.replications},
      {"version", kVersion},
      {"mode", to_string(c.mode)},
      {"wall_time", wall_seconds},
      {"threads", worker_threads()},
      {"config", to_json(c)},
  };
  if (!c.ns.empty() && c.mode != Mode::kSimulate) {
    json by_n = json::object();
    for (const std::int32_t m : c.ns) by_n[std::to_string(m)] = ModelParams{m, c.beta}.lambda();
    meta["lambda_n_by_n"] = by_n;
  }
  if (c.mode == Mode::kCompare) meta["limit_dt"] = c.tolerance.limit_dt;
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  meta["timestamp"] = stamp;
  return meta;
}

}  // namespace

std::vector<std::int32_t> lengths_from_counts(const CountState& state, std::int32_t n) {
  std::vector<std::int32_t> lengths(static_cast<std::size_t>(n), 0);
  for (const std::int32_t q : state.q) {
    for (std::int32_t s = 0; s < q && s < n; ++s) ++lengths[static_cast<std::size_t>(s)];
  }
  return lengths;
}

std::vector<double> limit_initial_state(const ExperimentConfig& config) {
  const auto k = static_cast<std::size_t>(config.k_max);
  std::vector<double> x0;
  if (!config.initial.scaled.empty()) {
    if (config.initial.scaled.size() > k) throw ConfigError("initial.scaled: more coordinates than k_max");
    x0 = config.initial.scaled;
  } else {
    const CountState s = config.initial.resolve(config.n, config.k_max);
    x0 = scale_state(s.q, config.n);
  }
  x0.resize(k, 0.0);
  return x0;
}

std::vector<CompareRow> compare_marginals(const ExperimentConfig& c, Execution exec) {
  const double t_max = *std::max_element(c.times.begin(), c.times.end());
  const GridSpec grid = GridSpec::covering(0.0, t_max, c.tolerance.limit_dt);
  const std::vector<double> x0 = limit_initial_state(c);
  const SolverOptions opts = solver_options(c.tolerance);
  const auto k = static_cast<std::size_t>(c.k_max);

  auto grid_row = [&](double t) {
    return static_cast<std::size_t>(std::llround((t - grid.t0) / grid.dt));
  };

  // limit[r][time index] = X(t)
  const auto limit = replicate(
      c.replications,
      [&](std::size_t r) {
        const LimitSolution sol = simulate_limit_diffusion(x0, NoiseSpec{c.beta, c.seed, grid, r}, c.k_max, opts);
        std::vector<std::vector<double>> at;
        for (const double t : c.times) {
          const auto row = sol.x.row(grid_row(t));
          at.emplace_back(row.begin(), row.end());
        }
        return at;
      },
      exec);

  std::vector<CompareRow> rows;
  for (const std::int32_t n : c.ns) {
    const CountState initial = c.initial.resolve(n, c.k_max);
    const auto pre = replicate(
        c.replications,
        [&](std::size_t r) {
          const ModelParams p{n, c.beta, c.k_max, t_max, sweep_seed(c.seed, n), r};
          const StepPath path = simulate_jsq_counts(p, initial);
          std::vector<std::vector<double>> at;
          for (const double t : c.times) {
            const auto q = path.state(path.index_at(t));
            at.push_back(scale_state(q, n));
          }
          return at;
        },
        exec);

    for (std::size_t ti = 0; ti < c.times.size(); ++ti) {
      for (std::size_t i = 0; i < k; ++i) {
        std::vector<double> a, b;
        Moments ma, mb;
        for (const auto& rep : pre) {
          a.push_back(rep[ti][i]);
          ma.add(rep[ti][i]);
        }
        for (const auto& rep : limit) {
          b.push_back(rep[ti][i]);
          mb.add(rep[ti][i]);
        }
        const double d = ks_two_sample(a, b);
        const double neff = static_cast<double>(a.size() * b.size()) / static_cast<double>(a.size() + b.size());
        rows.push_back({n, c.times[ti], static_cast<int>(i + 1), d, ks_pvalue(d, neff), ma.mean(), mb.mean()});
      }
    }
  }
  return rows;
}

std::vector<WaitSweepRow> waiting_sweep(const ExperimentConfig& c, Execution exec) {
  const std::vector<std::int32_t> ns = c.ns.empty() ? std::vector<std::int32_t>{c.n} : c.ns;
  std::vector<WaitSweepRow> rows;
  for (const std::int32_t n : ns) {
    const std::vector<std::int32_t> lengths = lengths_from_counts(c.initial.resolve(n, c.k_max), n);
    struct Rep {
      RunStats stats;
      std::size_t arrivals = 0;
    };
    const auto reps = replicate(
        c.replications,
        [&](std::size_t r) {
          const ModelParams p{n, c.beta, c.k_max, c.horizon, sweep_seed(c.seed, n), r};
          const PerQueueRun run = simulate_jsq_per_queue(p, lengths);
          return Rep{summarize_run(run.path, n, &run.waits), run.waits.arrivals()};
        },
        exec);

    const double root_n = std::sqrt(static_cast<double>(n));
    WaitSweepRow row;
    row.n = n;
    row.replications = reps.size();
    Moments agg, frac;
    std::vector<double> scaled_waits, waits;
    for (const Rep& rep : reps) {
      row.arrivals += rep.arrivals;
      row.delayed += rep.stats.delayed_waits.size();
      agg.add(rep.stats.scaled_agg_wait);
      frac.add(rep.stats.delayed_fraction * root_n);
      scaled_waits.push_back(rep.stats.scaled_agg_wait);
      waits.insert(waits.end(), rep.stats.delayed_waits.begin(), rep.stats.delayed_waits.end());
    }
    row.scaled_agg_wait_mean = agg.mean();
    row.scaled_agg_wait_se = agg.mean_se();
    row.scaled_agg_wait_q99 = quantile(scaled_waits, 0.99);
    row.scaled_delayed_fraction_mean = frac.mean();
    row.scaled_delayed_fraction_se = frac.mean_se();
    if (!waits.empty()) {
      const DelayedWaitSummary s = delayed_wait_distribution(waits);
      row.wait_count = s.count;
      row.wait_mean = s.mean;
      row.wait_mean_se = s.mean_se;
      row.wait_ks = s.ks_statistic;
      row.wait_ks_pvalue = s.ks_pvalue;
    }
    rows.push_back(row);
  }
  return rows;
}

fs::path output_directory(const ExperimentConfig& config) {
  if (!config.output.empty()) return config.output;
  const std::string leaf = to_string(config.mode) + "-seed" + std::to_string(config.seed);
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') return fs::path(root) / leaf;
  return fs::path("runs") / leaf;
}

RunOutcome run_experiment(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.directory = output_directory(config);
  RunWriter writer(outcome.directory);

  switch (config.mode) {
    case Mode::kSimulate:
      run_simulate(config, exec, writer);
      break;
    case Mode::kSimulateTruncated:
      run_simulate_truncated(config, exec, writer);
      break;
    case Mode::kLimit:
      run_limit(config, exec, writer);
      break;
    case Mode::kCompare:
      run_compare(config, exec, writer);
      break;
    case Mode::kWaits:
      run_waits(config, exec, writer);
      break;
    case Mode::kSweep:
      run_sweep(config, exec, writer);
      break;
    case Mode::kFigure1:
      run_figure1(config, writer);
      break;
  }

  outcome.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  {
    auto out = open_output(outcome.directory / "meta.json");
    out << metadata(config, outcome.wall_seconds).dump(2) << '\n';
  }
  outcome.files = std::move(writer).files();
  return outcome;
}

}  // namespace jsq
