#include "jsq/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jsq/errors.hpp"
#include "jsq/scaling.hpp"

namespace jsq {

void Moments::add(double x) {
  Moments single;
  single.n_ = 1;
  single.mean_ = x;
  merge(single);
}

void Moments::merge(const Moments& b) {
  if (b.n_ == 0) return;
  if (n_ == 0) {
    *this = b;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(b.n_);
  const double n = na + nb;
  const double delta = b.mean_ - mean_;
  const double d2 = delta * delta;
  const double m2 = m2_ + b.m2_ + d2 * na * nb / n;
  const double m3 = m3_ + b.m3_ + d2 * delta * na * nb * (na - nb) / (n * n) +
                    3.0 * delta * (na * b.m2_ - nb * m2_) / n;
  const double m4 = m4_ + b.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                    6.0 * d2 * (na * na * b.m2_ + nb * nb * m2_) / (n * n) +
                    4.0 * delta * (na * b.m3_ - nb * m3_) / n;
  mean_ += delta * nb / n;
  m2_ = m2;
  m3_ = m3;
  m4_ = m4;
  n_ += b.n_;
}

double Moments::variance() const noexcept { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double Moments::mean_se() const noexcept {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

double Moments::variance_se() const noexcept {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double c2 = m2_ / n;
  const double c4 = m4_ / n;
  return std::sqrt(std::max(0.0, c4 - c2 * c2) / n);
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  const double low = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {low, high};
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw EmptySample("quantile of an empty sample");
  std::sort(samples.begin(), samples.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + frac * (samples[hi] - samples[lo]);
}

LinearTrend linear_trend(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw MismatchedInputs("linear_trend: length mismatch");
  if (x.size() < 3) throw EmptySample("linear_trend needs at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionViolation("linear_trend: x has no spread");
  LinearTrend fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    sse += r * r;
  }
  fit.slope_se = std::sqrt(sse / (n - 2.0) / sxx);
  return fit;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample("ks_two_sample needs two nonempty samples");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_one_sample(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw EmptySample("ks_one_sample needs a nonempty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_pvalue(double d, double n_eff) {
  const double root = std::sqrt(n_eff);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double aggregate_waiting_time(const StepPath& path, double s, double t) {
  if (!(s >= 0.0) || !(t >= s)) throw GridOutOfRange("aggregate_waiting_time needs 0 <= s <= t");
  if (path.dimension() < 2) return 0.0;
  std::size_t idx = path.index_at(s);
  (void)path.index_at(t);  // range check
  double total = 0.0;
  double cursor = s;
  while (cursor < t) {
    const double next = idx + 1 < path.size() ? std::min(path.time(idx + 1), t) : t;
    const auto q = path.state(idx);
    std::int64_t waiting = 0;
    for (std::size_t i = 1; i < q.size(); ++i) waiting += q[i];
    total += static_cast<double>(waiting) * (next - cursor);
    cursor = next;
    ++idx;
  }
  return total;
}

std::optional<double> first_hit_time(const StepPath& path, std::int32_t n) {
  if (path.dimension() < 2) return std::nullopt;
  for (std::size_t j = 0; j < path.size(); ++j) {
    if (path.state(j)[1] >= n) return path.time(j);
  }
  return std::nullopt;
}

MartingalePath extract_martingales(const StepPath& path, const TruncationCounters& counters,
                                   const ModelParams& params, const GridSpec& grid) {
  params.validate();
  grid.validate();
  const std::size_t k = path.dimension();
  if (k != static_cast<std::size_t>(params.k_max)) {
    throw MismatchedInputs("path has " + std::to_string(k) + " levels but k_max=" + std::to_string(params.k_max));
  }
  if (std::abs(path.horizon() - params.horizon) > 1e-12 * std::max(1.0, params.horizon)) {
    throw MismatchedInputs("path horizon does not match parameters");
  }
  if (grid.t0 < 0.0 || grid.end() > path.horizon() + 1e-12 * std::max(1.0, path.horizon())) {
    throw GridOutOfRange("martingale grid extends beyond the path horizon");
  }
  const std::int32_t n = params.n;
  const auto& u1 = counters.u1_events;
  const auto& u2 = counters.u2_events;
  if (!std::is_sorted(u1.begin(), u1.end()) || !std::is_sorted(u2.begin(), u2.end()) ||
      !std::includes(u1.begin(), u1.end(), u2.begin(), u2.end())) {
    throw MismatchedInputs("counter event times must be sorted with u2 a subset of u1");
  }
  for (const double t : u1) {
    if (t > path.horizon() || path.state(path.index_at(t))[0] != n) {
      throw MismatchedInputs("u1 event at t=" + std::to_string(t) + " while Q1 < n");
    }
  }
  for (const double t : u2) {
    const auto q = path.state(path.index_at(t));
    if (q[0] != n || q[1] != n) throw MismatchedInputs("u2 event at t=" + std::to_string(t) + " while Q2 < n");
  }

  const double nn = static_cast<double>(n);
  const double root = std::sqrt(nn);
  const double lam = params.lambda();

  MartingalePath out{GridPath(grid, k + 1), GridPath(grid, k + 1), GridPath(grid, k + 1), GridPath(grid, k + 1)};
  std::vector<std::int64_t> departures(k, 0);
  std::vector<double> integral(k, 0.0);
  std::int64_t level0_arrivals = 0;
  std::int64_t level1_arrivals = 0;
  std::size_t u1_seen = 0;
  std::size_t idx = 0;
  double cursor = 0.0;

  auto rate = [&](std::span<const std::int32_t> q, std::size_t i) {
    return static_cast<double>(q[i] - (i + 1 < k ? q[i + 1] : 0));
  };

  for (std::size_t j = 0; j < grid.count; ++j) {
    const double t = grid.time(j);
    while (idx + 1 < path.size() && path.time(idx + 1) <= t) {
      const double next = path.time(idx + 1);
      const auto before = path.state(idx);
      const auto after = path.state(idx + 1);
      for (std::size_t i = 0; i < k; ++i) integral[i] += (next - cursor) * rate(before, i);
      cursor = next;
      int changed = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const std::int32_t d = after[i] - before[i];
        if (d == 0) continue;
        ++changed;
        if (d == -1) {
          ++departures[i];
        } else if (d == 1 && i == 0) {
          ++level0_arrivals;
        } else if (d == 1 && i == 1) {
          ++level1_arrivals;
        } else {
          throw MismatchedInputs("path jump at t=" + std::to_string(next) + " is not a truncated-chain transition");
        }
      }
      if (changed != 1) throw MismatchedInputs("path entry at t=" + std::to_string(next) + " changes " +
                                               std::to_string(changed) + " levels");
      ++idx;
    }
    while (u1_seen < u1.size() && u1[u1_seen] <= t) ++u1_seen;

    const auto q = path.state(idx);
    const double arrivals = static_cast<double>(level0_arrivals + static_cast<std::int64_t>(u1_seen));
    const double elapsed = t;
    out.counts.at(j, 0) = arrivals / root;
    out.compensators.at(j, 0) = lam * root * elapsed;
    out.martingales.at(j, 0) = out.counts.at(j, 0) - out.compensators.at(j, 0);
    out.qv.at(j, 0) = lam * elapsed;
    for (std::size_t i = 0; i < k; ++i) {
      const double comp = integral[i] + (t - cursor) * rate(q, i);
      out.counts.at(j, i + 1) = static_cast<double>(departures[i]) / root;
      out.compensators.at(j, i + 1) = comp / root;
      out.martingales.at(j, i + 1) = out.counts.at(j, i + 1) - out.compensators.at(j, i + 1);
      out.qv.at(j, i + 1) = comp / nn;
    }
  }

  // Over the whole path, level-1 arrivals are exactly the accepted U1 events.
  std::int64_t all_level1 = 0;
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    if (path.state(j + 1)[1] - path.state(j)[1] == 1) ++all_level1;
  }
  if (all_level1 + static_cast<std::int64_t>(u2.size()) != static_cast<std::int64_t>(u1.size())) {
    throw MismatchedInputs("u1 events do not match arrivals at level 2 plus rejections");
  }
  return out;
}

RunStats summarize_run(const StepPath& path, std::int32_t n, const WaitRecords* waits) {
  RunStats s;
  s.hit_time = first_hit_time(path, n);
  s.agg_wait = aggregate_waiting_time(path, path.horizon());
  s.scaled_agg_wait = s.agg_wait / std::sqrt(static_cast<double>(n));
  s.terminal_scaled_state = scale_state(path.state(path.size() - 1), n);
  if (waits != nullptr) {
    for (const WaitRecord& r : waits->records) {
      if (r.joined_length > 0) s.delayed_waits.push_back(r.wait);
    }
    s.delayed_fraction = waits->arrivals() == 0 ? 0.0
                                                : static_cast<double>(s.delayed_waits.size()) /
                                                      static_cast<double>(waits->arrivals());
  }
  return s;
}

std::optional<double> truncated_hit_time(const ModelParams& params, const CountState& initial) {
  CountsEngine engine(params, initial, Dynamics::kTruncated);
  if (engine.state()[1] >= params.n) return 0.0;
  Event ev;
  while (engine.step(params.horizon, ev)) {
    if (ev.kind == EventKind::kArrival && ev.level == 1 && engine.state()[1] == params.n) return ev.time;
  }
  return std::nullopt;
}

std::vector<HittingRow> estimate_hitting_probability(const HittingSweep& sweep, Execution exec) {
  std::vector<HittingRow> rows;
  for (const std::int32_t n : sweep.ns) {
    ModelParams params{n, sweep.beta, sweep.k_max, sweep.t, mix64(sweep.seed + static_cast<std::uint64_t>(n)), 0};
    params.validate();
    const CountState initial = CountState::from_scaled(n, sweep.initial_scaled, sweep.k_max);
    const auto hits = replicate(
        sweep.replications,
        [&](std::size_t r) {
          ModelParams p = params;
          p.replication = r;
          return truncated_hit_time(p, initial).has_value() ? 1 : 0;
        },
        exec);
    HittingRow row;
    row.n = n;
    row.replications = sweep.replications;
    for (const int h : hits) row.hits += static_cast<std::size_t>(h);
    row.estimate = sweep.replications == 0
                       ? 0.0
                       : static_cast<double>(row.hits) / static_cast<double>(sweep.replications);
    row.ci = wilson_interval(row.hits, sweep.replications);
    rows.push_back(row);
  }
  return rows;
}

DelayedWaitSummary delayed_wait_distribution(std::span<const double> waits) {
  std::vector<double> positive;
  for (const double w : waits) {
    if (w > 0.0) positive.push_back(w);
  }
  if (positive.empty()) throw EmptySample("no customer waited");
  Moments m;
  for (const double w : positive) m.add(w);
  DelayedWaitSummary s;
  s.count = positive.size();
  s.mean = m.mean();
  s.mean_se = m.mean_se();
  s.ks_statistic = ks_one_sample(positive, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); });
  s.ks_pvalue = ks_pvalue(s.ks_statistic, static_cast<double>(s.count));
  return s;
}

DelayedWaitSummary delayed_wait_distribution(const WaitRecords& records) {
  std::vector<double> waits;
  waits.reserve(records.records.size());
  for (const WaitRecord& r : records.records) waits.push_back(r.wait);
  return delayed_wait_distribution(waits);
}

}  // namespace jsq
