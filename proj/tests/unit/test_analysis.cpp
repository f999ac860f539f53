#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "jsq/analysis.hpp"
#include "jsq/errors.hpp"
#include "jsq/scaling.hpp"

using jsq::CountState;
using jsq::ModelParams;

TEST_CASE("moments and their merge") {
  std::mt19937_64 rng(1);
  std::gamma_distribution<double> g(2.0, 1.5);
  std::vector<double> xs(1000);
  for (auto& x : xs) x = g(rng);
  jsq::Moments all, left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    all.add(xs[i]);
    (i < 300 ? left : right).add(xs[i]);
  }
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 1000.0;
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  CHECK(all.mean() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(all.variance() == doctest::Approx(ss / 999.0).epsilon(1e-12));
  CHECK(all.mean_se() == doctest::Approx(std::sqrt(ss / 999.0 / 1000.0)).epsilon(1e-12));
  left.merge(right);
  CHECK(left.count() == 1000);
  CHECK(left.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
  CHECK(left.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
  CHECK(left.variance_se() == doctest::Approx(all.variance_se()).epsilon(1e-10));
  jsq::Moments empty;
  empty.merge(all);
  CHECK(empty.mean() == all.mean());
}

TEST_CASE("wilson interval") {
  const auto half = jsq::wilson_interval(5, 10);
  CHECK(half.low == doctest::Approx(0.2366).epsilon(1e-3));
  CHECK(half.high == doctest::Approx(0.7634).epsilon(1e-3));
  CHECK(jsq::wilson_interval(0, 100).low == 0.0);
  CHECK(jsq::wilson_interval(100, 100).high == 1.0);
}

TEST_CASE("quantile and trend") {
  CHECK(jsq::quantile({3.0, 1.0, 2.0, 4.0}, 0.5) == doctest::Approx(2.5));
  CHECK(jsq::quantile({3.0, 1.0, 2.0, 4.0}, 1.0) == 4.0);
  CHECK_THROWS_AS(jsq::quantile({}, 0.5), jsq::EmptySample);
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto fit = jsq::linear_trend(x, y);
  CHECK(fit.slope == doctest::Approx(2.0));
  CHECK(fit.intercept == doctest::Approx(1.0));
  CHECK(fit.slope_se == doctest::Approx(0.0));
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a{1, 2, 3}, b{2, 3, 4};
  CHECK(jsq::ks_two_sample(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(jsq::ks_two_sample(a, a) == 0.0);
  const std::vector<double> far{10, 11};
  CHECK(jsq::ks_two_sample(a, far) == 1.0);
  CHECK_THROWS_AS(jsq::ks_two_sample(a, std::vector<double>{}), jsq::EmptySample);

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> tie(0, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> u, v;
    for (int i = 0; i < 40 + trial; ++i) u.push_back(trial % 2 ? g(rng) : tie(rng));
    for (int i = 0; i < 30; ++i) v.push_back(trial % 2 ? g(rng) + 0.3 : tie(rng));
    const double d = jsq::ks_two_sample(u, v);
    CHECK(d == doctest::Approx(oracle::brute_ks(u, v)).epsilon(1e-14));
    CHECK(jsq::ks_two_sample(v, u) == d);
    std::vector<double> eu, ev;
    for (const double x : u) eu.push_back(std::exp(x));
    for (const double x : v) ev.push_back(std::exp(x));
    CHECK(jsq::ks_two_sample(eu, ev) == d);
  }
}

TEST_CASE("one-sample KS and p-values") {
  const std::vector<double> s{0.1, 0.5, 0.9};
  CHECK(jsq::ks_one_sample(s, [](double x) { return x; }) == doctest::Approx(7.0 / 30.0));
  // 5% critical value of the Kolmogorov distribution is 1.3581.
  const double n = 1e6;
  CHECK(jsq::ks_pvalue(1.3581 / std::sqrt(n), n) == doctest::Approx(0.05).epsilon(1e-3));
  CHECK(jsq::ks_pvalue(0.0, 100) == 1.0);
  CHECK(jsq::ks_pvalue(1.0, 100) < 1e-10);
}

TEST_CASE("aggregate waiting time") {
  jsq::StepPath p(3, 2.0);
  const std::int32_t s[] = {10, 3, 0};
  p.push(0.0, s);
  CHECK(jsq::aggregate_waiting_time(p, 2.0) == 6.0);
  jsq::StepPath none(3, 2.0);
  const std::int32_t z[] = {10, 0, 0};
  none.push(0.0, z);
  CHECK(jsq::aggregate_waiting_time(none, 2.0) == 0.0);
  CHECK_THROWS_AS(jsq::aggregate_waiting_time(p, 3.0), jsq::GridOutOfRange);

  const ModelParams params{50, 1.0, 4, 5.0, 2, 0};
  const auto path = jsq::simulate_jsq_counts(params, CountState{{50, 20, 5, 0}});
  for (const double split : {0.5, 1.7, 3.3}) {
    const double whole = jsq::aggregate_waiting_time(path, 5.0);
    const double parts = jsq::aggregate_waiting_time(path, 0.0, split) + jsq::aggregate_waiting_time(path, split, 5.0);
    CHECK(parts == doctest::Approx(whole).epsilon(1e-12));
  }
}

TEST_CASE("first hit time") {
  jsq::StepPath p(2, 1.0);
  const std::int32_t a[] = {4, 3}, b[] = {4, 4};
  p.push(0.0, a);
  p.push(0.25, b);
  CHECK(jsq::first_hit_time(p, 4) == 0.25);
  CHECK_FALSE(jsq::first_hit_time(p, 5).has_value());
}

TEST_CASE("martingales at horizon zero vanish") {
  const ModelParams p{100, 1.0, 3, 0.0, 1, 0};
  const auto run = jsq::simulate_jsq_truncated(p, CountState::all_busy(100, 3));
  const auto m = jsq::extract_martingales(run.path, run.counters, p, jsq::GridSpec{0.0, 1e-3, 1});
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.martingales.at(0, i) == 0.0);
    CHECK(m.qv.at(0, i) == 0.0);
  }
}

TEST_CASE("martingale decomposition identities") {
  for (std::uint64_t r = 0; r < 10; ++r) {
    const ModelParams p{16, 1.0, 3, 4.0, 13, r};
    const auto run = jsq::simulate_jsq_truncated(p, CountState{{16, 8, 0}});
    const jsq::GridSpec grid{0.0, 0.01, 401};
    const auto m = jsq::extract_martingales(run.path, run.counters, p, grid);
    std::int32_t arrivals = 0;
    for (std::size_t j = 1; j < run.path.size(); ++j) {
      arrivals += run.path.state(j)[0] > run.path.state(j - 1)[0];
    }
    for (std::size_t j = 0; j < grid.count; ++j) {
      for (std::size_t i = 0; i < 4; ++i) {
        CHECK(m.martingales.at(j, i) + m.compensators.at(j, i) == doctest::Approx(m.counts.at(j, i)).epsilon(1e-12));
        if (j > 0) CHECK(m.qv.at(j, i) >= m.qv.at(j - 1, i));
      }
      const double t = grid.time(j);
      CHECK(m.qv.at(j, 0) == doctest::Approx(p.lambda() * t));
      // Crude bound on the level-2 variation.
      CHECK(m.qv.at(j, 2) <= t / 16.0 * (8.0 + static_cast<double>(arrivals + run.counters.u1_events.size())));
    }
    // Level-0 count = accepted arrivals to idle servers + every arrival that found all busy.
    const double a_total = m.counts.at(grid.count - 1, 0) * 4.0;
    CHECK(a_total == doctest::Approx(static_cast<double>(arrivals + run.counters.u1_events.size())));
  }
}

TEST_CASE("martingale extraction rejects foreign inputs") {
  const ModelParams p{16, 1.0, 3, 2.0, 13, 0};
  const auto run = jsq::simulate_jsq_truncated(p, CountState{{16, 8, 0}});
  const jsq::GridSpec grid{0.0, 0.01, 201};
  auto counters = run.counters;
  counters.u1_events.push_back(1.0e-9);
  std::sort(counters.u1_events.begin(), counters.u1_events.end());
  CHECK_THROWS_AS(jsq::extract_martingales(run.path, counters, p, grid), jsq::MismatchedInputs);
  ModelParams other = p;
  other.k_max = 4;
  CHECK_THROWS_AS(jsq::extract_martingales(run.path, run.counters, other, grid), jsq::MismatchedInputs);
  CHECK_THROWS_AS(jsq::extract_martingales(run.path, run.counters, p, jsq::GridSpec{0.0, 0.01, 301}),
                  jsq::GridOutOfRange);
  const auto full = jsq::simulate_jsq_counts(ModelParams{16, 1.0, 3, 2.0, 13, 1}, CountState{{16, 16, 4}});
  CHECK_THROWS_AS(jsq::extract_martingales(full, {}, p, grid), jsq::MismatchedInputs);
}

TEST_CASE("arrival martingale mean and variance") {
  constexpr std::size_t kReps = 10000;
  const jsq::GridSpec grid{1.0, 1.0, 1};
  const auto values = jsq::replicate(kReps, [&](std::size_t r) {
    const ModelParams p{100, 1.0, 3, 1.0, 44, r};
    const auto run = jsq::simulate_jsq_truncated(p, CountState::all_busy(100, 3));
    return jsq::extract_martingales(run.path, run.counters, p, grid).martingales.at(0, 0);
  });
  jsq::Moments m;
  for (const double v : values) m.add(v);
  CHECK(std::abs(m.mean()) < 3 * m.mean_se());
  CHECK(std::abs(m.variance() - 0.9) < 3 * m.variance_se());
}

TEST_CASE("summaries of runs") {
  const ModelParams p{64, 1.0, 4, 3.0, 6, 0};
  const std::vector<std::int32_t> lengths(64, 1);
  const auto run = jsq::simulate_jsq_per_queue(p, lengths);
  const auto s = jsq::summarize_run(run.path, 64, &run.waits);
  CHECK(s.agg_wait >= 0.0);
  CHECK(s.scaled_agg_wait == doctest::Approx(s.agg_wait / 8.0));
  CHECK(s.delayed_waits.size() == run.waits.delayed());
  CHECK(s.delayed_fraction ==
        doctest::Approx(static_cast<double>(s.delayed_waits.size()) / static_cast<double>(run.waits.arrivals())));
  CHECK(s.terminal_scaled_state == jsq::scale_state(run.path.state(run.path.size() - 1), 64));
  for (const double w : s.delayed_waits) CHECK(w > 0.0);
}

TEST_CASE("hitting probability") {
  jsq::HittingSweep at_barrier;
  at_barrier.ns = {25, 100};
  at_barrier.initial_scaled = {0.0, 5.0};  // Q2 = n for n = 25
  at_barrier.replications = 50;
  at_barrier.k_max = 3;
  const auto rows = jsq::estimate_hitting_probability(at_barrier);
  CHECK(rows[0].estimate == 1.0);
  CHECK(rows[0].ci.high == 1.0);
  const ModelParams p{25, 1.0, 3, 2.0, 0, 0};
  CHECK(jsq::truncated_hit_time(p, CountState{{25, 25, 0}}) == 0.0);

  jsq::HittingSweep small;
  small.ns = {4, 9};
  small.replications = 400;
  small.seed = 3;
  const auto serial = jsq::estimate_hitting_probability(small, jsq::Execution::kSerial);
  const auto parallel = jsq::estimate_hitting_probability(small, jsq::Execution::kParallel);
  REQUIRE(serial.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(serial[i].hits == parallel[i].hits);
    CHECK(serial[i].ci.low <= serial[i].estimate);
    CHECK(serial[i].estimate <= serial[i].ci.high);
  }
  CHECK(serial[0].estimate > 0.0);
}

TEST_CASE("delayed wait distribution") {
  jsq::WaitRecords none;
  none.records = {{0.1, 0.0, 0}, {0.2, 0.0, 0}};
  CHECK_THROWS_AS(jsq::delayed_wait_distribution(none), jsq::EmptySample);

  std::mt19937_64 rng(8);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(5000);
  for (auto& x : w) x = e(rng);
  w.push_back(0.0);
  const auto s = jsq::delayed_wait_distribution(w);
  CHECK(s.count == 5000);
  CHECK(std::abs(s.mean - 1.0) < 3 * s.mean_se);
  CHECK(s.ks_pvalue > 0.01);

  std::gamma_distribution<double> g(2.0, 0.5);
  for (auto& x : w) x = g(rng);
  CHECK(jsq::delayed_wait_distribution(w).ks_pvalue < 0.01);
}

TEST_CASE("replicate returns index order and rethrows") {
  const auto out = jsq::replicate(100, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == static_cast<int>(i * i));
  CHECK_THROWS_AS(jsq::replicate(10,
                                 [](std::size_t i) -> int {
                                   if (i == 7) throw jsq::EmptySample("boom");
                                   return 0;
                                 }),
                  jsq::EmptySample);
}
