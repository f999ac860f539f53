#include "jsq/sim_core.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace jsq {

void ModelParams::validate() const {
  if (n < 1) throw InvalidParams("n must be positive, got " + std::to_string(n));
  if (!(beta > 0.0)) throw InvalidParams("beta must be positive");
  const double lam = lambda();
  if (!(lam > 0.0 && lam < 1.0)) {
    throw InvalidParams("lambda_n = 1 - beta/sqrt(n) must lie in (0, 1); need beta < sqrt(n) (beta=" +
                        std::to_string(beta) + ", n=" + std::to_string(n) + ")");
  }
  if (k_max < 2) throw InvalidParams("k_max must be at least 2");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw InvalidParams("horizon must be finite and >= 0");
}

void CountState::validate(std::int32_t n, std::int32_t k_max) const {
  if (q.size() != static_cast<std::size_t>(k_max)) {
    throw PreconditionViolation("count state has " + std::to_string(q.size()) + " levels, expected k_max=" +
                                std::to_string(k_max));
  }
  std::int32_t above = n;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] < 0 || q[i] > above) {
      throw PreconditionViolation("count state violates n >= Q1 >= Q2 >= ... >= 0 at level " +
                                  std::to_string(i + 1));
    }
    above = q[i];
  }
}

CountState CountState::from_scaled(std::int32_t n, std::span<const double> x, std::int32_t k_max) {
  if (x.size() > static_cast<std::size_t>(k_max)) {
    throw PreconditionViolation("scaled state has more coordinates than k_max");
  }
  const double root = std::sqrt(static_cast<double>(n));
  CountState s = empty(k_max);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = std::round(x[i] * root);
    s.q[i] = static_cast<std::int32_t>(i == 0 ? n + v : v);
  }
  s.validate(n, k_max);
  return s;
}

CountsEngine::CountsEngine(const ModelParams& params, const CountState& initial, Dynamics dynamics)
    : n_(params.n),
      arrival_rate_(params.arrival_rate()),
      dynamics_(dynamics),
      q_(initial.q),
      rng_(make_stream(params.seed, params.replication, StreamTag::kEvents)) {
  params.validate();
  initial.validate(params.n, params.k_max);
}

void CountsEngine::throw_overflow() const {
  throw RepresentationOverflow("arrival at t=" + std::to_string(time_) + " found all " +
                               std::to_string(q_.size()) + " levels saturated; increase k_max");
}

StepPath simulate_jsq_counts(const ModelParams& params, const CountState& initial) {
  CountsEngine engine(params, initial, Dynamics::kFull);
  StepPath path(initial.levels(), params.horizon);
  path.push(0.0, engine.state());
  Event ev;
  while (engine.step(params.horizon, ev)) path.push(ev.time, engine.state());
  return path;
}

TruncatedRun simulate_jsq_truncated(const ModelParams& params, const CountState& initial) {
  CountsEngine engine(params, initial, Dynamics::kTruncated);
  TruncatedRun run{StepPath(initial.levels(), params.horizon), {}};
  run.path.push(0.0, engine.state());
  Event ev;
  while (engine.step(params.horizon, ev)) {
    if (ev.all_busy) run.counters.u1_events.push_back(ev.time);
    if (ev.kind == EventKind::kRejected) {
      run.counters.u2_events.push_back(ev.time);
      continue;
    }
    run.path.push(ev.time, engine.state());
  }
  return run;
}

std::size_t WaitRecords::delayed() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const WaitRecord& r) { return r.joined_length > 0; }));
}

CountState induced_counts(std::span<const std::int32_t> lengths, std::int32_t k_max) {
  CountState s = CountState::empty(k_max);
  for (const std::int32_t len : lengths) {
    if (len < 0) throw PreconditionViolation("negative queue length");
    if (len > k_max) throw RepresentationOverflow("queue length " + std::to_string(len) + " exceeds k_max");
    for (std::int32_t i = 0; i < len; ++i) ++s.q[i];
  }
  return s;
}

namespace {

constexpr std::uint32_t kInitialCustomer = std::numeric_limits<std::uint32_t>::max();

/// Explicit queues with FIFO service and per-customer bookkeeping.
class PerQueueSystem {
 public:
  PerQueueSystem(std::span<const std::int32_t> lengths, std::int32_t k_max)
      : k_(k_max),
        lengths_(lengths.begin(), lengths.end()),
        pos_(lengths.size()),
        head_(lengths.size(), 0),
        slots_(lengths.size() * static_cast<std::size_t>(k_max), kInitialCustomer),
        buckets_(static_cast<std::size_t>(k_max) + 1),
        counts_(induced_counts(lengths, k_max)) {
    for (std::size_t s = 0; s < lengths_.size(); ++s) insert(static_cast<std::int32_t>(s));
  }

  [[nodiscard]] const CountState& counts() const noexcept { return counts_; }
  [[nodiscard]] std::size_t pending() const noexcept { return pending_; }

  /// Shortest queue length, or k_max if every queue is full.
  [[nodiscard]] std::int32_t shortest() const noexcept {
    const auto n = static_cast<std::int32_t>(lengths_.size());
    std::int32_t j = 0;
    while (j < k_ && counts_.q[j] == n) ++j;
    return j;
  }

  void arrive(double t, std::int32_t len, Engine& tie, WaitRecords& out) {
    auto& bucket = buckets_[len];
    std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
    const std::int32_t s = bucket[pick(tie)];
    const auto record = static_cast<std::uint32_t>(out.records.size());
    out.records.push_back({t, 0.0, len});
    slot(s, len) = record;
    if (len > 0) ++pending_;
    erase(s);
    ++lengths_[s];
    insert(s);
    ++counts_.q[len];
  }

  /// r is uniform on [0, Q1); it selects a busy server uniformly.
  void depart(double t, double r, WaitRecords& out) {
    const auto& q = counts_.q;
    std::int32_t i = 0;
    while (i + 1 < k_ && r < static_cast<double>(q[i + 1])) ++i;
    const double offset = r - (i + 1 < k_ ? static_cast<double>(q[i + 1]) : 0.0);
    auto& bucket = buckets_[i + 1];
    const std::size_t m = std::min(bucket.size() - 1, static_cast<std::size_t>(offset));
    const std::int32_t s = bucket[m];

    head_[s] = (head_[s] + 1) % k_;
    erase(s);
    --lengths_[s];
    insert(s);
    --counts_.q[i];
    if (lengths_[s] > 0) {
      const std::uint32_t next = slot(s, 0);
      if (next != kInitialCustomer) {
        WaitRecord& rec = out.records[next];
        rec.wait = t - rec.arrival_time;
        --pending_;
      }
    }
  }

 private:
  // Position p (0 = in service) of server s's ring.
  std::uint32_t& slot(std::int32_t s, std::int32_t p) {
    return slots_[static_cast<std::size_t>(s) * k_ + (head_[s] + p) % k_];
  }

  void insert(std::int32_t s) {
    auto& bucket = buckets_[lengths_[s]];
    pos_[s] = bucket.size();
    bucket.push_back(s);
  }

  void erase(std::int32_t s) {
    auto& bucket = buckets_[lengths_[s]];
    const std::size_t p = pos_[s];
    bucket[p] = bucket.back();
    pos_[bucket[p]] = p;
    bucket.pop_back();
  }

  std::int32_t k_;
  std::vector<std::int32_t> lengths_;
  std::vector<std::size_t> pos_;
  std::vector<std::int32_t> head_;
  std::vector<std::uint32_t> slots_;
  std::vector<std::vector<std::int32_t>> buckets_;
  CountState counts_;
  std::size_t pending_ = 0;
};

}  // namespace

PerQueueRun simulate_jsq_per_queue(const ModelParams& params, std::span<const std::int32_t> initial_lengths) {
  params.validate();
  if (initial_lengths.size() != static_cast<std::size_t>(params.n)) {
    throw InvalidParams("initial_lengths has " + std::to_string(initial_lengths.size()) + " entries, expected n=" +
                        std::to_string(params.n));
  }
  PerQueueSystem system(initial_lengths, params.k_max);
  Engine rng = make_stream(params.seed, params.replication, StreamTag::kEvents);
  Engine tie = make_stream(params.seed, params.replication, StreamTag::kTieBreak);
  std::exponential_distribution<double> holding(1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double arrival_rate = params.arrival_rate();

  PerQueueRun run{StepPath(static_cast<std::size_t>(params.k_max), params.horizon), {}};
  run.path.push(0.0, system.counts().q);
  double t = 0.0;
  while (true) {
    const double busy = static_cast<double>(system.counts().q[0]);
    const double total = arrival_rate + busy;
    const double next = t + holding(rng) / total;
    const double v = uniform(rng) * total;
    if (next > params.horizon) break;
    t = next;
    if (v < arrival_rate) {
      const std::int32_t len = system.shortest();
      if (len == params.k_max) {
        throw RepresentationOverflow("arrival at t=" + std::to_string(t) + " found every queue at k_max");
      }
      system.arrive(t, len, tie, run.waits);
    } else {
      system.depart(t, v - arrival_rate, run.waits);
    }
    run.path.push(t, system.counts().q);
  }

  // Drain: follow departures until every customer queued at the horizon has
  // started service. No arrivals are needed because service is FIFO.
  t = params.horizon;
  while (system.pending() > 0) {
    const double busy = static_cast<double>(system.counts().q[0]);
    t += holding(rng) / busy;
    system.depart(t, uniform(rng) * busy, run.waits);
  }
  return run;
}

}  // namespace jsq
