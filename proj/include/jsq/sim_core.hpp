#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "jsq/errors.hpp"
#include "jsq/rng.hpp"
#include "jsq/step_path.hpp"

namespace jsq {

/// Parameters of one M/M/n-JSQ run in the Halfin-Whitt regime.
///
/// The arrival rate per server is lambda_n = 1 - beta / sqrt(n); the total
/// arrival rate is lambda_n * n and every server works at rate 1.
struct ModelParams {
  std::int32_t n = 1;
  double beta = 1.0;
  std::int32_t k_max = 2;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  /// Replication index; selects the RNG stream together with `seed`.
  std::uint64_t replication = 0;

  [[nodiscard]] double lambda() const { return 1.0 - beta / std::sqrt(static_cast<double>(n)); }
  [[nodiscard]] double arrival_rate() const { return lambda() * static_cast<double>(n); }

  /// Throws InvalidParams unless 0 < lambda_n < 1, k_max >= 2 and horizon >= 0.
  void validate() const;
};

/// Counts representation: q[i] = number of queues holding at least i+1
/// customers, for i = 0 .. k_max-1.
struct CountState {
  std::vector<std::int32_t> q;

  [[nodiscard]] std::size_t levels() const noexcept { return q.size(); }

  /// Throws PreconditionViolation unless n >= q[0] >= q[1] >= ... >= 0 and
  /// the vector has exactly k_max entries.
  void validate(std::int32_t n, std::int32_t k_max) const;

  static CountState empty(std::int32_t k_max) { return {std::vector<std::int32_t>(k_max, 0)}; }
  static CountState all_busy(std::int32_t n, std::int32_t k_max) {
    CountState s = empty(k_max);
    s.q[0] = n;
    return s;
  }

  /// Counts closest to a diffusion-scaled state X: Q_1 = n + round(X_1 sqrt n),
  /// Q_i = round(X_i sqrt n). Missing coordinates are zero.
  static CountState from_scaled(std::int32_t n, std::span<const double> x, std::int32_t k_max);

  friend bool operator==(const CountState&, const CountState&) = default;
};

/// Event times of the barrier counters of the truncated system.
struct TruncationCounters {
  /// Arrivals that found every server busy (Q1 = n).
  std::vector<double> u1_events;
  /// Arrivals rejected because Q1 = Q2 = n.
  std::vector<double> u2_events;
};

/// How arrivals that find every server busy are treated.
enum class Dynamics {
  kFull,       // join a shortest queue at any length up to k_max
  kTruncated,  // reject arrivals that would create a queue of length 3
};

enum class EventKind : std::uint8_t { kArrival, kRejected, kDeparture };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kArrival;
  /// Level whose count changed (0-based). For kRejected it is -1.
  std::int32_t level = -1;
  /// True when the arrival found Q1 = n (counts toward U1).
  bool all_busy = false;
};

/// Exact event-by-event simulation of the counts chain.
///
/// Every event consumes one exponential holding time and one uniform used
/// to pick the transition, so the full and truncated chains driven from the
/// same stream coincide until the first arrival that finds Q1 = Q2 = n.
class CountsEngine {
 public:
  CountsEngine(const ModelParams& params, const CountState& initial, Dynamics dynamics);

  /// Draws the next event. If it falls at or before `horizon` the state is
  /// updated, `ev` is filled and true is returned; otherwise nothing changes.
  bool step(double horizon, Event& ev) {
    const double total = arrival_rate_ + static_cast<double>(q_[0]);
    const double next = time_ + holding_(rng_) / total;
    const double v = uniform_(rng_) * total;
    if (next > horizon) return false;
    time_ = next;
    ev.time = next;
    ev.all_busy = false;
    if (v < arrival_rate_) {
      arrive(ev);
    } else {
      depart(v - arrival_rate_, ev);
    }
    return true;
  }

  [[nodiscard]] double time() const noexcept { return time_; }
  [[nodiscard]] std::span<const std::int32_t> state() const noexcept { return q_; }
  [[nodiscard]] std::int32_t n() const noexcept { return n_; }

 private:
  void arrive(Event& ev) {
    const auto k = static_cast<std::int32_t>(q_.size());
    ev.all_busy = q_[0] == n_;
    if (dynamics_ == Dynamics::kTruncated && ev.all_busy && q_[1] == n_) {
      ev.kind = EventKind::kRejected;
      ev.level = -1;
      return;
    }
    std::int32_t j = 0;
    while (j < k && q_[j] == n_) ++j;
    if (j == k) throw_overflow();
    ++q_[j];
    ev.kind = EventKind::kArrival;
    ev.level = j;
  }

  void depart(double r, Event& ev) {
    // r is uniform on [0, Q1); a departure from a queue of length exactly
    // i+1 (rate q[i] - q[i+1]) decrements q[i].
    const auto k = static_cast<std::int32_t>(q_.size());
    std::int32_t i = 0;
    while (i + 1 < k && r < static_cast<double>(q_[i + 1])) ++i;
    --q_[i];
    ev.kind = EventKind::kDeparture;
    ev.level = i;
  }

  [[noreturn]] void throw_overflow() const;

  std::int32_t n_;
  double arrival_rate_;
  Dynamics dynamics_;
  double time_ = 0.0;
  std::vector<std::int32_t> q_;
  Engine rng_;
  std::exponential_distribution<double> holding_{1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Full JSQ chain on [0, horizon] in the counts representation.
StepPath simulate_jsq_counts(const ModelParams& params, const CountState& initial);

struct TruncatedRun {
  StepPath path;
  TruncationCounters counters;
};

/// Truncated chain: arrivals finding Q1 = Q2 = n are rejected.
TruncatedRun simulate_jsq_truncated(const ModelParams& params, const CountState& initial);

struct WaitRecord {
  double arrival_time = 0.0;
  /// Time from arrival to start of service (0 if an idle server was found).
  double wait = 0.0;
  /// Length of the queue the customer joined, before joining.
  std::int32_t joined_length = 0;
};

/// Waits of every customer that arrived in [0, horizon]. Waits are exact:
/// customers still queued at the horizon are followed until they start
/// service (their wait depends only on the customers ahead of them).
struct WaitRecords {
  std::vector<WaitRecord> records;
  [[nodiscard]] std::size_t arrivals() const noexcept { return records.size(); }
  [[nodiscard]] std::size_t delayed() const;
};

struct PerQueueRun {
  StepPath path;  // induced counts
  WaitRecords waits;
};

/// Counts induced by explicit queue lengths, truncated at k_max levels.
/// Throws RepresentationOverflow if any length exceeds k_max.
CountState induced_counts(std::span<const std::int32_t> lengths, std::int32_t k_max);

/// n explicit FIFO queues; each arrival joins a uniformly chosen shortest
/// queue. Event times and transitions use the same stream as
/// simulate_jsq_counts, and tie-breaking draws come from a separate stream,
/// so the induced counts path equals the counts-mode path for the same seed.
PerQueueRun simulate_jsq_per_queue(const ModelParams& params,
                                   std::span<const std::int32_t> initial_lengths);

}  // namespace jsq
