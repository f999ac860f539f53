#pragma once

#include <cstdint>
#include <random>

namespace jsq {

/// Purpose tags keep streams drawn for different roles disjoint even when
/// they share a (seed, replication) pair.
enum class StreamTag : std::uint64_t {
  kEvents = 1,      // event times and event selection of the CTMC
  kTieBreak = 2,    // uniform choice among shortest queues (per-queue mode)
  kBrownian = 3,    // Gaussian increments of the limit driver
  kInitial = 4,     // randomized initial conditions in experiments
};

using Engine = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the stream (seed, replication, tag). Counter based, so replication
/// j's stream does not depend on how many other replications ran or in what
/// order.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t replication,
                                    StreamTag tag) noexcept {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ replication);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  return h;
}

inline Engine make_stream(std::uint64_t seed, std::uint64_t replication, StreamTag tag) {
  return Engine{stream_seed(seed, replication, tag)};
}

}  // namespace jsq
