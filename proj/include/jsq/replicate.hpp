#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace jsq {

enum class Execution {
  kSerial,    // reference loop, replications in index order
  kParallel,  // OpenMP worker pool
};

/// Runs fn(0), ..., fn(count-1) and returns the results in index order.
///
/// Every replication derives its RNG streams from its own index, so the
/// parallel kernel returns exactly what the serial loop returns. The first
/// exception thrown by any replication is rethrown after the pool joins.
template <typename Fn>
auto replicate(std::size_t count, Fn&& fn, Execution exec = Execution::kParallel)
    -> std::vector<std::invoke_result_t<Fn&, std::size_t>> {
  using Result = std::invoke_result_t<Fn&, std::size_t>;
  std::vector<Result> results(count);
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }

  std::exception_ptr failure;
  const auto total = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < total; ++i) {
    try {
      results[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(jsq_replicate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

/// Worker threads the parallel kernel will use.
inline int worker_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace jsq
