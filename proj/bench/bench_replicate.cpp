// Serial reference loop vs OpenMP pool on the replication kernels.
// Usage: bench_replicate [replications] [n]

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "jsq/analysis.hpp"
#include "jsq/limit_solver.hpp"
#include "jsq/replicate.hpp"
#include "jsq/sim_core.hpp"

namespace {

template <typename Fn>
double seconds(Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename Kernel>
void compare(const std::string& name, std::size_t reps, Kernel&& kernel) {
  decltype(jsq::replicate(reps, kernel, jsq::Execution::kSerial)) serial, parallel;
  const double ts = seconds([&] { serial = jsq::replicate(reps, kernel, jsq::Execution::kSerial); });
  const double tp = seconds([&] { parallel = jsq::replicate(reps, kernel, jsq::Execution::kParallel); });
  std::cout << name << ": serial " << ts << " s, parallel " << tp << " s (" << jsq::worker_threads()
            << " threads), speedup " << ts / tp << ", identical " << (serial == parallel ? "yes" : "NO") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200;
  const auto n = static_cast<std::int32_t>(argc > 2 ? std::strtol(argv[2], nullptr, 10) : 10000);

  compare("counts chain, hit time", reps, [&](std::size_t r) {
    const jsq::ModelParams p{n, 1.0, 3, 2.0, 11, r};
    return jsq::truncated_hit_time(p, jsq::CountState::all_busy(n, 3)).value_or(-1.0);
  });

  compare("per-queue chain, aggregate wait", reps, [&](std::size_t r) {
    const jsq::ModelParams p{n, 1.0, 4, 2.0, 12, r};
    const std::vector<std::int32_t> lengths(static_cast<std::size_t>(n), 1);
    const auto run = jsq::simulate_jsq_per_queue(p, lengths);
    return jsq::aggregate_waiting_time(run.path, 2.0);
  });

  compare("limit diffusion, X(2)", reps, [&](std::size_t r) {
    const std::vector<double> x0(4, 0.0);
    const auto sol = jsq::simulate_limit_diffusion(x0, jsq::NoiseSpec{1.0, 13, {0.0, 1e-3, 2001}, r}, 4);
    const auto last = sol.x.row(sol.x.rows() - 1);
    return std::vector<double>(last.begin(), last.end());
  });
  return 0;
}
