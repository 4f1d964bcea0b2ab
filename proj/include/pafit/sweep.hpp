#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pafit/fitness.hpp"
#include "pafit/graph.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace pafit::sweep {

// Seed-parallel fan-out: each seed owns its state, results land in seed
// order. `parallel = false` forces the serial path (used by the benchmark
// to compare the two).
template <class Fn>
void for_each_seed(uint64_t first_seed, uint64_t count, Fn fn, bool parallel = true) {
#if defined(_OPENMP)
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int64_t i = 0; i < static_cast<int64_t>(count); ++i)
      fn(first_seed + static_cast<uint64_t>(i), static_cast<size_t>(i));
    return;
  }
#else
  (void)parallel;
#endif
  for (uint64_t i = 0; i < count; ++i) fn(first_seed + i, static_cast<size_t>(i));
}

inline std::vector<graph::EmpiricalSummary> run_seeds(const FitnessModel& model, uint64_t n,
                                                      uint64_t first_seed, uint64_t seeds,
                                                      const graph::CollectorConfig& config = {},
                                                      bool parallel = true) {
  std::vector<graph::EmpiricalSummary> out(seeds);
  for_each_seed(
      first_seed, seeds,
      [&](uint64_t seed, size_t slot) {
        graph::GrowthState state(model, seed, config);
        out[slot] = state.run(n);
      },
      parallel);
  return out;
}

}  // namespace pafit::sweep
