// Benchmark: the sum-tree sampling kernel against the linear-scan reference,
// and the seed-parallel sweep against its serial path.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "pafit/graph.hpp"
#include "pafit/rng.hpp"
#include "pafit/sweep.hpp"
#include "pafit/weight_tree.hpp"

using namespace pafit;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

// growth loop against a pluggable weight index
template <class Index>
double grow(uint64_t n, uint64_t seed) {
  Rng rng(seed);
  Index weights;
  weights.push_back(2.0);
  const auto t0 = clock_type::now();
  for (uint64_t i = 0; i < n; ++i) {
    const size_t target = weights.sample(rng.u01() * weights.total());
    weights.add(target, 1.0);
    weights.push_back(1.0);
  }
  return seconds(t0);
}

}  // namespace

int main(int argc, char** argv) {
  uint64_t n_kernel = 200000;
  uint64_t n_sweep = 200000;
  uint64_t seeds = 8;
  if (argc > 1) n_kernel = std::strtoull(argv[1], nullptr, 10);
  if (argc > 2) n_sweep = std::strtoull(argv[2], nullptr, 10);

  std::printf("sampling kernel, %llu growth steps:\n", (unsigned long long)n_kernel);
  const double t_tree = grow<WeightTree>(n_kernel, 1);
  std::printf("  sum tree        %8.3f s  (%.2e steps/s)\n", t_tree, n_kernel / t_tree);
  const uint64_t n_linear = std::min<uint64_t>(n_kernel, 20000);
  const double t_linear = grow<LinearWeights>(n_linear, 1);
  std::printf("  linear reference %7.3f s  (%.2e steps/s at n=%llu)\n", t_linear,
              n_linear / t_linear, (unsigned long long)n_linear);

  auto model = two_point(1.0, 2.0, 0.5);
  std::printf("seed sweep, %llu seeds x %llu steps:\n", (unsigned long long)seeds,
              (unsigned long long)n_sweep);
  auto t0 = clock_type::now();
  sweep::run_seeds(model, n_sweep, 1, seeds, {}, false);
  const double t_serial = seconds(t0);
  std::printf("  serial          %8.3f s\n", t_serial);
  t0 = clock_type::now();
  sweep::run_seeds(model, n_sweep, 1, seeds, {}, true);
  const double t_par = seconds(t0);
  std::printf("  worker pool     %8.3f s  (speedup %.2fx)\n", t_par, t_serial / t_par);
  return 0;
}
