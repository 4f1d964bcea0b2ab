#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pafit/fitness.hpp"
#include "pafit/rng.hpp"

namespace pafit::urn {

// one possible update: sparse ball deltas applied after drawing from a bin
struct UrnUpdate {
  std::vector<std::pair<uint32_t, int32_t>> deltas;
  double prob = 1.0;
};

struct UrnSpec {
  size_t bins = 0;
  std::vector<double> activities;
  std::vector<std::vector<UrnUpdate>> update_laws;  // per bin, probs sum to 1
  // initial load distribution over X0
  std::vector<std::pair<std::vector<int64_t>, double>> initial_loads;
  int32_t max_update_magnitude = 0;
  std::string name = "urn";

  void validate() const;
  nlohmann::json to_json() const;
};

class TenabilityError : public std::runtime_error {
 public:
  TenabilityError(std::string what, uint64_t step, size_t bin)
      : std::runtime_error(std::move(what)), step(step), bin(bin) {}
  uint64_t step;
  size_t bin;
};

struct UrnTrajectory {
  std::vector<uint64_t> checkpoint_steps;
  std::vector<std::vector<int64_t>> counts;  // one row per checkpoint
  std::vector<int64_t> final_counts;
  uint64_t steps = 0;
};

// Run the scheme for n steps: bin i drawn with probability ∝ a_i X_i, then an
// update vector from bin i's law is applied. Counts are asserted nonnegative
// after every update. Checkpoints are powers of two plus the final step.
UrnTrajectory run_urn(const UrnSpec& spec, uint64_t n, Rng& rng,
                      const std::vector<uint64_t>& extra_checkpoints = {});

struct Matrix {
  size_t n = 0;
  std::vector<double> a;  // row-major
  double& at(size_t i, size_t j) { return a[i * n + j]; }
  double at(size_t i, size_t j) const { return a[i * n + j]; }
};

// A_{ij} = a_i E[ξ_{i,j}], exact over the tabulated update laws.
Matrix mean_matrix(const UrnSpec& spec);

struct PerronResult {
  double lambda1 = 0.0;
  std::vector<double> v1;  // left eigenvector, a·v1 = 1
  std::vector<double> u1;  // right eigenvector, u1·v1 = 1
  int iterations = 0;
  double residual = 0.0;
};

// Dominant eigenpair by shifted power iteration (shift 1 + max(0, -min A_ii)).
// Zero-activity bins are excluded from the iteration; v1 is extended to them
// by the eigen relation afterwards and u1 is zero there.
PerronResult perron(const Matrix& A, const std::vector<double>& activities,
                    double tol = 1e-13, int max_iter = 100000);

PerronResult perron(const UrnSpec& spec);

// --- builders ---------------------------------------------------------------

// k+1 bins tracking edges at vertices of degree l (overflow bin at k+1),
// unit activities, deterministic update vectors.
UrnSpec degree_urn(int64_t k);

// one bin per atom of a finite model, activity f_i, update e_i + e_{i*}.
UrnSpec fitness_urn(const FitnessModel& model);

// (k+1)·J bins indexed (atom, degree), activity f_i, four-step updates.
// Bin layout is row-major by atom: index(i, l) = (i-1)*(k+1) + (l-1).
UrnSpec joint_urn(const FitnessModel& model, int64_t k);

// I+1 bins approximating a bounded continuous model from below: grid
// activities h·i/I with a rejection variable, overflow bin at activity h.
UrnSpec discretization_urn(const FitnessModel& model, int64_t I);

// per-cell masses q̃_i = ∫ g over [h(i-1)/I, h·i/I]
std::vector<double> discretization_cell_masses(const FitnessModel& model, int64_t I);

}  // namespace pafit::urn
