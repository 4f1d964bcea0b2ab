#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pafit/fitness.hpp"
#include "pafit/rng.hpp"

namespace pafit::coupling {

enum class TruncationSide { upper, lower };

// Map tail atoms (index > I) to fitness 0 (upper) or to the supremum h
// (lower), merging the mapped mass into a single atom. Atom probabilities
// for j <= I are preserved exactly. Discrete models only.
FitnessModel truncate(const FitnessModel& model, int64_t I, TruncationSide side);

struct Violation {
  uint64_t step = 0;
  int condition = 0;  // 1: fitness, 2: link counts, 3: choice probs, 4: degree tails
  std::string detail;
};

nlohmann::json to_json(const Violation& v);

// Per-chain view of a coupled run, at class granularity: M_j for the coupled
// classes 1..I plus the remaining mass in one bucket.
struct ChainTrace {
  std::vector<uint64_t> checkpoint_steps;
  std::vector<std::vector<int64_t>> M_rows;  // per checkpoint: M_1..M_I, other
  std::vector<int64_t> M_final;              // same layout
  // degree-run extras: T_{(i,k)} tables for classes 1..I at the end
  std::vector<std::vector<int64_t>> T_final;
};

struct CoupledResult {
  int64_t I = 0;
  uint64_t steps = 0;
  uint64_t seed = 0;
  bool full = false;  // degree tails coupled and checked
  ChainTrace upper, mid, lower;
  std::vector<Violation> violations;
  uint64_t zero_weight_events = 0;
  std::string violations_jsonl() const;
};

// Joint run of the (F,Q) chain with its upper and lower I-truncations under
// the shared-randomness scheme: one uniform drives the class choice in all
// three chains (four-branch split over the choice probabilities), the new
// vertex's fitness index is shared. Checks per step: the fitness dominations
// and the per-class link-count sandwich for classes <= I.
CoupledResult coupled_triple_run(const FitnessModel& model, int64_t I, uint64_t n, uint64_t seed);

// Extends the triple run: within the chosen class, the degree of the chosen
// vertex is the inversion of the chain's running degree-tail law at the same
// uniform, so degree tails are sandwiched too. T-domination is checked at
// every checkpoint.
CoupledResult coupled_degree_run(const FitnessModel& model, int64_t I, uint64_t n, uint64_t seed);

// Appendix-style grid approximation of a bounded continuous model.
struct DiscretizationSpec {
  int64_t I = 0;
  double h = 0.0;
  double eps = 0.0;  // h / I
  double G = 1.0;
  std::vector<double> f_hi;       // h·i/I
  std::vector<double> f_lo;       // h·(i-1)/I
  std::vector<double> cell_mass;  // ∫ g over the cell, quadrature to 1e-10
};

DiscretizationSpec discretize(const FitnessModel& model, int64_t I);

struct DiscretizationRoot {
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> nu;  // ν̃_1..ν̃_{I+1}
  double nu_sum = 0.0;     // equals 1 + G
};

// Unique root λ > h - ε of
//   Σ_j f̄_j q̃_j/(λ - f̲_j) + h(1+G)ε/(λ(λ - (h-ε))) = 1.
DiscretizationRoot solve_discretization_lambda(const DiscretizationSpec& spec);

struct ScanRow {
  int64_t I = 0;
  double lambda_lower = 0.0;  // lower truncation root (discrete)
  double lambda_upper = 0.0;  // upper truncation root (discrete)
  double lambda_tilde = 0.0;  // discretization root (continuous)
  double lambda_target = 0.0; // λ0 of the base model (h in condensation)
};

std::vector<ScanRow> lambda0_convergence_scan(const FitnessModel& model,
                                              const std::vector<int64_t>& Is);

std::string scan_csv(const std::vector<ScanRow>& rows);

}  // namespace pafit::coupling
