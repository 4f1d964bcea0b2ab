#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pafit/fitness.hpp"
#include "pafit/graph.hpp"
#include "pafit/theory.hpp"

namespace pafit::verify {

struct ComparisonRow {
  std::string target;
  double theory = 0.0;
  double empirical = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  bool pass = true;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double tolerance = 0.0;
  uint64_t checkpoint = 0;
  size_t seeds = 0;
  bool pass = true;

  std::string csv() const;
  nlohmann::json to_json() const;
};

// M_j/n (or M_cell/n) at the final checkpoint against the limiting shares;
// multi-seed inputs aggregate by median.
ComparisonReport compare_link_shares(const std::vector<graph::EmpiricalSummary>& summaries,
                                     const FitnessModel& model, const PhaseReport& rep,
                                     double tolerance);

struct ExponentEstimate {
  double mle = 0.0;       // discrete Hill-type MLE (headline value)
  double mle_stderr = 0.0;
  double ls = 0.0;        // least squares on the log CCDF
  double ls_stderr = 0.0;
  int64_t kmin = 0;
  int64_t kmax = 0;
  int64_t count = 0;  // vertices in the fitted range
};

// Tail exponent of the degree distribution within one fitness class.
// kmax <= 0 selects the largest k whose CCDF still holds >= 20 vertices.
ExponentEstimate estimate_tail_exponent(const graph::EmpiricalSummary& summary, int64_t atom,
                                        int64_t kmin = 5, int64_t kmax = 0);

struct SlopeEstimate {
  double slope = 0.0;
  double stderr_ = 0.0;
  size_t points = 0;
};

// log-log slope of a tracked vertex's degree vs time over t >= t0
SlopeEstimate vertex_exponent(const graph::Trajectory& trajectory, uint64_t t0);

struct CondensationRow {
  uint64_t n = 0;
  double top_mass = 0.0;      // M_[h-eps, h] / n
  double below_mass = 0.0;
  double max_fitness = 0.0;
};

struct CondensationTable {
  std::vector<CondensationRow> rows;
  bool increasing = false;  // top-window trend across rows
  bool phase_warning = false;
};

// Per-checkpoint mass in the top fitness window [h-eps, h]; expects a model
// in the condensation phase (warns and still runs otherwise).
CondensationTable condensation_scan(const graph::EmpiricalSummary& summary,
                                    const FitnessModel& model, const PhaseReport& rep, double eps,
                                    const std::vector<uint64_t>& at_steps);

// exit-code contract: 0 pass, 1 statistical fail, 2 invariant/hard fail
enum class Gate : int { pass = 0, statistical_fail = 1, hard_fail = 2 };

}  // namespace pafit::verify
