#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pafit/fitness.hpp"
#include "pafit/rng.hpp"
#include "pafit/weight_tree.hpp"

namespace pafit::graph {

// Collector configuration. Continuous models bucket fitness into the given
// cell grid for M and N; discrete models key by atom index. Tracked vertices
// log (t, degree) at geometric times.
struct CollectorConfig {
  std::vector<double> cell_edges;       // continuous grid; default 20 cells over [0, h]
  int64_t track_first = 0;              // register the first K vertices
  double track_window_lo = 0.0;         // register vertices with fitness in [lo, hi]
  double track_window_hi = -1.0;        // (disabled while hi < lo)
  int64_t track_window_cap = 8;
  std::vector<uint64_t> extra_checkpoints;
  bool log_edges = false;               // opt-in; capped at edge_log_cap entries
  static constexpr uint64_t edge_log_cap = 100000;
};

struct Snapshot {
  uint64_t step = 0;
  std::map<int64_t, int64_t> M;                 // per atom (discrete) or cell (continuous)
  std::map<int64_t, std::vector<int64_t>> N;    // degree histogram per atom/cell
  double max_fitness = 0.0;
};

struct Trajectory {
  uint64_t vertex = 0;
  double fitness = 0.0;
  std::optional<int64_t> atom;
  std::vector<std::pair<uint64_t, int64_t>> points;  // (t, degree)
};

struct EmpiricalSummary {
  uint64_t steps = 0;
  uint64_t seed = 0;
  std::string model_name;
  bool discrete = true;
  std::vector<double> cell_edges;
  std::vector<Snapshot> snapshots;
  Snapshot final_state;
  std::vector<Trajectory> trajectories;
  std::vector<std::pair<uint64_t, uint64_t>> edges;  // (target, new vertex) when logged
  uint64_t zero_weight_events = 0;

  // Σ_{k' >= k} k' N_{(key,k')}
  int64_t T(int64_t key, int64_t k) const;
  // vertices of degree k over all keys
  int64_t L(int64_t k) const;
  int64_t N_at(int64_t key, int64_t k) const;
  int64_t M_at(int64_t key) const;

  std::string summary_csv() const;      // checkpoint, target, M, n, M/n
  std::string degrees_csv() const;      // checkpoint, target, degree, N
  std::string trajectories_csv() const; // vertex, t, degree
  std::string edges_csv() const;        // step, target, new_vertex
  nlohmann::json run_report() const;
};

// per-step attachment record (also drives the urn-mirror cross-checks)
struct StepRecord {
  uint64_t target = 0;
  int64_t target_atom = -1;   // cell index for continuous models
  int64_t target_old_degree = 0;
  int64_t new_atom = -1;
  double new_fitness = 0.0;
  bool zero_weight_fallback = false;
};

class GrowthState {
 public:
  GrowthState(FitnessModel model, uint64_t seed, CollectorConfig config = {});

  StepRecord step();
  EmpiricalSummary run(uint64_t n);

  uint64_t steps() const { return steps_; }
  size_t vertex_count() const { return degree_.size(); }
  int64_t degree(size_t v) const { return degree_[v]; }
  double fitness(size_t v) const { return fitness_[v]; }
  int64_t atom_of(size_t v) const { return atom_[v]; }
  double total_weight() const { return weights_.total(); }
  int64_t degree_sum() const { return degree_sum_; }
  uint64_t zero_weight_events() const { return zero_weight_events_; }
  const FitnessModel& model() const { return model_; }

  // exact recompute of the index root from the leaves (audit hook)
  double audit_weight_total();

  EmpiricalSummary snapshot_summary() const;  // summary of the current state only

  // live collector reads (no snapshot copy)
  int64_t N_of(int64_t key, int64_t k) const;
  int64_t T_of(int64_t key, int64_t k) const;  // Σ_{k'>=k} k' N

 private:
  int64_t key_of(double fitness, std::optional<int64_t> atom) const;
  void add_vertex(double fitness, std::optional<int64_t> atom);
  void register_tracked(uint64_t v);
  void maybe_track(uint64_t v, double fitness, std::optional<int64_t> atom);
  void snapshot_into(Snapshot& snap) const;

  FitnessModel model_;
  Rng rng_;
  CollectorConfig config_;
  WeightTree weights_;
  std::vector<double> fitness_;
  std::vector<int64_t> degree_;
  std::vector<int64_t> atom_;  // atom index or cell index; -1 for out-of-grid
  uint64_t steps_ = 0;
  int64_t degree_sum_ = 0;
  double max_fitness_ = 0.0;
  uint64_t zero_weight_events_ = 0;

  std::map<int64_t, int64_t> M_;
  std::map<int64_t, std::vector<int64_t>> N_;
  std::vector<Trajectory> trajectories_;
  std::vector<size_t> tracked_;  // vertex ids, parallel to trajectories_
  std::vector<std::pair<uint64_t, uint64_t>> edge_log_;
  uint64_t seed_ = 0;
};

// default grid for continuous models: `cells` uniform cells over [0, top]
std::vector<double> uniform_cells(double top, int cells);

}  // namespace pafit::graph
