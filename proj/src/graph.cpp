#include "pafit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pafit::graph {

std::vector<double> uniform_cells(double top, int cells) {
  std::vector<double> edges;
  for (int i = 0; i <= cells; ++i) edges.push_back(top * i / cells);
  return edges;
}

int64_t EmpiricalSummary::M_at(int64_t key) const {
  auto it = final_state.M.find(key);
  return it == final_state.M.end() ? 0 : it->second;
}

int64_t EmpiricalSummary::N_at(int64_t key, int64_t k) const {
  auto it = final_state.N.find(key);
  if (it == final_state.N.end()) return 0;
  const auto& hist = it->second;
  if (k < 0 || static_cast<size_t>(k) >= hist.size()) return 0;
  return hist[static_cast<size_t>(k)];
}

int64_t EmpiricalSummary::T(int64_t key, int64_t k) const {
  auto it = final_state.N.find(key);
  if (it == final_state.N.end()) return 0;
  const auto& hist = it->second;
  int64_t t = 0;
  for (size_t d = std::max<int64_t>(k, 1); d < hist.size(); ++d)
    t += static_cast<int64_t>(d) * hist[d];
  return t;
}

int64_t EmpiricalSummary::L(int64_t k) const {
  int64_t total = 0;
  for (const auto& [key, hist] : final_state.N)
    if (k >= 0 && static_cast<size_t>(k) < hist.size()) total += hist[static_cast<size_t>(k)];
  return total;
}

GrowthState::GrowthState(FitnessModel model, uint64_t seed, CollectorConfig config)
    : model_(std::move(model)), rng_(seed), config_(std::move(config)), seed_(seed) {
  if (!model_.discrete() && config_.cell_edges.empty()) {
    const double top = model_.bounded() ? model_.sup
                                        : (model_.quantile ? model_.quantile(1.0 - 1e-4) : 1.0);
    config_.cell_edges = uniform_cells(top, 20);
  }
  auto [f, atom] = model_.sample(rng_);
  add_vertex(f, atom);
  // the root carries a self-loop: degree 2, both edge ends in its class
  degree_[0] = 2;
  degree_sum_ = 2;
  weights_.set(0, 2.0 * fitness_[0]);
  const int64_t key = atom_[0];
  M_[key] = 2;
  auto& hist = N_[key];
  hist.assign(3, 0);
  hist[2] = 1;
}

int64_t GrowthState::key_of(double fitness, std::optional<int64_t> atom) const {
  if (atom.has_value()) return *atom;
  const auto& e = config_.cell_edges;
  if (e.empty() || fitness < e.front()) return -1;
  // cells are [a, b), the top cell closes at its upper edge
  if (fitness >= e.back())
    return fitness == e.back() ? static_cast<int64_t>(e.size()) - 2 : -1;
  const auto it = std::upper_bound(e.begin(), e.end(), fitness);
  return static_cast<int64_t>(it - e.begin()) - 1;
}

void GrowthState::add_vertex(double fitness, std::optional<int64_t> atom) {
  fitness_.push_back(fitness);
  degree_.push_back(1);
  atom_.push_back(key_of(fitness, atom));
  weights_.push_back(fitness);
  degree_sum_ += 1;
  max_fitness_ = std::max(max_fitness_, fitness);
  maybe_track(fitness_.size() - 1, fitness, atom);
}

void GrowthState::maybe_track(uint64_t v, double fitness, std::optional<int64_t> atom) {
  bool want = static_cast<int64_t>(v) < config_.track_first;
  if (!want && config_.track_window_hi >= config_.track_window_lo &&
      static_cast<int64_t>(tracked_.size()) <
          config_.track_first + config_.track_window_cap) {
    want = fitness >= config_.track_window_lo && fitness <= config_.track_window_hi;
  }
  if (!want) return;
  Trajectory t;
  t.vertex = v;
  t.fitness = fitness;
  t.atom = atom;
  trajectories_.push_back(std::move(t));
  tracked_.push_back(v);
}

StepRecord GrowthState::step() {
  StepRecord rec;
  const double total = weights_.total();
  size_t target;
  if (total > 0.0) {
    target = weights_.sample(rng_.u01() * total);
  } else {
    // only reachable when every vertex has fitness 0 (internal truncated
    // models); flagged so runs can be excluded
    target = static_cast<size_t>(rng_.below(vertex_count()));
    rec.zero_weight_fallback = true;
    ++zero_weight_events_;
  }
  rec.target = target;
  rec.target_atom = atom_[target];
  rec.target_old_degree = degree_[target];

  degree_[target] += 1;
  degree_sum_ += 1;
  weights_.add(target, fitness_[target]);

  // move one vertex from degree d to d+1 in its class histogram
  auto& hist = N_[atom_[target]];
  const size_t d = static_cast<size_t>(rec.target_old_degree);
  if (hist.size() <= d + 1) hist.resize(d + 2, 0);
  hist[d] -= 1;
  hist[d + 1] += 1;
  M_[atom_[target]] += 1;

  auto [f, atom] = model_.sample(rng_);
  rec.new_fitness = f;
  add_vertex(f, atom);
  if (config_.log_edges && edge_log_.size() < CollectorConfig::edge_log_cap)
    edge_log_.emplace_back(rec.target, fitness_.size() - 1);
  const int64_t new_key = atom_[fitness_.size() - 1];
  rec.new_atom = new_key;
  auto& nhist = N_[new_key];
  if (nhist.size() < 2) nhist.resize(2, 0);
  nhist[1] += 1;
  M_[new_key] += 1;

  ++steps_;
  return rec;
}

void GrowthState::snapshot_into(Snapshot& snap) const {
  snap.step = steps_;
  snap.M = M_;
  snap.N = N_;
  snap.max_fitness = max_fitness_;
}

EmpiricalSummary GrowthState::snapshot_summary() const {
  EmpiricalSummary s;
  s.steps = steps_;
  s.seed = seed_;
  s.model_name = model_.name;
  s.discrete = model_.discrete();
  s.cell_edges = config_.cell_edges;
  snapshot_into(s.final_state);
  s.trajectories = trajectories_;
  s.zero_weight_events = zero_weight_events_;
  return s;
}

EmpiricalSummary GrowthState::run(uint64_t n) {
  std::vector<uint64_t> marks = config_.extra_checkpoints;
  for (uint64_t c = 1; c <= n; c *= 2) marks.push_back(c);
  marks.push_back(n);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

  EmpiricalSummary out;
  out.seed = seed_;
  out.model_name = model_.name;
  out.discrete = model_.discrete();
  out.cell_edges = config_.cell_edges;

  size_t next = 0;
  while (next < marks.size() && marks[next] < steps_) ++next;
  const uint64_t until = steps_ + n;
  while (steps_ < until) {
    step();
    if (next < marks.size() && marks[next] == steps_) {
      Snapshot snap;
      snapshot_into(snap);
      out.snapshots.push_back(std::move(snap));
      ++next;
      // tracked vertices log their degree at the same geometric times
      for (size_t t = 0; t < tracked_.size(); ++t)
        trajectories_[t].points.emplace_back(steps_, degree_[tracked_[t]]);
    }
  }
  out.steps = steps_;
  snapshot_into(out.final_state);
  out.trajectories = trajectories_;
  out.edges = edge_log_;
  out.zero_weight_events = zero_weight_events_;
  return out;
}

double GrowthState::audit_weight_total() {
  weights_.rebuild();
  return weights_.total();
}

int64_t GrowthState::N_of(int64_t key, int64_t k) const {
  auto it = N_.find(key);
  if (it == N_.end() || k < 0 || static_cast<size_t>(k) >= it->second.size()) return 0;
  return it->second[static_cast<size_t>(k)];
}

int64_t GrowthState::T_of(int64_t key, int64_t k) const {
  auto it = N_.find(key);
  if (it == N_.end()) return 0;
  const auto& hist = it->second;
  int64_t t = 0;
  for (size_t d = std::max<int64_t>(k, 1); d < hist.size(); ++d)
    t += static_cast<int64_t>(d) * hist[d];
  return t;
}

namespace {

std::string key_label(const EmpiricalSummary& s, int64_t key) {
  if (s.discrete || key < 0) return std::to_string(key);
  std::ostringstream os;
  os << "[" << s.cell_edges[static_cast<size_t>(key)] << ","
     << s.cell_edges[static_cast<size_t>(key) + 1] << ")";
  return os.str();
}

}  // namespace

std::string EmpiricalSummary::summary_csv() const {
  std::ostringstream os;
  os << "checkpoint,target,M,n,M_over_n\n";
  os.precision(12);
  auto emit = [&](const Snapshot& snap) {
    for (const auto& [key, m] : snap.M)
      os << snap.step << "," << key_label(*this, key) << "," << m << "," << snap.step << ","
         << (snap.step ? static_cast<double>(m) / static_cast<double>(snap.step) : 0.0) << "\n";
  };
  for (const auto& snap : snapshots) emit(snap);
  if (snapshots.empty() || snapshots.back().step != final_state.step) emit(final_state);
  return os.str();
}

std::string EmpiricalSummary::degrees_csv() const {
  std::ostringstream os;
  os << "checkpoint,target,degree,N\n";
  auto emit = [&](const Snapshot& snap) {
    for (const auto& [key, hist] : snap.N)
      for (size_t k = 1; k < hist.size(); ++k)
        if (hist[k] != 0)
          os << snap.step << "," << key_label(*this, key) << "," << k << "," << hist[k] << "\n";
  };
  if (!snapshots.empty()) emit(snapshots.back());
  if (snapshots.empty() || snapshots.back().step != final_state.step) emit(final_state);
  return os.str();
}

std::string EmpiricalSummary::edges_csv() const {
  std::ostringstream os;
  os << "step,target,new_vertex\n";
  for (size_t i = 0; i < edges.size(); ++i)
    os << i + 1 << "," << edges[i].first << "," << edges[i].second << "\n";
  return os.str();
}

std::string EmpiricalSummary::trajectories_csv() const {
  std::ostringstream os;
  os << "vertex,t,degree\n";
  for (const auto& t : trajectories)
    for (auto& [step, deg] : t.points) os << t.vertex << "," << step << "," << deg << "\n";
  return os.str();
}

nlohmann::json EmpiricalSummary::run_report() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["model"] = model_name;
  j["steps"] = steps;
  j["zero_weight_events"] = zero_weight_events;
  j["tracked_vertices"] = trajectories.size();
  j["max_fitness"] = final_state.max_fitness;
  return j;
}

}  // namespace pafit::graph
