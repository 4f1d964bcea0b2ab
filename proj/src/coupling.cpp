#include "pafit/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pafit/numeric.hpp"
#include "pafit/theory.hpp"
#include "pafit/urn.hpp"
#include "pafit/weight_tree.hpp"

namespace pafit::coupling {

FitnessModel truncate(const FitnessModel& model, int64_t I, TruncationSide side) {
  if (!model.discrete()) throw std::invalid_argument("truncate: discrete models only; use discretize");
  if (I < 1) throw std::invalid_argument("truncate: I >= 1");
  const double tail = model.mass_beyond(I);
  const int64_t kept = model.kind == FitnessKind::finite_discrete
                           ? std::min<int64_t>(I, static_cast<int64_t>(model.finite_size()))
                           : I;
  std::vector<double> atoms, probs;
  for (int64_t j = 1; j <= kept; ++j) {
    atoms.push_back(model.atom_fitness(j));
    probs.push_back(model.atom_prob(j));
  }
  if (tail > 0.0) {
    if (side == TruncationSide::upper) {
      if (!atoms.empty() && atoms.front() == 0.0) {
        probs.front() += tail;  // merge with an existing zero atom
      } else {
        atoms.insert(atoms.begin(), 0.0);
        probs.insert(probs.begin(), tail);
      }
    } else {
      const double h = model.sup;
      if (!atoms.empty() && atoms.back() == h) {
        probs.back() += tail;
      } else {
        atoms.push_back(h);
        probs.push_back(tail);
      }
    }
  }
  FitnessModel out = finite_discrete(std::move(atoms), std::move(probs));
  out.allow_zero_atom = true;
  out.name = model.name + (side == TruncationSide::upper ? "-upper" : "-lower") + "-I" +
             std::to_string(I);
  return out;
}

nlohmann::json to_json(const Violation& v) {
  return {{"step", v.step}, {"condition", v.condition}, {"detail", v.detail}};
}

std::string CoupledResult::violations_jsonl() const {
  std::ostringstream os;
  for (const auto& v : violations) os << to_json(v).dump() << "\n";
  return os.str();
}

namespace {

// One chain of the coupled triple. All chains share the vertex ids of the
// coupled classes (index <= I); each keeps its own per-vertex degrees there.
// Mass outside the coupled classes is kept at class granularity: the upper
// chain lumps it into a weightless bucket, the lower chain into the merged
// supremum atom, and the (F,Q) chain keeps one slot per tail class.
struct Chain {
  WeightTree vertex_tree{256};    // tracked vertices, weight f_v * degree
  std::vector<int64_t> deg;       // tracked-vertex degrees
  std::vector<int64_t> M;         // per class slot 0..I-1, slot I = rest
  std::vector<int64_t> vcount;    // vertices per slot (same layout)
  int64_t vertices = 0;

  bool track_degrees = false;
  std::vector<std::vector<int64_t>> N;  // per tracked class: degree histogram
  std::vector<std::vector<int64_t>> T;  // per tracked class: Σ_{k'>=k} k' N

  void init(int64_t I, bool full) {
    track_degrees = full;
    M.assign(static_cast<size_t>(I) + 1, 0);
    vcount.assign(static_cast<size_t>(I) + 1, 0);
    N.resize(static_cast<size_t>(I));
    T.resize(static_cast<size_t>(I));
  }

  void record_degree_birth(size_t slot, int64_t d) {
    if (!track_degrees) return;
    auto& hist = N[slot];
    const size_t dd = static_cast<size_t>(d);
    if (hist.size() <= dd) hist.resize(dd + 1, 0);
    hist[dd] += 1;
    auto& tt = T[slot];
    if (tt.size() <= dd) tt.resize(dd + 1, 0);
    for (size_t k = 1; k <= dd; ++k) tt[k] += d;
  }

  void record_degree_bump(size_t slot, int64_t d) {
    if (!track_degrees) return;
    auto& hist = N[slot];
    const size_t dd = static_cast<size_t>(d);
    if (hist.size() <= dd + 1) hist.resize(dd + 2, 0);
    hist[dd] -= 1;
    hist[dd + 1] += 1;
    auto& tt = T[slot];
    if (tt.size() <= dd + 1) tt.resize(dd + 2, 0);
    for (size_t k = 1; k <= dd; ++k) tt[k] += 1;
    tt[dd + 1] += d + 1;
  }
};

struct Coupled {
  const FitnessModel& base;
  int64_t I;
  bool full;
  Rng rng;
  double h;

  std::vector<uint32_t> vslot;   // shared: tracked vertex id -> class slot
  std::vector<double> slot_f;    // fitness per tracked slot
  Chain up, mid, low;
  WeightTree mid_tail{64};       // (F,Q) chain: tail classes, weight f_j M_j
  std::vector<double> tail_f;    // fitness per tail leaf
  std::vector<int64_t> tail_M;
  int64_t low_h_count = 0;       // lower chain: balls at the merged h atom
  int64_t up_rest_vertices = 0;  // upper chain: vertices beyond the classes
  int64_t low_rest_vertices = 0;
  int64_t mid_rest_vertices = 0;

  std::vector<Violation>* log = nullptr;
  uint64_t step_no = 0;
  uint64_t zero_weight_events = 0;

  Coupled(const FitnessModel& model, int64_t I_, uint64_t seed, bool full_)
      : base(model), I(I_), full(full_), rng(seed), h(model.sup) {
    for (int64_t j = 1; j <= I; ++j) slot_f.push_back(model.atom_fitness(j));
    up.init(I, full_);
    mid.init(I, full_);
    low.init(I, full_);
    const int64_t j0 = model.sample_index(rng);
    add_vertex(j0, 2);
  }

  double W_up() const { return up.vertex_tree.total(); }
  double W_mid() const { return mid.vertex_tree.total() + mid_tail.total(); }
  double W_low() const {
    return low.vertex_tree.total() + h * static_cast<double>(low_h_count);
  }

  // shared new vertex of index j with initial degree d (2 for the root)
  void add_vertex(int64_t j, int64_t d) {
    if (j <= I) {
      const size_t slot = static_cast<size_t>(j - 1);
      const double f = slot_f[slot];
      vslot.push_back(static_cast<uint32_t>(slot));
      for (Chain* c : {&up, &mid, &low}) {
        c->deg.push_back(d);
        c->vertex_tree.push_back(f * static_cast<double>(d));
        c->M[slot] += d;
        c->vcount[slot] += 1;
        c->vertices += 1;
        c->record_degree_birth(slot, d);
      }
      return;
    }
    // beyond the coupled classes: class slot for the (F,Q) chain, merged
    // buckets for the truncations
    const size_t leaf = static_cast<size_t>(j - I - 1);
    while (mid_tail.size() <= leaf) {
      mid_tail.push_back(0.0);
      tail_f.push_back(0.0);
      tail_M.push_back(0);
    }
    tail_f[leaf] = base.atom_fitness(j);
    tail_M[leaf] += d;
    mid_tail.add(leaf, tail_f[leaf] * static_cast<double>(d));
    mid.M.back() += d;
    mid.vertices += 1;
    mid_rest_vertices += 1;

    up.M.back() += d;
    up.vertices += 1;
    up_rest_vertices += 1;

    low_h_count += d;
    low.M.back() += d;
    low.vertices += 1;
    low_rest_vertices += 1;
  }

  void attach_tracked(Chain& c, size_t v) {
    const size_t slot = vslot[v];
    const int64_t d = c.deg[v];
    c.deg[v] += 1;
    c.vertex_tree.add(v, slot_f[slot]);
    c.M[slot] += 1;
    c.record_degree_bump(slot, d);
  }

  double attach_mid_tail() {
    const double wt = mid_tail.total();
    if (!(wt > 0.0)) throw std::logic_error("coupled run: residual branch with empty tail");
    const size_t leaf = mid_tail.sample(rng.u01() * wt);
    tail_M[leaf] += 1;
    mid_tail.add(leaf, tail_f[leaf]);
    mid.M.back() += 1;
    return tail_f[leaf];
  }

  void attach_low_h() {
    low_h_count += 1;
    low.M.back() += 1;
  }

  void violation(int condition, const std::string& detail) {
    if (log) log->push_back({step_no, condition, detail});
  }

  void check_fitness_order(double f_up, double f_mid, double f_low) {
    if (!(f_up <= f_mid && f_mid <= f_low))
      violation(1, "chosen fitness order " + std::to_string(f_up) + ", " + std::to_string(f_mid) +
                       ", " + std::to_string(f_low));
  }

  void check_link_sandwich() {
    for (int64_t j = 1; j <= I; ++j) {
      const size_t s = static_cast<size_t>(j - 1);
      if (!(low.M[s] <= mid.M[s] && mid.M[s] <= up.M[s]))
        violation(2, "class " + std::to_string(j) + ": " + std::to_string(low.M[s]) + " <= " +
                         std::to_string(mid.M[s]) + " <= " + std::to_string(up.M[s]));
    }
  }

  void check_tail_sandwich() {
    for (int64_t j = 1; j <= I; ++j) {
      const size_t s = static_cast<size_t>(j - 1);
      const size_t kmax = std::max({up.T[s].size(), mid.T[s].size(), low.T[s].size()});
      for (size_t k = 1; k < kmax; ++k) {
        const int64_t tl = k < low.T[s].size() ? low.T[s][k] : 0;
        const int64_t tm = k < mid.T[s].size() ? mid.T[s][k] : 0;
        const int64_t tu = k < up.T[s].size() ? up.T[s][k] : 0;
        if (!(tl <= tm && tm <= tu))
          violation(4, "class " + std::to_string(j) + " k=" + std::to_string(k) + ": " +
                           std::to_string(tl) + " <= " + std::to_string(tm) + " <= " +
                           std::to_string(tu));
      }
    }
  }

  void step() {
    const double Wu = W_up(), Wm = W_mid(), Wl = W_low();

    if (Wu > 0.0) {
      // one uniform selects the vertex in the upper chain; the same vertex's
      // choice probabilities are nested across the chains, so the residual
      // position decides which chains move with it
      const size_t v = up.vertex_tree.sample(rng.u01() * Wu);
      const size_t slot = vslot[v];
      const double f = slot_f[slot];
      const double p_up = f * static_cast<double>(up.deg[v]) / Wu;
      const double p_mid = f * static_cast<double>(mid.deg[v]) / Wm;
      const double p_low = f * static_cast<double>(low.deg[v]) / Wl;
      if (p_low > p_mid * (1.0 + 1e-12) || p_mid > p_up * (1.0 + 1e-12))
        violation(3, "vertex " + std::to_string(v) + " pick probabilities not nested");

      const double y = rng.u01() * p_up;
      attach_tracked(up, v);
      if (y < p_low) {
        attach_tracked(mid, v);
        attach_tracked(low, v);
        check_fitness_order(f, f, f);
      } else if (y < p_mid) {
        attach_tracked(mid, v);
        attach_low_h();
        check_fitness_order(f, f, h);
      } else {
        const double f_tail = attach_mid_tail();
        attach_low_h();
        check_fitness_order(f, f_tail, h);
      }
    } else if (Wm > 0.0) {
      // upper chain weightless (only zero-fitness vertices): it attaches
      // uniformly at random; the others follow their own laws, whose mass
      // sits entirely outside the coupled classes here
      ++zero_weight_events;
      const int64_t pick = static_cast<int64_t>(rng.below(static_cast<uint64_t>(up.vertices)));
      if (pick < static_cast<int64_t>(up.deg.size())) attach_tracked(up, static_cast<size_t>(pick));
      else up.M.back() += 1;
      const double f_tail = attach_mid_tail();
      attach_low_h();
      check_fitness_order(0.0, f_tail, h);
    } else {
      // all chains weightless: every vertex lives in a shared zero-fitness
      // class and the per-vertex degrees coincide; one shared pick applies
      ++zero_weight_events;
      const size_t v = static_cast<size_t>(rng.below(static_cast<uint64_t>(mid.vertices)));
      attach_tracked(up, v);
      attach_tracked(mid, v);
      attach_tracked(low, v);
    }

    const int64_t jn = base.sample_index(rng);
    add_vertex(jn, 1);
    check_link_sandwich();
  }

  void run(uint64_t n, ChainTrace& tu, ChainTrace& tm, ChainTrace& tl) {
    std::vector<uint64_t> marks;
    for (uint64_t c = 1; c <= n; c *= 2) marks.push_back(c);
    marks.push_back(n);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    size_t next = 0;

    for (step_no = 1; step_no <= n; ++step_no) {
      step();
      if (next < marks.size() && marks[next] == step_no) {
        ++next;
        push_row(tu, up);
        push_row(tm, mid);
        push_row(tl, low);
        tu.checkpoint_steps.push_back(step_no);
        tm.checkpoint_steps.push_back(step_no);
        tl.checkpoint_steps.push_back(step_no);
        if (full) check_tail_sandwich();
      }
    }
    finalize(tu, up);
    finalize(tm, mid);
    finalize(tl, low);
  }

  void push_row(ChainTrace& t, const Chain& c) { t.M_rows.push_back(c.M); }

  void finalize(ChainTrace& t, const Chain& c) {
    t.M_final = c.M;
    if (full) t.T_final = c.T;
  }
};

CoupledResult run_coupled(const FitnessModel& model, int64_t I, uint64_t n, uint64_t seed,
                          bool full) {
  if (!model.discrete()) throw std::invalid_argument("coupled runs: discrete models only");
  if (!model.bounded()) throw std::invalid_argument("coupled runs: bounded models only");
  if (model.kind == FitnessKind::finite_discrete)
    I = std::min<int64_t>(I, static_cast<int64_t>(model.finite_size()));
  CoupledResult out;
  out.I = I;
  out.steps = n;
  out.seed = seed;
  out.full = full;
  Coupled c(model, I, seed, full);
  c.log = &out.violations;
  c.run(n, out.upper, out.mid, out.lower);
  out.zero_weight_events = c.zero_weight_events;
  return out;
}

}  // namespace

CoupledResult coupled_triple_run(const FitnessModel& model, int64_t I, uint64_t n, uint64_t seed) {
  return run_coupled(model, I, n, seed, false);
}

CoupledResult coupled_degree_run(const FitnessModel& model, int64_t I, uint64_t n, uint64_t seed) {
  return run_coupled(model, I, n, seed, true);
}

DiscretizationSpec discretize(const FitnessModel& model, int64_t I) {
  if (model.kind != FitnessKind::continuous_density)
    throw std::invalid_argument("discretize: bounded continuous models only");
  if (I < 2) throw std::invalid_argument("discretize: I >= 2");
  DiscretizationSpec spec;
  spec.I = I;
  spec.h = model.sup;
  spec.eps = model.sup / static_cast<double>(I);
  spec.G = model.total_mass;
  spec.cell_mass = urn::discretization_cell_masses(model, I);
  for (int64_t i = 1; i <= I; ++i) {
    spec.f_hi.push_back(spec.h * static_cast<double>(i) / static_cast<double>(I));
    spec.f_lo.push_back(spec.h * static_cast<double>(i - 1) / static_cast<double>(I));
  }
  return spec;
}

DiscretizationRoot solve_discretization_lambda(const DiscretizationSpec& spec) {
  const double h = spec.h, eps = spec.eps, G = spec.G;
  auto lhs = [&](double lam) {
    double s = 0.0;
    for (size_t j = 0; j < spec.cell_mass.size(); ++j)
      s += spec.f_hi[j] * spec.cell_mass[j] / (lam - spec.f_lo[j]);
    s += h * (1.0 + G) * eps / (lam * (lam - (h - eps)));
    return s;
  };
  auto root = num::bisect_decreasing(lhs, 1.0, h - eps, std::max(2.0 * h, h + 1.0), 1e-14);
  if (!root.converged)
    throw std::runtime_error("solve_discretization_lambda: bracketing failed");
  DiscretizationRoot out;
  out.lambda = root.root;
  out.residual = root.residual;
  out.iterations = root.iterations;
  for (size_t j = 0; j < spec.cell_mass.size(); ++j)
    out.nu.push_back(out.lambda * spec.cell_mass[j] / (out.lambda - spec.f_lo[j]));
  out.nu.push_back((1.0 + G) * eps / (out.lambda - (h - eps)));
  out.nu_sum = 0.0;
  for (double v : out.nu) out.nu_sum += v;
  return out;
}

std::vector<ScanRow> lambda0_convergence_scan(const FitnessModel& model,
                                              const std::vector<int64_t>& Is) {
  std::vector<ScanRow> rows;
  const PhaseReport base = classify_phase(model);
  for (int64_t I : Is) {
    ScanRow row;
    row.I = I;
    row.lambda_target = base.lambda0;
    if (model.discrete()) {
      row.lambda_lower = solve_lambda0(truncate(model, I, TruncationSide::lower)).lambda0;
      row.lambda_upper = solve_lambda0(truncate(model, I, TruncationSide::upper)).lambda0;
      row.lambda_tilde = std::nan("");
    } else {
      row.lambda_lower = std::nan("");
      row.lambda_upper = std::nan("");
      row.lambda_tilde = solve_discretization_lambda(discretize(model, I)).lambda;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::ostringstream os;
  os << "I,lambda_lower,lambda_upper,lambda_tilde,lambda_target\n";
  os.precision(12);
  auto cell = [&](double v) {
    if (std::isnan(v))
      os << "";
    else
      os << v;
  };
  for (const auto& r : rows) {
    os << r.I << ",";
    cell(r.lambda_lower);
    os << ",";
    cell(r.lambda_upper);
    os << ",";
    cell(r.lambda_tilde);
    os << ",";
    cell(r.lambda_target);
    os << "\n";
  }
  return os.str();
}

}  // namespace pafit::coupling
