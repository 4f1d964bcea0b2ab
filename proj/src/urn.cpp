#include "pafit/urn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "pafit/numeric.hpp"
#include "pafit/weight_tree.hpp"

namespace pafit::urn {

void UrnSpec::validate() const {
  if (bins == 0 || activities.size() != bins || update_laws.size() != bins)
    throw std::invalid_argument("UrnSpec: inconsistent sizes");
  for (double a : activities)
    if (a < 0.0 || !std::isfinite(a)) throw std::invalid_argument("UrnSpec: bad activity");
  for (const auto& law : update_laws) {
    double p = 0.0;
    for (const auto& upd : law) {
      p += upd.prob;
      for (auto& [bin, delta] : upd.deltas) {
        if (bin >= bins) throw std::invalid_argument("UrnSpec: delta out of range");
        if (std::abs(delta) > max_update_magnitude)
          throw std::invalid_argument("UrnSpec: update exceeds declared bound");
      }
    }
    if (std::abs(p - 1.0) > 1e-12) throw std::invalid_argument("UrnSpec: update law not normalized");
  }
  double p0 = 0.0;
  for (const auto& [load, p] : initial_loads) {
    if (load.size() != bins) throw std::invalid_argument("UrnSpec: bad initial load");
    p0 += p;
  }
  if (std::abs(p0 - 1.0) > 1e-12) throw std::invalid_argument("UrnSpec: initial law not normalized");
}

nlohmann::json UrnSpec::to_json() const {
  nlohmann::json j;
  j["name"] = name;
  j["bins"] = bins;
  j["activities"] = activities;
  nlohmann::json laws = nlohmann::json::array();
  for (const auto& law : update_laws) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& upd : law) {
      nlohmann::json ds = nlohmann::json::array();
      for (auto& [bin, d] : upd.deltas) ds.push_back({{"bin", bin}, {"delta", d}});
      rows.push_back({{"prob", upd.prob}, {"deltas", ds}});
    }
    laws.push_back(rows);
  }
  j["update_laws"] = laws;
  return j;
}

UrnTrajectory run_urn(const UrnSpec& spec, uint64_t n, Rng& rng,
                      const std::vector<uint64_t>& extra_checkpoints) {
  spec.validate();
  UrnTrajectory out;

  // initial load
  std::vector<int64_t> x;
  {
    double u = rng.u01();
    for (const auto& [load, p] : spec.initial_loads) {
      if (u < p || &load == &spec.initial_loads.back().first) {
        x = load;
        break;
      }
      u -= p;
    }
  }

  // per-bin cumulative outcome probabilities for inversion
  std::vector<std::vector<double>> cum(spec.bins);
  for (size_t i = 0; i < spec.bins; ++i) {
    double acc = 0.0;
    for (const auto& upd : spec.update_laws[i]) cum[i].push_back(acc += upd.prob);
  }

  WeightTree weights(spec.bins);
  for (size_t i = 0; i < spec.bins; ++i)
    weights.push_back(spec.activities[i] * static_cast<double>(x[i]));
  if (!(weights.total() > 0.0))
    throw std::invalid_argument("run_urn: initial activity-weighted load is zero");

  std::vector<uint64_t> marks = extra_checkpoints;
  for (uint64_t c = 1; c <= n; c *= 2) marks.push_back(c);
  marks.push_back(n);
  std::sort(marks.begin(), marks.end());
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  size_t next_mark = 0;

  for (uint64_t step = 1; step <= n; ++step) {
    const double total = weights.total();
    if (!(total > 0.0)) throw TenabilityError("run_urn: total weight vanished", step, 0);
    const size_t bin = weights.sample(rng.u01() * total);

    const auto& law = spec.update_laws[bin];
    size_t pick = law.size() - 1;
    if (law.size() > 1) {
      const double u = rng.u01();
      pick = static_cast<size_t>(std::upper_bound(cum[bin].begin(), cum[bin].end() - 1, u) -
                                 cum[bin].begin());
    }
    for (auto& [b, d] : law[pick].deltas) {
      x[b] += d;
      if (x[b] < 0)
        throw TenabilityError("run_urn: negative count in bin " + std::to_string(b), step, b);
      weights.set(b, spec.activities[b] * static_cast<double>(x[b]));
    }
    while (next_mark < marks.size() && marks[next_mark] == step) {
      out.checkpoint_steps.push_back(step);
      out.counts.push_back(x);
      ++next_mark;
    }
  }
  out.final_counts = x;
  out.steps = n;
  return out;
}

Matrix mean_matrix(const UrnSpec& spec) {
  Matrix A;
  A.n = spec.bins;
  A.a.assign(A.n * A.n, 0.0);
  for (size_t i = 0; i < spec.bins; ++i)
    for (const auto& upd : spec.update_laws[i])
      for (auto& [b, d] : upd.deltas)
        A.at(i, b) += spec.activities[i] * upd.prob * static_cast<double>(d);
  return A;
}

namespace {

// power iteration for the dominant pair of a nonnegative matrix given by matvec
template <class MatVec>
std::pair<double, std::vector<double>> power_pair(const MatVec& mv, size_t n, double tol,
                                                  int max_iter, int& iters, double& resid) {
  std::vector<double> v(n, 1.0 / static_cast<double>(n)), w(n);
  double lambda = 0.0;
  double best = num::infinity;
  int stalled = 0;
  for (iters = 0; iters < max_iter; ++iters) {
    mv(v, w);
    double num = 0.0, den = 0.0, norm1 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      num += w[i] * v[i];
      den += v[i] * v[i];
      norm1 += std::abs(w[i]);
    }
    lambda = num / den;
    double r2 = 0.0, v2 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = w[i] - lambda * v[i];
      r2 += d * d;
      v2 += v[i] * v[i];
    }
    resid = std::sqrt(r2 / v2);
    for (size_t i = 0; i < n; ++i) v[i] = w[i] / norm1;
    if (resid <= tol) break;
    // stop once rounding noise dominates
    if (resid < 0.99 * best) {
      best = resid;
      stalled = 0;
    } else if (++stalled > 400) {
      break;
    }
  }
  return {lambda, v};
}

}  // namespace

PerronResult perron(const Matrix& A, const std::vector<double>& activities, double tol,
                    int max_iter) {
  const size_t n = A.n;
  if (n == 0 || activities.size() != n) throw std::invalid_argument("perron: bad inputs");

  // restrict to the positive-activity block; dummy counting bins are extended after
  std::vector<size_t> act;  // block indices
  std::vector<size_t> pos(n, SIZE_MAX);
  for (size_t i = 0; i < n; ++i)
    if (activities[i] > 0.0) {
      pos[i] = act.size();
      act.push_back(i);
    }
  const size_t m = act.size();
  if (m == 0) throw std::invalid_argument("perron: no positive-activity bin");

  double shift = 0.0;
  for (size_t i = 0; i < m; ++i) shift = std::max(shift, -A.at(act[i], act[i]));
  shift += 1.0;

  const bool dense = m <= 256;
  Matrix B;  // dense shifted block (and its squared form for acceleration)
  std::vector<std::vector<std::pair<uint32_t, double>>> rows, cols;  // sparse
  if (dense) {
    B.n = m;
    B.a.assign(m * m, 0.0);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) B.at(i, j) = A.at(act[i], act[j]) + (i == j ? shift : 0.0);
  } else {
    rows.resize(m);
    cols.resize(m);
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < m; ++j) {
        double val = A.at(act[i], act[j]) + (i == j ? shift : 0.0);
        if (val != 0.0) {
          rows[i].emplace_back(static_cast<uint32_t>(j), val);
          cols[j].emplace_back(static_cast<uint32_t>(i), val);
        }
      }
  }

  auto mv_left = [&](const std::vector<double>& v, std::vector<double>& w) {
    // w = B^T v (left eigenvector iteration)
    std::fill(w.begin(), w.end(), 0.0);
    if (dense) {
      for (size_t i = 0; i < m; ++i) {
        const double vi = v[i];
        if (vi == 0.0) continue;
        const double* row = &B.a[i * m];
        for (size_t j = 0; j < m; ++j) w[j] += row[j] * vi;
      }
    } else {
      for (size_t j = 0; j < m; ++j)
        for (auto& [i, val] : cols[j]) w[j] += val * v[i];
    }
  };
  auto mv_right = [&](const std::vector<double>& v, std::vector<double>& w) {
    std::fill(w.begin(), w.end(), 0.0);
    if (dense) {
      for (size_t i = 0; i < m; ++i) {
        const double* row = &B.a[i * m];
        double s = 0.0;
        for (size_t j = 0; j < m; ++j) s += row[j] * v[j];
        w[i] = s;
      }
    } else {
      for (size_t i = 0; i < m; ++i)
        for (auto& [j, val] : rows[i]) w[i] += val * v[j];
    }
  };

  PerronResult out;
  int it_l = 0, it_r = 0;
  double res_l = 0.0, res_r = 0.0;
  auto [lam_l, vblk] = power_pair(mv_left, m, tol, max_iter, it_l, res_l);
  auto [lam_r, ublk] = power_pair(mv_right, m, tol, max_iter, it_r, res_r);
  out.iterations = std::max(it_l, it_r);
  out.residual = std::max(res_l, res_r);
  if (out.residual > 1e-9)
    throw std::runtime_error("perron: power iteration did not converge (possible reducibility)");
  out.lambda1 = 0.5 * (lam_l + lam_r) - shift;

  // extend to full index set
  out.v1.assign(n, 0.0);
  out.u1.assign(n, 0.0);
  for (size_t i = 0; i < m; ++i) {
    out.v1[act[i]] = vblk[i];
    out.u1[act[i]] = ublk[i];
  }
  // dummy bins: v satisfies λ v_d = Σ_i v_i A_{i,d} (their rows are zero)
  for (size_t d = 0; d < n; ++d) {
    if (activities[d] > 0.0) continue;
    double s = 0.0;
    for (size_t i = 0; i < m; ++i) s += out.v1[act[i]] * A.at(act[i], d);
    out.v1[d] = s / out.lambda1;
  }

  // normalizations: a·v1 = 1, then u1·v1 = 1
  double av = 0.0;
  for (size_t i = 0; i < n; ++i) av += activities[i] * out.v1[i];
  if (!(std::abs(av) > 0.0)) throw std::runtime_error("perron: degenerate eigenvector");
  for (double& x : out.v1) x /= av;
  double uv = 0.0;
  for (size_t i = 0; i < n; ++i) uv += out.u1[i] * out.v1[i];
  for (double& x : out.u1) x /= uv;
  return out;
}

PerronResult perron(const UrnSpec& spec) { return perron(mean_matrix(spec), spec.activities); }

namespace {

UrnUpdate make_update(std::map<uint32_t, int32_t> deltas, double prob) {
  UrnUpdate u;
  u.prob = prob;
  for (auto& [b, d] : deltas)
    if (d != 0) u.deltas.emplace_back(b, d);
  return u;
}

}  // namespace

UrnSpec degree_urn(int64_t k) {
  if (k < 1) throw std::invalid_argument("degree_urn: k >= 1");
  UrnSpec spec;
  const size_t q = static_cast<size_t>(k) + 1;
  spec.bins = q;
  spec.name = "degree";
  spec.activities.assign(q, 1.0);
  spec.max_update_magnitude = static_cast<int32_t>(k + 1);
  spec.update_laws.resize(q);
  // picking a degree-1 vertex: its edge moves to the degree-2 bin and the new
  // vertex contributes one degree-1 edge end; net (0, +2)
  spec.update_laws[0] = {make_update({{1, 2}}, 1.0)};
  for (int64_t i = 2; i <= k; ++i) {
    std::map<uint32_t, int32_t> d;
    d[0] += 1;
    d[static_cast<uint32_t>(i - 1)] -= static_cast<int32_t>(i);
    d[static_cast<uint32_t>(i)] += static_cast<int32_t>(i + 1);
    spec.update_laws[static_cast<size_t>(i - 1)] = {make_update(std::move(d), 1.0)};
  }
  // overflow bin: stays put, plus the new degree-1 edge end
  spec.update_laws[q - 1] = {make_update({{0, 1}, {static_cast<uint32_t>(q - 1), 1}}, 1.0)};
  // one vertex with a self-loop: two edge ends at degree 2
  std::vector<int64_t> x0(q, 0);
  x0[std::min<size_t>(1, q - 1)] = 2;
  spec.initial_loads = {{x0, 1.0}};
  return spec;
}

UrnSpec fitness_urn(const FitnessModel& model) {
  if (model.kind != FitnessKind::finite_discrete)
    throw std::invalid_argument("fitness_urn: finite discrete models only");
  const size_t J = model.finite_size();
  UrnSpec spec;
  spec.bins = J;
  spec.name = "fitness";
  spec.activities = model.atoms;
  spec.max_update_magnitude = 2;
  spec.update_laws.resize(J);
  for (size_t i = 0; i < J; ++i) {
    for (size_t j = 0; j < J; ++j) {
      std::map<uint32_t, int32_t> d;
      d[static_cast<uint32_t>(i)] += 1;  // chosen endpoint
      d[static_cast<uint32_t>(j)] += 1;  // new vertex endpoint
      spec.update_laws[i].push_back(make_update(std::move(d), model.probs[j]));
    }
  }
  for (size_t i = 0; i < J; ++i) {
    std::vector<int64_t> x0(J, 0);
    x0[i] = 2;
    spec.initial_loads.emplace_back(std::move(x0), model.probs[i]);
  }
  return spec;
}

UrnSpec joint_urn(const FitnessModel& model, int64_t k) {
  if (model.kind != FitnessKind::finite_discrete)
    throw std::invalid_argument("joint_urn: finite discrete models only");
  if (k < 1) throw std::invalid_argument("joint_urn: k >= 1");
  const size_t J = model.finite_size();
  const size_t r = static_cast<size_t>(k) + 1;
  UrnSpec spec;
  spec.bins = J * r;
  spec.name = "joint";
  spec.max_update_magnitude = static_cast<int32_t>(k + 1);
  spec.activities.resize(spec.bins);
  spec.update_laws.resize(spec.bins);
  auto idx = [r](size_t i, size_t l) { return static_cast<uint32_t>(i * r + (l - 1)); };
  for (size_t i = 0; i < J; ++i)
    for (size_t l = 1; l <= r; ++l) spec.activities[idx(i, l)] = model.atoms[i];

  for (size_t i = 0; i < J; ++i) {
    for (size_t l = 1; l <= r; ++l) {
      auto& law = spec.update_laws[idx(i, l)];
      for (size_t ip = 0; ip < J; ++ip) {
        std::map<uint32_t, int32_t> d;
        d[idx(ip, 1)] += 1;  // new vertex: one ball at (i', 1)
        if (l < r) {
          d[idx(i, l)] -= static_cast<int32_t>(l);
          d[idx(i, l + 1)] += static_cast<int32_t>(l + 1);
        } else {
          d[idx(i, r)] += 1;  // overflow: stays, one more edge end
        }
        law.push_back(make_update(std::move(d), model.probs[ip]));
      }
    }
  }
  for (size_t i = 0; i < J; ++i) {
    std::vector<int64_t> x0(spec.bins, 0);
    x0[idx(i, std::min<size_t>(2, r))] = 2;  // root with self-loop: degree 2
    spec.initial_loads.emplace_back(std::move(x0), model.probs[i]);
  }
  return spec;
}

std::vector<double> discretization_cell_masses(const FitnessModel& model, int64_t I) {
  if (model.kind != FitnessKind::continuous_density)
    throw std::invalid_argument("discretization: bounded continuous models only");
  const double h = model.sup;
  std::vector<double> q(static_cast<size_t>(I));
  for (int64_t i = 1; i <= I; ++i) {
    const double lo = h * static_cast<double>(i - 1) / static_cast<double>(I);
    const double hi = h * static_cast<double>(i) / static_cast<double>(I);
    if (model.cdf) {
      q[static_cast<size_t>(i - 1)] = model.cdf(hi) - model.cdf(lo);
    } else {
      q[static_cast<size_t>(i - 1)] = num::integrate(model.pdf, lo, hi, 1e-12).value;
    }
  }
  return q;
}

UrnSpec discretization_urn(const FitnessModel& model, int64_t I) {
  if (I < 2) throw std::invalid_argument("discretization_urn: I >= 2");
  const double h = model.sup;
  const double G = model.total_mass;
  const auto qt = discretization_cell_masses(model, I);
  const size_t q = static_cast<size_t>(I) + 1;

  UrnSpec spec;
  spec.bins = q;
  spec.name = "discretization";
  spec.max_update_magnitude = 2;
  spec.activities.resize(q);
  for (int64_t i = 1; i <= I; ++i)
    spec.activities[static_cast<size_t>(i - 1)] = h * static_cast<double>(i) / static_cast<double>(I);
  spec.activities[q - 1] = h;

  spec.update_laws.resize(q);
  const double tail_prob = 1.0 - G;  // i* = ∞: no new tracked ball
  for (int64_t i = 1; i <= I; ++i) {
    auto& law = spec.update_laws[static_cast<size_t>(i - 1)];
    const double f_lo = h * static_cast<double>(i - 1) / static_cast<double>(I);
    const double f_hi = h * static_cast<double>(i) / static_cast<double>(I);
    const double keep = f_lo / f_hi;  // P(γ_i = 1)
    for (int64_t is = 1; is <= I + 1; ++is) {
      const double p_star = is <= I ? qt[static_cast<size_t>(is - 1)] : tail_prob;
      if (p_star <= 0.0) continue;
      for (int gamma = 0; gamma <= 1; ++gamma) {
        const double pg = gamma ? keep : 1.0 - keep;
        if (pg <= 0.0) continue;
        std::map<uint32_t, int32_t> d;
        if (gamma)
          d[static_cast<uint32_t>(i - 1)] += 1;
        else
          d[static_cast<uint32_t>(q - 1)] += 1;
        if (is <= I) d[static_cast<uint32_t>(is - 1)] += 1;
        law.push_back(make_update(std::move(d), p_star * pg));
      }
    }
  }
  auto& top = spec.update_laws[q - 1];
  for (int64_t is = 1; is <= I + 1; ++is) {
    const double p_star = is <= I ? qt[static_cast<size_t>(is - 1)] : tail_prob;
    if (p_star <= 0.0) continue;
    std::map<uint32_t, int32_t> d;
    d[static_cast<uint32_t>(q - 1)] += 1;
    if (is <= I) d[static_cast<uint32_t>(is - 1)] += 1;
    top.push_back(make_update(std::move(d), p_star));
  }

  // initial vertex: conditional draw from the kept cells when G < 1
  for (int64_t i = 1; i <= I; ++i) {
    const double p = qt[static_cast<size_t>(i - 1)] / G;
    if (p <= 0.0) continue;
    std::vector<int64_t> x0(q, 0);
    x0[static_cast<size_t>(i - 1)] = 2;
    spec.initial_loads.emplace_back(std::move(x0), p);
  }
  return spec;
}

}  // namespace pafit::urn
