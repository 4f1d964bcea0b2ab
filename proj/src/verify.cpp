#include "pafit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pafit::verify {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string ComparisonReport::csv() const {
  std::ostringstream os;
  os << "target,theory,empirical,abs_error,rel_error,pass\n";
  os.precision(12);
  for (const auto& r : rows)
    os << r.target << "," << r.theory << "," << r.empirical << "," << r.abs_error << ","
       << r.rel_error << "," << (r.pass ? 1 : 0) << "\n";
  return os.str();
}

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json j;
  j["tolerance"] = tolerance;
  j["checkpoint"] = checkpoint;
  j["seeds"] = seeds;
  j["pass"] = pass;
  nlohmann::json rs = nlohmann::json::array();
  for (const auto& r : rows)
    rs.push_back({{"target", r.target},
                  {"theory", r.theory},
                  {"empirical", r.empirical},
                  {"abs_error", r.abs_error},
                  {"rel_error", r.rel_error},
                  {"pass", r.pass}});
  j["rows"] = rs;
  return j;
}

ComparisonReport compare_link_shares(const std::vector<graph::EmpiricalSummary>& summaries,
                                     const FitnessModel& model, const PhaseReport& rep,
                                     double tolerance) {
  if (summaries.empty()) throw std::invalid_argument("compare_link_shares: no summaries");
  ComparisonReport report;
  report.tolerance = tolerance;
  report.seeds = summaries.size();
  report.checkpoint = summaries.front().steps;
  for (const auto& s : summaries) {
    if (s.model_name != model.name || s.steps != report.checkpoint)
      throw std::invalid_argument("compare_link_shares: summary/model mismatch");
  }

  auto add_row = [&](const std::string& target, double theory, double empirical) {
    ComparisonRow row;
    row.target = target;
    row.theory = theory;
    row.empirical = empirical;
    row.abs_error = std::abs(theory - empirical);
    row.rel_error = theory != 0.0 ? row.abs_error / std::abs(theory) : row.abs_error;
    row.pass = row.abs_error <= tolerance;
    report.rows.push_back(row);
    report.pass = report.pass && row.pass;
  };

  if (model.discrete()) {
    std::set<int64_t> keys;
    for (const auto& s : summaries)
      for (const auto& [key, m] : s.final_state.M) keys.insert(key);
    for (int64_t key : keys) {
      std::vector<double> shares;
      for (const auto& s : summaries)
        shares.push_back(static_cast<double>(s.M_at(key)) / static_cast<double>(s.steps));
      add_row("atom " + std::to_string(key), nu_atom(model, rep, key), median(shares));
    }
  } else {
    const auto& edges = summaries.front().cell_edges;
    for (size_t c = 0; c + 1 < edges.size(); ++c) {
      std::vector<double> shares;
      for (const auto& s : summaries)
        shares.push_back(static_cast<double>(s.M_at(static_cast<int64_t>(c))) /
                         static_cast<double>(s.steps));
      std::ostringstream label;
      label << "[" << edges[c] << "," << edges[c + 1] << ")";
      add_row(label.str(), nu_interval(model, rep, edges[c], edges[c + 1]), median(shares));
    }
  }
  return report;
}

ExponentEstimate estimate_tail_exponent(const graph::EmpiricalSummary& summary, int64_t atom,
                                        int64_t kmin, int64_t kmax) {
  const auto it = summary.final_state.N.find(atom);
  if (it == summary.final_state.N.end())
    throw std::invalid_argument("estimate_tail_exponent: unknown fitness class");
  const auto& hist = it->second;

  // CCDF over vertex counts: C(k) = #vertices with degree >= k
  std::vector<int64_t> ccdf(hist.size() + 1, 0);
  for (size_t k = hist.size(); k-- > 0;) ccdf[k] = hist[k] + ccdf[k + 1];

  if (kmax <= 0) {
    // largest degree still holding >= 20 vertices
    kmax = kmin;
    for (size_t k = static_cast<size_t>(kmin); k < hist.size(); ++k)
      if (hist[k] >= 20) kmax = static_cast<int64_t>(k);
  }
  if (kmax <= kmin) kmax = kmin + 1;

  ExponentEstimate est;
  est.kmin = kmin;
  est.kmax = kmax;

  // discrete Hill-type MLE of the survival model P(D >= k) = (kmin/k)^γ
  // conditional on D >= kmin; the degree laws here are pure power laws in
  // the tail function, so this parameterization carries the least head bias
  int64_t count = 0;
  for (size_t k = static_cast<size_t>(kmin); k < hist.size(); ++k) count += hist[k];
  if (count < 200) throw std::invalid_argument("estimate_tail_exponent: fewer than 200 vertices");
  est.count = count;
  auto loglik = [&](double g) {
    double L = 0.0;
    for (size_t k = static_cast<size_t>(kmin); k < hist.size(); ++k) {
      if (hist[k] <= 0) continue;
      const double lo = std::pow(static_cast<double>(kmin) / static_cast<double>(k), g);
      const double hi = std::pow(static_cast<double>(kmin) / static_cast<double>(k + 1), g);
      L += static_cast<double>(hist[k]) * std::log(std::max(lo - hi, 1e-300));
    }
    return L;
  };
  double glo = 0.05, ghi = 50.0;
  for (int it = 0; it < 200; ++it) {
    const double m1 = glo + (ghi - glo) / 3.0, m2 = ghi - (ghi - glo) / 3.0;
    if (loglik(m1) < loglik(m2))
      glo = m1;
    else
      ghi = m2;
  }
  est.mle = 0.5 * (glo + ghi);
  // observed information
  const double dg = 1e-4;
  const double d2 =
      (loglik(est.mle + dg) - 2.0 * loglik(est.mle) + loglik(est.mle - dg)) / (dg * dg);
  est.mle_stderr = d2 < 0.0 ? 1.0 / std::sqrt(-d2) : est.mle / std::sqrt(static_cast<double>(count));

  // least squares on log CCDF over [kmin, kmax]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  size_t pts = 0;
  for (int64_t k = kmin; k <= kmax; ++k) {
    if (static_cast<size_t>(k) >= ccdf.size() || ccdf[static_cast<size_t>(k)] <= 0) continue;
    const double lx = std::log(static_cast<double>(k));
    const double ly = std::log(static_cast<double>(ccdf[static_cast<size_t>(k)]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++pts;
  }
  if (pts >= 3) {
    const double n = static_cast<double>(pts);
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    est.ls = -slope;
    // residual-based stderr
    const double intercept = (sy - slope * sx) / n;
    double ss = 0.0;
    for (int64_t k = kmin; k <= kmax; ++k) {
      if (static_cast<size_t>(k) >= ccdf.size() || ccdf[static_cast<size_t>(k)] <= 0) continue;
      const double lx = std::log(static_cast<double>(k));
      const double ly = std::log(static_cast<double>(ccdf[static_cast<size_t>(k)]));
      const double r = ly - (intercept + slope * lx);
      ss += r * r;
    }
    const double var = ss / std::max(1.0, n - 2.0) / (sxx - sx * sx / n);
    est.ls_stderr = std::sqrt(std::max(0.0, var));
  }
  return est;
}

SlopeEstimate vertex_exponent(const graph::Trajectory& trajectory, uint64_t t0) {
  SlopeEstimate out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (auto& [t, d] : trajectory.points) {
    if (t < t0 || d <= 0) continue;
    pts.emplace_back(std::log(static_cast<double>(t)), std::log(static_cast<double>(d)));
  }
  if (pts.size() < 10)
    throw std::invalid_argument("vertex_exponent: fewer than 10 checkpoints past t0");
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(pts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (auto& [x, y] : pts) {
    const double r = y - (intercept + slope * x);
    ss += r * r;
  }
  out.slope = slope;
  out.stderr_ = std::sqrt(std::max(0.0, ss / std::max(1.0, n - 2.0) / (sxx - sx * sx / n)));
  out.points = pts.size();
  return out;
}

CondensationTable condensation_scan(const graph::EmpiricalSummary& summary,
                                    const FitnessModel& model, const PhaseReport& rep, double eps,
                                    const std::vector<uint64_t>& at_steps) {
  CondensationTable table;
  table.phase_warning = !rep.condensation_formulas();
  const double h = model.sup;
  const double lo = h - eps;
  const auto& edges = summary.cell_edges;

  auto mass_row = [&](const graph::Snapshot& snap) {
    CondensationRow row;
    row.n = snap.step;
    row.max_fitness = snap.max_fitness;
    for (const auto& [key, m] : snap.M) {
      if (key < 0) continue;
      const double a = edges[static_cast<size_t>(key)];
      const double share = static_cast<double>(m) / static_cast<double>(snap.step);
      if (a >= lo - 1e-12)
        row.top_mass += share;
      else
        row.below_mass += share;
    }
    return row;
  };

  for (uint64_t want : at_steps) {
    for (const auto& snap : summary.snapshots) {
      if (snap.step == want) {
        table.rows.push_back(mass_row(snap));
        break;
      }
    }
  }
  if (summary.final_state.step > 0 &&
      (table.rows.empty() || table.rows.back().n != summary.final_state.step)) {
    bool wanted = at_steps.empty() ||
                  std::find(at_steps.begin(), at_steps.end(), summary.final_state.step) !=
                      at_steps.end();
    if (wanted) table.rows.push_back(mass_row(summary.final_state));
  }

  table.increasing = table.rows.size() >= 2;
  for (size_t i = 1; i < table.rows.size(); ++i)
    table.increasing = table.increasing && table.rows[i].top_mass > table.rows[i - 1].top_mass;
  return table;
}

}  // namespace pafit::verify
