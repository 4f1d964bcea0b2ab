#include "pafit/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "pafit/numeric.hpp"

namespace pafit {

const char* to_string(Phase p) {
  switch (p) {
    case Phase::first_mover_advantage: return "first-mover-advantage";
    case Phase::fit_get_richer: return "fit-get-richer";
    case Phase::fit_get_richer_boundary: return "fit-get-richer-boundary";
    case Phase::innovation_pays_off: return "innovation-pays-off";
    case Phase::unbounded_degenerate: return "unbounded-degenerate";
  }
  return "?";
}

namespace {

double occupation_finite(const FitnessModel& m, double lambda) {
  double s = 0.0;
  for (size_t j = 0; j < m.atoms.size(); ++j) {
    const double f = m.atoms[j];
    if (f == 0.0) continue;
    const double gap = lambda - f;
    if (gap <= 0.0) return num::infinity;
    s += f * m.probs[j] / gap;
  }
  return s;
}

double occupation_countable(const FitnessModel& m, double lambda) {
  // partial sums with a certified tail; terms are f_j q_j/(λ - f_j)
  double s = 0.0;
  int64_t j = 1;
  int64_t block = 64;
  for (;;) {
    const int64_t end = j + block;
    for (; j < end; ++j) {
      const double f = m.atom_at(j);
      const double gap = lambda - f;
      if (gap <= 0.0) return num::infinity;
      s += f * m.prob_at(j) / gap;
    }
    double tail;
    if (m.occupation_tail_at) {
      tail = m.occupation_tail_at(j - 1, lambda);
    } else if (lambda > m.sup) {
      tail = m.sup * m.tail_mass_at(j - 1) / (lambda - m.sup);
    } else {
      tail = num::infinity;  // no certified bound at λ = h without a rule
    }
    if (!std::isfinite(tail)) {
      if (block > (int64_t(1) << 22)) return num::infinity;
      block *= 4;
      continue;
    }
    if (tail <= 1e-13 * std::max(1.0, s) || block > (int64_t(1) << 22)) return s + tail;
    block *= 4;
  }
}

double occupation_continuous(const FitnessModel& m, double lambda) {
  const bool at_sup = lambda == m.sup;
  if (at_sup && m.pdf_positive_at_sup) return num::infinity;
  auto f = [&](double x) { return x * m.pdf(x); };
  auto res = num::integrate_over_gap(f, 0.0, m.sup, lambda, 1e-11);
  return res.diverged ? num::infinity : res.value;
}

}  // namespace

double occupation_integral(const FitnessModel& model, double lambda) {
  const double h = model.sup;
  if (!model.bounded()) throw std::domain_error("occupation_integral: bounded models only");
  if (lambda < h) throw std::domain_error("occupation_integral: lambda < sup fitness");
  switch (model.kind) {
    case FitnessKind::finite_discrete: return occupation_finite(model, lambda);
    case FitnessKind::countable_discrete: return occupation_countable(model, lambda);
    default: return occupation_continuous(model, lambda);
  }
}

PhaseReport solve_lambda0(const FitnessModel& model) {
  if (!model.bounded()) throw std::domain_error("solve_lambda0: bounded models only");
  const double h = model.sup;
  PhaseReport rep;
  rep.I_at_h = occupation_integral(model, h);

  if (!std::isfinite(rep.I_at_h) || rep.I_at_h > 1.0 + 1e-9) {
    auto g = [&](double lambda) { return occupation_integral(model, lambda); };
    auto root = num::bisect_decreasing(g, 1.0, h, std::max(2.0 * h, h + 1.0), 1e-12);
    if (!root.converged)
      throw std::runtime_error("solve_lambda0: bisection failed to bracket the root");
    rep.lambda0 = root.root;
    rep.residual = root.residual;
    rep.iterations = root.iterations;
    rep.bracket_lo = root.bracket_lo;
    rep.bracket_hi = root.bracket_hi;
    rep.phase = Phase::fit_get_richer;
    return rep;
  }
  rep.lambda0 = h;
  if (rep.I_at_h >= 1.0 - 1e-9) {
    rep.phase = Phase::fit_get_richer_boundary;
    rep.missing_mass = 0.0;
  } else {
    rep.phase = Phase::innovation_pays_off;
    rep.missing_mass = 1.0 - rep.I_at_h;
  }
  return rep;
}

PhaseReport classify_phase(const FitnessModel& model) {
  if (!model.bounded()) {
    PhaseReport rep;
    rep.phase = Phase::unbounded_degenerate;
    rep.lambda0 = num::infinity;
    rep.I_at_h = num::infinity;
    return rep;
  }
  if (model.kind == FitnessKind::finite_discrete && model.finite_size() == 1) {
    PhaseReport rep = solve_lambda0(model);
    rep.phase = Phase::first_mover_advantage;
    return rep;
  }
  return solve_lambda0(model);
}

double nu_atom(const FitnessModel& model, const PhaseReport& rep, int64_t j) {
  if (rep.phase == Phase::unbounded_degenerate) return model.atom_prob(j);
  const double f = model.atom_fitness(j);
  const double q = model.atom_prob(j);
  return rep.lambda0 * q / (rep.lambda0 - f);
}

double nu_interval(const FitnessModel& model, const PhaseReport& rep, double a, double b) {
  if (a > b) throw std::invalid_argument("nu_interval: a > b");
  const double h = model.sup;
  if (rep.phase == Phase::unbounded_degenerate) {
    if (!std::isfinite(b)) return 2.0 - model.cdf(a);
    return model.cdf(b) - model.cdf(a);
  }
  if (a < 0.0 || b > h) throw std::invalid_argument("nu_interval: outside [0, h]");
  if (model.discrete()) {
    // sum of atom shares within [a, b]
    double s = 0.0;
    if (model.kind == FitnessKind::finite_discrete) {
      for (size_t i = 0; i < model.atoms.size(); ++i)
        if (model.atoms[i] >= a && model.atoms[i] <= b)
          s += nu_atom(model, rep, static_cast<int64_t>(i) + 1);
      return s;
    }
    if (b >= h) return 2.0 - nu_interval(model, rep, 0.0, a);
    for (int64_t j = 1;; ++j) {
      const double f = model.atom_at(j);
      if (f > b) break;
      if (f >= a) s += nu_atom(model, rep, j);
    }
    return s;
  }
  if (b >= h) {
    // condensate-inclusive share: exact complement of the lower part
    return a <= 0.0 ? 2.0 : 2.0 - nu_interval(model, rep, 0.0, a);
  }
  auto res = num::integrate_over_gap(model.pdf, a, b, rep.lambda0, 1e-11);
  if (res.diverged) throw std::runtime_error("nu_interval: divergent interval integral");
  return rep.lambda0 * res.value;
}

double eta(const FitnessModel& model, const PhaseReport& rep, int64_t j, int64_t k) {
  if (!model.discrete()) throw std::invalid_argument("eta: discrete models only");
  if (k < 1) throw std::invalid_argument("eta: degree must be >= 1");
  const double f = model.atom_fitness(j);
  const double q = model.atom_prob(j);
  const double lam = rep.lambda0;
  if (f == 0.0) return k == 1 ? q : 0.0;  // never-selected vertices stay at degree 1
  // prefactor λ0 q_j/(λ0 + f_j); the alternative ν_j-prefactor normalization
  // fails both the flat-fitness k=1 value and Σ_k k·η = ν
  const double pref = lam * q / (lam + f);
  const double s = lam / f;
  if (k <= 1000) {
    double prod = 1.0;
    for (int64_t l = 2; l <= k; ++l) prod *= static_cast<double>(l) / (static_cast<double>(l) + s);
    return pref * prod / static_cast<double>(k);
  }
  // log-space: Π_{l=2..k} l/(l+s) = Γ(k+1)Γ(2+s) / Γ(k+1+s)
  const double lp = std::lgamma(static_cast<double>(k) + 1.0) + std::lgamma(2.0 + s) -
                    std::lgamma(static_cast<double>(k) + 1.0 + s);
  return pref * std::exp(lp) / static_cast<double>(k);
}

double eta_degree_mass(const FitnessModel& model, const PhaseReport& rep, int64_t j) {
  const double f = model.atom_fitness(j);
  const double q = model.atom_prob(j);
  if (f == 0.0) return q;
  const double lam = rep.lambda0;
  const double s = lam / f;
  // Σ_{k>=1} Π_{l=2..k} l/(l+s) = (1+s)/(s-1), telescoping in Γ ratios
  return lam * q / (lam + f) * (1.0 + s) / (s - 1.0);
}

double mu_k(int64_t k) {
  if (k < 1) throw std::invalid_argument("mu_k: k >= 1");
  const double kd = static_cast<double>(k);
  return 4.0 / (kd * (kd + 1.0) * (kd + 2.0));
}

double tail_exponent(const PhaseReport& rep, double f) {
  if (f <= 0.0) throw std::invalid_argument("tail_exponent: fitness must be > 0");
  return rep.lambda0 / f;
}

LimitLaw limit_law(const FitnessModel& model, const PhaseReport& rep, int64_t max_atoms,
                   int64_t max_degree, const std::vector<double>& cell_edges) {
  LimitLaw law;
  law.condensation_variant = rep.condensation_formulas();
  if (rep.phase == Phase::unbounded_degenerate) {
    if (model.discrete()) {
      const int64_t J = model.kind == FitnessKind::finite_discrete
                            ? static_cast<int64_t>(model.finite_size())
                            : max_atoms;
      for (int64_t j = 1; j <= J; ++j) law.nu_by_atom.emplace_back(j, model.atom_prob(j));
    } else {
      for (size_t c = 0; c + 1 < cell_edges.size(); ++c)
        law.nu_by_cell.emplace_back(cell_edges[c], cell_edges[c + 1],
                                    model.cdf(cell_edges[c + 1]) - model.cdf(cell_edges[c]));
    }
    return law;
  }
  if (model.discrete()) {
    const int64_t J = model.kind == FitnessKind::finite_discrete
                          ? static_cast<int64_t>(model.finite_size())
                          : max_atoms;
    for (int64_t j = 1; j <= std::min(J, max_atoms); ++j) {
      law.nu_by_atom.emplace_back(j, nu_atom(model, rep, j));
      const double f = model.atom_fitness(j);
      if (f > 0.0) law.tail_exponents.emplace_back(f, tail_exponent(rep, f));
      for (int64_t k = 1; k <= max_degree; ++k)
        law.eta_rows.emplace_back(j, k, eta(model, rep, j, k));
    }
  } else {
    std::vector<double> edges = cell_edges;
    if (edges.empty()) {
      for (int i = 0; i <= 20; ++i) edges.push_back(model.sup * i / 20.0);
    }
    for (size_t c = 0; c + 1 < edges.size(); ++c)
      law.nu_by_cell.emplace_back(edges[c], edges[c + 1],
                                  nu_interval(model, rep, edges[c], edges[c + 1]));
  }
  return law;
}

namespace {

nlohmann::json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

nlohmann::json to_json(const PhaseReport& rep) {
  nlohmann::json j;
  j["lambda0"] = finite_or_null(rep.lambda0);
  j["I_at_h"] = finite_or_null(rep.I_at_h);
  j["phase"] = to_string(rep.phase);
  j["missing_mass"] = rep.missing_mass;
  j["residual"] = rep.residual;
  j["iterations"] = rep.iterations;
  j["bracket"] = {rep.bracket_lo, rep.bracket_hi};
  return j;
}

nlohmann::json to_json(const PhaseReport& rep, const LimitLaw& law) {
  nlohmann::json j = to_json(rep);
  nlohmann::json nu = nlohmann::json::array();
  for (auto& [atom, v] : law.nu_by_atom) nu.push_back({{"atom", atom}, {"nu", v}});
  for (auto& [a, b, v] : law.nu_by_cell) nu.push_back({{"a", a}, {"b", b}, {"nu", v}});
  j["nu_table"] = nu;
  nlohmann::json et = nlohmann::json::array();
  for (auto& [atom, k, v] : law.eta_rows) et.push_back({{"atom", atom}, {"k", k}, {"eta", v}});
  j["eta_table"] = et;
  nlohmann::json te = nlohmann::json::array();
  for (auto& [f, v] : law.tail_exponents) te.push_back({{"f", f}, {"exponent", v}});
  j["tail_exponents"] = te;
  return j;
}

}  // namespace pafit
