#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pafit/fitness.hpp"

namespace pafit {

enum class Phase {
  first_mover_advantage,
  fit_get_richer,
  fit_get_richer_boundary,
  innovation_pays_off,
  unbounded_degenerate,
};

const char* to_string(Phase p);

struct PhaseReport {
  double lambda0 = 0.0;
  double I_at_h = 0.0;      // +inf when divergent
  Phase phase = Phase::fit_get_richer;
  double missing_mass = 0.0;  // 1 - I(h) in the condensation phase, else 0
  // solver diagnostics
  double residual = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;

  bool condensation_formulas() const {
    return phase == Phase::innovation_pays_off || phase == Phase::fit_get_richer_boundary;
  }
};

// I(λ) = Σ_j f_j q_j/(λ - f_j), or ∫ x g(x)/(λ - x) dx. Monotone decreasing
// on λ >= h; may be +inf at λ = h. λ < h is a domain error.
double occupation_integral(const FitnessModel& model, double lambda);

// Root of I(λ) = 1 on [h, ∞) when it exists, λ0 = h otherwise, with the
// phase decided by I(h) vs 1 (boundary band 1e-9).
PhaseReport solve_lambda0(const FitnessModel& model);

// Dirac models report first-mover-advantage, unbounded models the degenerate
// law; everything else defers to solve_lambda0.
PhaseReport classify_phase(const FitnessModel& model);

// limiting link share of atom j (uses λ0 = h forms in condensation)
double nu_atom(const FitnessModel& model, const PhaseReport& rep, int64_t j);

// limiting link share of [a, b] ⊆ [0, h]; an interval whose upper end
// reaches h gets the condensate-inclusive share 2 - ν_[0,a]
double nu_interval(const FitnessModel& model, const PhaseReport& rep, double a, double b);

// limiting density of (fitness-j, degree-k) vertices; discrete models only
double eta(const FitnessModel& model, const PhaseReport& rep, int64_t j, int64_t k);

// Σ_k k·η_{(j,k)} in closed form (equals ν_j)
double eta_degree_mass(const FitnessModel& model, const PhaseReport& rep, int64_t j);

// classic preferential attachment degree law 4/(k(k+1)(k+2))
double mu_k(int64_t k);

// predicted degree-tail exponent of fitness-f vertices
double tail_exponent(const PhaseReport& rep, double f);

// Tabulated limit laws for reports.
struct LimitLaw {
  bool condensation_variant = false;
  std::vector<std::pair<int64_t, double>> nu_by_atom;        // discrete
  std::vector<std::tuple<double, double, double>> nu_by_cell;  // (a, b, ν)
  std::vector<std::tuple<int64_t, int64_t, double>> eta_rows;  // (j, k, η)
  std::vector<std::pair<double, double>> tail_exponents;       // (f, λ0/f)
};

LimitLaw limit_law(const FitnessModel& model, const PhaseReport& rep, int64_t max_atoms = 20,
                   int64_t max_degree = 10, const std::vector<double>& cell_edges = {});

nlohmann::json to_json(const PhaseReport& rep);
nlohmann::json to_json(const PhaseReport& rep, const LimitLaw& law);

}  // namespace pafit
