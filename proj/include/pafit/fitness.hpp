#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pafit/rng.hpp"

namespace pafit {

enum class FitnessKind {
  finite_discrete,
  countable_discrete,
  continuous_density,
  continuous_unbounded,
};

const char* to_string(FitnessKind k);

// A fitness distribution: the set of attainable attractiveness weights and
// the law the process draws them from. Immutable after construction and safe
// to share across threads.
struct FitnessModel {
  FitnessKind kind = FitnessKind::finite_discrete;
  std::string name = "finite";

  // finite discrete: ascending atoms with probabilities
  std::vector<double> atoms;
  std::vector<double> probs;
  // zero-fitness atoms are rejected by validation unless this is set;
  // set internally by truncation and by rules that generate a zero atom
  bool allow_zero_atom = false;

  // countable discrete: rules indexed j >= 1, plus a certified tail
  std::function<double(int64_t)> atom_at;       // f_j
  std::function<double(int64_t)> prob_at;       // q_j
  std::function<double(int64_t)> tail_mass_at;  // Σ_{j>I} q_j
  // optional analytic tail of Σ_{j>I} f_j q_j / (lambda - f_j); may be null
  std::function<double(int64_t, double)> occupation_tail_at;

  // continuous: density on [0, sup] (or [0, inf))
  std::function<double(double)> pdf;
  std::function<double(double)> cdf;       // unnormalized: cdf(sup) = total_mass
  std::function<double(double)> quantile;  // inverse of cdf/total_mass; may be null
  bool pdf_positive_at_sup = false;        // analytic flag: g(h) > 0

  double sup = 0.0;         // h; +inf for unbounded variants
  double total_mass = 1.0;  // G; < 1 only for internal truncated models

  bool discrete() const {
    return kind == FitnessKind::finite_discrete || kind == FitnessKind::countable_discrete;
  }
  bool bounded() const { return std::isfinite(sup); }
  size_t finite_size() const { return atoms.size(); }

  // one draw from the law; atom index (1-based) for discrete variants
  std::pair<double, std::optional<int64_t>> sample(Rng& rng) const;

  // discrete variants only: draw the atom index
  int64_t sample_index(Rng& rng) const;

  double atom_fitness(int64_t j) const;  // discrete variants
  double atom_prob(int64_t j) const;

  // Σ_{j>I} q_j, exact for finite models, certified tail for countable ones
  double mass_beyond(int64_t I) const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;
};

ValidationReport validate(const FitnessModel& model);

// built-in parametric families
FitnessModel dirac(double f);
FitnessModel two_point(double f1, double f2, double q1);
FitnessModel finite_discrete(std::vector<double> atoms, std::vector<double> probs);
FitnessModel uniform_fitness(double h);
FitnessModel beta_fitness(double alpha, double beta);
FitnessModel zeta_family(double theta);
FitnessModel exponential_fitness(double rate);

}  // namespace pafit
