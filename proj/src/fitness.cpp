#include "pafit/fitness.hpp"

#include <cmath>
#include <stdexcept>

#include "pafit/numeric.hpp"

namespace pafit {

const char* to_string(FitnessKind k) {
  switch (k) {
    case FitnessKind::finite_discrete: return "finite-discrete";
    case FitnessKind::countable_discrete: return "countable-discrete";
    case FitnessKind::continuous_density: return "continuous-density";
    case FitnessKind::continuous_unbounded: return "continuous-unbounded";
  }
  return "?";
}

std::pair<double, std::optional<int64_t>> FitnessModel::sample(Rng& rng) const {
  switch (kind) {
    case FitnessKind::finite_discrete:
    case FitnessKind::countable_discrete: {
      const int64_t j = sample_index(rng);
      return {atom_fitness(j), j};
    }
    case FitnessKind::continuous_density:
    case FitnessKind::continuous_unbounded: {
      const double u = rng.u01();
      if (u >= total_mass) return {0.0, std::nullopt};  // truncated-away mass
      return {quantile(u / total_mass), std::nullopt};
    }
  }
  throw std::logic_error("unreachable");
}

int64_t FitnessModel::sample_index(Rng& rng) const {
  if (!discrete()) throw std::invalid_argument("sample_index: discrete models only");
  double u = rng.u01();
  if (kind == FitnessKind::finite_discrete) {
    for (size_t j = 0; j + 1 < probs.size(); ++j) {
      if (u < probs[j]) return static_cast<int64_t>(j) + 1;
      u -= probs[j];
    }
    return static_cast<int64_t>(probs.size());
  }
  int64_t j = 1;
  for (;;) {
    const double q = prob_at(j);
    if (u < q) return j;
    u -= q;
    ++j;
    if (j > (int64_t(1) << 40)) throw std::runtime_error("sample_index: runaway tail walk");
  }
}

double FitnessModel::atom_fitness(int64_t j) const {
  if (kind == FitnessKind::finite_discrete) return atoms.at(static_cast<size_t>(j - 1));
  if (kind == FitnessKind::countable_discrete) return atom_at(j);
  throw std::invalid_argument("atom_fitness: discrete models only");
}

double FitnessModel::atom_prob(int64_t j) const {
  if (kind == FitnessKind::finite_discrete) return probs.at(static_cast<size_t>(j - 1));
  if (kind == FitnessKind::countable_discrete) return prob_at(j);
  throw std::invalid_argument("atom_prob: discrete models only");
}

double FitnessModel::mass_beyond(int64_t I) const {
  if (I < 0) throw std::invalid_argument("mass_beyond: I >= 0 required");
  if (kind == FitnessKind::finite_discrete) {
    double s = 0.0;
    for (size_t j = probs.size(); j > static_cast<size_t>(I); --j) s += probs[j - 1];
    return s;
  }
  if (kind == FitnessKind::countable_discrete) return tail_mass_at(I);
  throw std::invalid_argument("mass_beyond: discrete models only");
}

namespace {

void check(ValidationReport& r, bool cond, const std::string& what) {
  if (!cond) {
    r.ok = false;
    r.failures.push_back(what);
  }
}

}  // namespace

ValidationReport validate(const FitnessModel& m) {
  ValidationReport r;
  switch (m.kind) {
    case FitnessKind::finite_discrete: {
      check(r, !m.atoms.empty(), "no atoms");
      check(r, m.atoms.size() == m.probs.size(), "atom/prob size mismatch");
      for (size_t j = 0; j + 1 < m.atoms.size(); ++j)
        check(r, m.atoms[j] < m.atoms[j + 1], "atoms not strictly ascending");
      for (size_t j = 0; j < m.atoms.size(); ++j) {
        const bool positive = m.atoms[j] > 0.0 || (m.atoms[j] == 0.0 && m.allow_zero_atom);
        check(r, positive, "non-positive fitness atom");
      }
      double s = 0.0;
      for (double q : m.probs) {
        check(r, q > 0.0, "atom probability must be > 0");
        s += q;
      }
      check(r, std::abs(s - m.total_mass) <= 1e-9, "probabilities do not sum to declared mass");
      break;
    }
    case FitnessKind::countable_discrete: {
      check(r, static_cast<bool>(m.atom_at) && static_cast<bool>(m.prob_at) &&
                   static_cast<bool>(m.tail_mass_at),
            "countable model needs atom/prob/tail rules");
      if (!r.ok) break;
      check(r, std::isfinite(m.sup) || m.sup == num::infinity, "bad supremum");
      double s = 0.0;
      for (int64_t j = 1; j <= 64; ++j) {
        check(r, m.prob_at(j) > 0.0, "q_j must be > 0");
        if (j >= 2) check(r, m.atom_at(j) > m.atom_at(j - 1), "atoms must be increasing");
        s += m.prob_at(j);
      }
      const double f1 = m.atom_at(1);
      check(r, f1 > 0.0 || (f1 == 0.0 && m.allow_zero_atom), "non-positive fitness atom");
      check(r, std::abs(s + m.tail_mass_at(64) - m.total_mass) <= 1e-9,
            "partial sum + tail does not match declared mass");
      double prev = m.tail_mass_at(1);
      for (int64_t e = 2; e <= 16; ++e) {
        const double t = m.tail_mass_at(int64_t(1) << e);
        check(r, t <= prev + 1e-15, "tail mass not nonincreasing");
        prev = t;
      }
      check(r, m.tail_mass_at(int64_t(1) << 20) < 1e-6, "tail mass does not vanish");
      break;
    }
    case FitnessKind::continuous_density:
    case FitnessKind::continuous_unbounded: {
      check(r, static_cast<bool>(m.pdf) && static_cast<bool>(m.cdf), "missing pdf/cdf");
      if (!r.ok) break;
      const bool unbounded = m.kind == FitnessKind::continuous_unbounded;
      check(r, unbounded ? !std::isfinite(m.sup) : (std::isfinite(m.sup) && m.sup > 0.0),
            "bad supremum");
      check(r, m.total_mass > 0.0 && m.total_mass <= 1.0 + 1e-12, "mass must be in (0,1]");
      if (unbounded) check(r, m.total_mass == 1.0, "unbounded models must have mass 1");
      const double top =
          unbounded ? (m.quantile ? m.quantile(1.0 - 1e-12) : -std::log(1e-12)) : m.sup;
      // interior positivity on a spot grid
      for (int i = 1; i < 32; ++i) {
        const double x = top * i / 32.0;
        check(r, m.pdf(x) > 0.0, "density not strictly positive on the interior");
      }
      // pdf/cdf consistency: interior quadrature vs cdf difference, cdf(sup) = G
      const double delta = top * 1e-6;
      auto q = num::integrate(m.pdf, delta, top - delta, 1e-11);
      const double want = m.cdf(top - delta) - m.cdf(delta);
      check(r, std::abs(q.value - want) <= 1e-9, "pdf does not integrate to cdf");
      const double mass = unbounded ? 1.0 : m.cdf(m.sup);
      check(r, std::abs(mass - m.total_mass) <= 1e-9, "cdf(h) does not equal declared mass");
      if (m.quantile) {
        for (int i = 1; i < 8; ++i) {
          const double p = i / 8.0;
          const double x = m.quantile(p);
          check(r, std::abs(m.cdf(x) / m.total_mass - p) <= 1e-7, "quantile does not invert cdf");
        }
      }
      break;
    }
  }
  return r;
}

FitnessModel dirac(double f) {
  if (f <= 0.0) throw std::invalid_argument("dirac: fitness must be > 0");
  FitnessModel m;
  m.kind = FitnessKind::finite_discrete;
  m.name = "dirac";
  m.atoms = {f};
  m.probs = {1.0};
  m.sup = f;
  return m;
}

FitnessModel two_point(double f1, double f2, double q1) {
  if (!(f1 > 0.0 && f2 > f1)) throw std::invalid_argument("two_point: need 0 < f1 < f2");
  if (!(q1 > 0.0 && q1 < 1.0)) throw std::invalid_argument("two_point: q1 in (0,1)");
  FitnessModel m;
  m.kind = FitnessKind::finite_discrete;
  m.name = "twopoint";
  m.atoms = {f1, f2};
  m.probs = {q1, 1.0 - q1};
  m.sup = f2;
  return m;
}

FitnessModel finite_discrete(std::vector<double> atoms, std::vector<double> probs) {
  FitnessModel m;
  m.kind = FitnessKind::finite_discrete;
  m.name = "finite";
  m.atoms = std::move(atoms);
  m.probs = std::move(probs);
  m.sup = m.atoms.empty() ? 0.0 : m.atoms.back();
  return m;
}

FitnessModel uniform_fitness(double h) {
  if (h <= 0.0) throw std::invalid_argument("uniform: h must be > 0");
  FitnessModel m;
  m.kind = FitnessKind::continuous_density;
  m.name = "uniform";
  m.sup = h;
  m.pdf = [h](double) { return 1.0 / h; };
  m.cdf = [h](double x) { return std::clamp(x / h, 0.0, 1.0); };
  m.quantile = [h](double p) { return p * h; };
  m.pdf_positive_at_sup = true;
  return m;
}

FitnessModel beta_fitness(double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0) throw std::invalid_argument("beta: parameters must be > 0");
  FitnessModel m;
  m.kind = FitnessKind::continuous_density;
  m.name = "beta";
  m.sup = 1.0;
  const double lb = num::log_beta(alpha, beta);
  m.pdf = [alpha, beta, lb](double x) {
    if (x <= 0.0 || x >= 1.0) {
      // endpoint limits; +inf for exponents < 1
      if (x == 0.0) return alpha < 1.0 ? num::infinity : (alpha == 1.0 ? std::exp(-lb) : 0.0);
      if (x == 1.0) return beta < 1.0 ? num::infinity : (beta == 1.0 ? std::exp(-lb) : 0.0);
      return 0.0;
    }
    return std::exp((alpha - 1.0) * std::log(x) + (beta - 1.0) * std::log1p(-x) - lb);
  };
  m.cdf = [alpha, beta](double x) { return num::ibeta(alpha, beta, x); };
  m.quantile = [alpha, beta](double p) { return num::ibeta_inv(alpha, beta, p); };
  m.pdf_positive_at_sup = beta <= 1.0;
  return m;
}

FitnessModel zeta_family(double theta) {
  if (theta <= 0.0) throw std::invalid_argument("zeta_family: theta must be > 0");
  FitnessModel m;
  m.kind = FitnessKind::countable_discrete;
  m.name = "zeta";
  m.sup = 1.0;  // supremum of 1 - 1/j, not attained
  m.allow_zero_atom = true;  // first atom is 1 - 1/1 = 0
  const double s = 2.0 + theta;
  const double z = num::riemann_zeta(s);
  m.atom_at = [](int64_t j) { return 1.0 - 1.0 / static_cast<double>(j); };
  m.prob_at = [s, z](int64_t j) { return std::pow(static_cast<double>(j), -s) / z; };
  m.tail_mass_at = [s, z](int64_t I) { return num::zeta_tail(s, I) / z; };
  // Σ_{j>I} f_j q_j/(λ - f_j); analytic at λ = 1:
  //   f_j q_j/(1 - f_j) = (j^{-(1+θ)} - j^{-(2+θ)})/ζ(2+θ)
  // above 1, expand (j-1)/(jδ+1) with δ = λ-1; the correction term gives a
  // certified upper bound that tightens like Σ j^{-(4+θ)}
  m.occupation_tail_at = [s, z](int64_t I, double lambda) {
    if (lambda == 1.0) return (num::zeta_tail(s - 1.0, I) - num::zeta_tail(s, I)) / z;
    const double d = lambda - 1.0;
    const double upper = num::zeta_tail(s, I) / d -
                         (1.0 + d) / (d * d) *
                             (num::zeta_tail(s + 1.0, I) - num::zeta_tail(s + 2.0, I) / d);
    return std::max(0.0, upper) / z;
  };
  return m;
}

FitnessModel exponential_fitness(double rate) {
  if (rate <= 0.0) throw std::invalid_argument("exponential: rate must be > 0");
  FitnessModel m;
  m.kind = FitnessKind::continuous_unbounded;
  m.name = "exponential";
  m.sup = num::infinity;
  m.pdf = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
  m.cdf = [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
  m.quantile = [rate](double p) { return -std::log1p(-p) / rate; };
  return m;
}

}  // namespace pafit
