#pragma once

#include <cstdint>
#include <functional>
#include <limits>

namespace pafit::num {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

// Adaptive Gauss–Kronrod (7-15) to absolute tolerance `abs_tol`.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, int max_depth = 48);

// ∫_a^b f(x)/(lambda - x) dx with lambda >= b. When lambda - b is small
// relative to the interval, the top decile is integrated in the coordinates
// u = -log(lambda - x), where the integrand is f(x(u)); this removes the
// endpoint blow-up. For lambda == b the integral may diverge; `diverged`
// is set when the transformed tail fails to decay.
struct SingularResult {
  double value = 0.0;
  bool diverged = false;
};
SingularResult integrate_over_gap(const std::function<double(double)>& f, double a, double b,
                                  double lambda, double abs_tol = 1e-10);

// Bisection for a strictly decreasing function g on (lo, hi] with
// g(lo+) > target > g(hi). Brackets by doubling hi if needed.
struct RootResult {
  double root = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  bool converged = false;
};
RootResult bisect_decreasing(const std::function<double(double)>& g, double target, double lo,
                             double hi, double rel_tol = 1e-12, int max_iter = 400);

// --- special functions -----------------------------------------------------

double log_beta(double a, double b);

// regularized incomplete beta I_x(a, b)
double ibeta(double a, double b, double x);

// inverse of I_x(a, b) in x for p in [0, 1]
double ibeta_inv(double a, double b, double p);

// Σ_{j>I} j^{-s} for s > 1, I >= 0, accurate to ~1e-14 relative.
double zeta_tail(double s, int64_t I);

// Riemann zeta for s > 1.
double riemann_zeta(double s);

}  // namespace pafit::num
