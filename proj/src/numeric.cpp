#include "pafit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pafit::num {

namespace {

// 15-point Kronrod / 7-point Gauss pair (QUADPACK dqk15 constants).
constexpr double kr_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kr_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double g_w[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct Panel {
  double value;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fk[15];
  for (int i = 0; i < 7; ++i) {
    fk[i] = f(c - h * kr_x[i]);
    fk[14 - i] = f(c + h * kr_x[i]);
  }
  fk[7] = f(c);
  double kron = 0.0;
  for (int i = 0; i < 7; ++i) kron += kr_w[i] * (fk[i] + fk[14 - i]);
  kron += kr_w[7] * fk[7];
  double gauss = g_w[3] * fk[7];
  for (int i = 0; i < 3; ++i) gauss += g_w[i] * (fk[2 * i + 1] + fk[13 - 2 * i]);
  return {kron * h, std::abs((kron - gauss) * h)};
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
           int max_depth, QuadResult& out) {
  Panel p = gk15(f, a, b);
  if (p.error <= tol || depth >= max_depth) {
    out.value += p.value;
    out.error += p.error;
    if (p.error > tol && depth >= max_depth) out.converged = false;
    return;
  }
  const double m = 0.5 * (a + b);
  adapt(f, a, m, 0.5 * tol, depth + 1, max_depth, out);
  adapt(f, m, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                     int max_depth) {
  QuadResult out;
  out.converged = true;
  if (a == b) return out;
  adapt(f, a, b, abs_tol, 0, max_depth, out);
  return out;
}

SingularResult integrate_over_gap(const std::function<double(double)>& f, double a, double b,
                                  double lambda, double abs_tol) {
  SingularResult out;
  if (b <= a) return out;
  if (lambda < b) throw std::domain_error("integrate_over_gap: lambda < upper limit");
  const double span = b - a;
  // deep subdivision can round a node onto an endpoint, where densities are
  // allowed to blow up integrably; evaluate strictly inside
  const double inset = span * 1e-15;
  auto integrand = [&, inset](double x) {
    x = std::clamp(x, a + inset, b - inset);
    return f(x) / (lambda - x);
  };
  const double gap = lambda - b;
  if (gap >= 0.1 * span) {
    QuadResult q = integrate(integrand, a, b, abs_tol);
    out.value = q.value;
    return out;
  }
  // plain quadrature away from the singularity, log coordinates on the top decile
  const double split = b - 0.1 * span;
  QuadResult low = integrate(integrand, a, split, abs_tol);
  out.value = low.value;
  // u = -log(lambda - x): dx = e^{-u} du, integrand dx -> f(x(u)) du
  auto g = [&, inset](double u) {
    const double e = std::exp(-u);
    double x = lambda - e;
    x = std::clamp(x, a + inset, b - inset);
    return f(x);
  };
  const double u0 = -std::log(lambda - split);
  const double u1 = gap > 0.0 ? -std::log(gap) : infinity;
  if (std::isfinite(u1)) {
    QuadResult top = integrate(g, u0, u1, abs_tol);
    out.value += top.value;
    return out;
  }
  // lambda == b: integrate fixed-width panels until they decay or diverge
  const double width = 3.0;
  double prev = infinity;
  double u = u0;
  for (int k = 0; k < 40; ++k) {
    QuadResult q = integrate(g, u, u + width, abs_tol);
    out.value += q.value;
    u += width;
    if (std::abs(q.value) < abs_tol) return out;
    if (k > 3 && std::abs(q.value) > 0.9 * std::abs(prev)) {
      out.diverged = true;
      out.value = infinity;
      return out;
    }
    prev = q.value;
  }
  out.diverged = true;
  out.value = infinity;
  return out;
}

RootResult bisect_decreasing(const std::function<double(double)>& g, double target, double lo,
                             double hi, double rel_tol, int max_iter) {
  RootResult r;
  double ghi = g(hi);
  int expand = 0;
  while (ghi > target && expand++ < 200) {
    lo = hi;
    hi *= 2.0;
    ghi = g(hi);
  }
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  if (ghi > target) return r;  // not bracketed; converged stays false
  double a = lo, b = hi;
  for (int i = 0; i < max_iter; ++i) {
    ++r.iterations;
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;  // double precision exhausted
    const double gm = g(m);
    if (gm > target)
      a = m;
    else
      b = m;
    if ((b - a) <= rel_tol * std::max(1.0, std::abs(b))) break;
  }
  r.root = 0.5 * (a + b);
  r.residual = g(r.root) - target;
  r.converged = true;
  return r;
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

namespace {

// continued fraction for the incomplete beta (Lentz)
double betacf(double a, double b, double x) {
  constexpr int max_it = 300;
  constexpr double eps = 3e-16;
  constexpr double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_it; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double lfront = a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);
  const double front = std::exp(lfront);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) * betacf(b, a, 1.0 - x) / b;
}

double ibeta_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0, x = 0.5;
  // bisection with Newton refinement
  for (int i = 0; i < 200; ++i) {
    x = 0.5 * (lo + hi);
    if (ibeta(a, b, x) < p)
      lo = x;
    else
      hi = x;
    if (hi - lo < 1e-8) break;
  }
  x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double err = ibeta(a, b, x) - p;
    const double pdf =
        std::exp((a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b));
    if (pdf <= 0.0) break;
    double step = err / pdf;
    double nx = x - step;
    if (nx <= lo || nx >= hi) break;
    x = nx;
    if (std::abs(step) < 1e-15) break;
  }
  return x;
}

double zeta_tail(double s, int64_t I) {
  if (s <= 1.0) throw std::domain_error("zeta_tail: requires s > 1");
  const int64_t M = std::max<int64_t>(I + 1, 4096);
  double sum = 0.0;
  for (int64_t j = M; j > I; --j) sum += std::pow(static_cast<double>(j), -s);
  // midpoint remainder for Σ_{j>M} j^{-s}
  sum += std::pow(M + 0.5, 1.0 - s) / (s - 1.0);
  return sum;
}

double riemann_zeta(double s) { return zeta_tail(s, 0); }

}  // namespace pafit::num
