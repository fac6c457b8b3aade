#include "bunchkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bunchkit/error.hpp"

namespace bunchkit::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double checked(const ScalarFn& f, double x) {
  const double v = f(x);
  if (std::isnan(v)) {
    throw Error(ErrorCode::NonFiniteObjective, "objective is NaN at x=" + std::to_string(x));
  }
  return v;
}

}  // namespace

Bracket::Bracket(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::DomainError, "bracket requires finite lo < hi");
  }
}

double find_root(const ScalarFn& f, Bracket bracket, double xtol) {
  double a = bracket.lo;
  double b = bracket.hi;
  double fa = checked(f, a);
  double fb = checked(f, b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::NoSignChange, "f has the same sign at both bracket ends");
  }

  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < 500; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * kEps * std::fabs(b) + 0.5 * xtol;
    const double half = 0.5 * (c - b);
    if (std::fabs(half) <= tol || fb == 0.0) return b;

    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      // Secant or inverse quadratic interpolation.
      double p;
      double q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) {
        q = -q;
      } else {
        p = -p;
      }
      if (2.0 * p < std::min(3.0 * half * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : std::copysign(tol, half);
    fb = checked(f, b);
  }
  return b;
}

double minimize_1d(const ScalarFn& f, Bracket bracket, double xtol) {
  constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt(5)) / 2
  double a = bracket.lo;
  double b = bracket.hi;
  double x = a + kGolden * (b - a);
  double w = x;
  double v = x;
  double fx = checked(f, x);
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;

  for (int iter = 0; iter < 500; ++iter) {
    const double mid = 0.5 * (a + b);
    const double tol1 = 2.0 * kEps * std::fabs(x) + xtol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - mid) <= tol2 - 0.5 * (b - a)) break;

    bool golden = true;
    if (std::fabs(e) > tol1) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double etemp = e;
      e = d;
      if (std::fabs(p) < std::fabs(0.5 * q * etemp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (mid >= x) ? tol1 : -tol1;
        golden = false;
      }
    }
    if (golden) {
      e = (x >= mid) ? a - x : b - x;
      d = kGolden * e;
    }
    const double u = (std::fabs(d) >= tol1) ? x + d : x + std::copysign(tol1, d);
    const double fu = checked(f, u);
    if (fu <= fx) {
      if (u >= x) {
        a = x;
      } else {
        b = x;
      }
      v = w;
      fv = fw;
      w = x;
      fw = fx;
      x = u;
      fx = fu;
    } else {
      if (u < x) {
        a = u;
      } else {
        b = u;
      }
      if (fu <= fw || w == x) {
        v = w;
        fv = fw;
        w = u;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  return x;
}

namespace {

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const ScalarFn& f, const SimpsonPanel& p, double eps, int depth) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m);
  const double rm = 0.5 * (m + p.b);
  if (depth >= kMaxSimpsonDepth || !(p.a < lm && lm < m && m < rm && rm < p.b)) {
    throw Error(ErrorCode::MaxDepthExceeded,
                "adaptive Simpson did not converge near x=" + std::to_string(m));
  }
  const double flm = f(lm);
  const double frm = f(rm);
  if (!std::isfinite(flm) || !std::isfinite(frm)) {
    throw Error(ErrorCode::NonFiniteObjective, "integrand not finite near x=" + std::to_string(m));
  }
  const double left = simpson(p.a, m, p.fa, flm, p.fm);
  const double right = simpson(m, p.b, p.fm, frm, p.fb);
  const double delta = left + right - p.whole;
  if (std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return adaptive_simpson(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * eps, depth + 1) +
         adaptive_simpson(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * eps, depth + 1);
}

double integrate_finite(const ScalarFn& f, double lo, double hi, double tol, double flo, double fhi) {
  constexpr int kPanels = 16;
  const double h = (hi - lo) / kPanels;
  double total = 0.0;
  double fa = flo;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + i * h;
    const double b = (i + 1 == kPanels) ? hi : lo + (i + 1) * h;
    const double fb = (i + 1 == kPanels) ? fhi : f(b);
    const double fm = f(0.5 * (a + b));
    if (!std::isfinite(fb) || !std::isfinite(fm)) {
      throw Error(ErrorCode::NonFiniteObjective, "integrand not finite in the interior");
    }
    total += adaptive_simpson(f, {a, b, fa, fm, fb, simpson(a, b, fa, fm, fb)}, tol / kPanels, 0);
    fa = fb;
  }
  return total;
}

// Smoothstep of order 7: P(t) = I_t(4, 4), P'(t) = 140 t^3 (1 - t)^3.
double smoothstep7(double t) {
  return t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

}  // namespace

double integrate(const ScalarFn& f, double lo, double hi, double tol) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::DomainError, "integration limits must be finite");
  }
  if (lo == hi) return 0.0;
  if (hi < lo) return -integrate(f, hi, lo, tol);

  const double flo = f(lo);
  const double fhi = f(hi);
  if (std::isfinite(flo) && std::isfinite(fhi)) {
    return integrate_finite(f, lo, hi, tol, flo, fhi);
  }

  const double width = hi - lo;
  const ScalarFn g = [&](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double x = (t <= 0.5) ? lo + width * smoothstep7(t) : hi - width * smoothstep7(1.0 - t);
    if (x <= lo || x >= hi) return 0.0;
    const double s = t * (1.0 - t);
    return f(x) * width * 140.0 * s * s * s;
  };
  return integrate_finite(g, 0.0, 1.0, tol, 0.0, 0.0);
}

OptimResult nelder_mead(const VectorFn& f, std::span<const double> start, std::span<const double> scale,
                        std::size_t maxiter, double ftol, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0 || scale.size() != dim) {
    throw Error(ErrorCode::DomainError, "nelder_mead needs a non-empty start and a matching scale");
  }
  for (double s : start) {
    if (!std::isfinite(s)) throw Error(ErrorCode::DomainError, "start point is not finite");
  }

  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  const double f_start = f(start);
  if (!std::isfinite(f_start)) {
    throw Error(ErrorCode::NonFiniteObjective, "objective is not finite at the start point");
  }

  std::vector<std::vector<double>> simplex(dim + 1, std::vector<double>(start.begin(), start.end()));
  std::vector<double> values(dim + 1);
  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  std::vector<double> trial(dim);
  std::vector<double> trial2(dim);

  OptimResult result;
  result.point.assign(start.begin(), start.end());
  result.value = f_start;

  auto build = [&](const std::vector<double>& base, double fbase) {
    simplex[0] = base;
    values[0] = fbase;
    for (std::size_t i = 0; i < dim; ++i) {
      simplex[i + 1] = base;
      simplex[i + 1][i] += scale[i];
      values[i + 1] = eval(simplex[i + 1]);
    }
  };

  // Runs the simplex until the value spread is below ftol or the shared
  // iteration budget is gone. Returns true on convergence.
  auto run = [&]() {
    while (true) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[dim - 1];
      if (values[worst] - values[best] < ftol) return true;
      if (result.iterations >= maxiter) return false;
      ++result.iterations;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k < dim; ++k) {
        const auto& v = simplex[order[k]];
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += v[i];
      }
      for (double& c : centroid) c /= static_cast<double>(dim);

      const auto& xw = simplex[worst];
      for (std::size_t i = 0; i < dim; ++i) {
        trial[i] = centroid[i] + options.reflection * (centroid[i] - xw[i]);
      }
      const double fr = eval(trial);

      if (fr < values[best]) {
        for (std::size_t i = 0; i < dim; ++i) {
          trial2[i] = centroid[i] + options.expansion * (trial[i] - centroid[i]);
        }
        const double fe = eval(trial2);
        if (fe < fr) {
          simplex[worst] = trial2;
          values[worst] = fe;
        } else {
          simplex[worst] = trial;
          values[worst] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[worst] = trial;
        values[worst] = fr;
        continue;
      }

      const bool outside = fr < values[worst];
      for (std::size_t i = 0; i < dim; ++i) {
        const double toward = outside ? trial[i] : xw[i];
        trial2[i] = centroid[i] + options.contraction * (toward - centroid[i]);
      }
      const double fc = eval(trial2);
      if (outside ? fc <= fr : fc < values[worst]) {
        simplex[worst] = trial2;
        values[worst] = fc;
        continue;
      }

      const auto xb = simplex[best];
      for (std::size_t k = 0; k <= dim; ++k) {
        if (k == best) continue;
        for (std::size_t i = 0; i < dim; ++i) {
          simplex[k][i] = xb[i] + options.shrink * (simplex[k][i] - xb[i]);
        }
        values[k] = eval(simplex[k]);
      }
    }
  };

  auto best_vertex = [&]() {
    return static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  };

  build(result.point, f_start);
  bool converged = run();
  std::size_t b = best_vertex();
  result.point = simplex[b];
  result.value = values[b];

  while (converged && result.restarts < std::max<std::size_t>(1, options.max_restarts)) {
    const double before = result.value;
    ++result.restarts;
    build(result.point, result.value);
    converged = run();
    b = best_vertex();
    result.point = simplex[b];
    result.value = values[b];
    if (before - result.value <= ftol) break;
  }
  result.converged = converged;
  return result;
}

}  // namespace bunchkit::numerics
