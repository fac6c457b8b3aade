#include "bunchkit/distributions.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bunchkit/error.hpp"

namespace bunchkit::dist {

namespace {

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void require_unit_interval(double x, const char* what) {
  if (std::isnan(x) || x < 0.0 || x > 1.0) {
    throw Error(ErrorCode::DomainError, std::string(what) + " outside [0,1]: " + std::to_string(x));
  }
}

void require_same_family(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2) {
  if (!p1.same_family(p2)) {
    throw Error(ErrorCode::MismatchedFamily, "both members must share (n, m)");
  }
}

}  // namespace

RestrictedBetaParams::RestrictedBetaParams(double a_, double n_, double m_) : a(a_), n(n_), m(m_) {
  if (!positive_finite(a) || !positive_finite(n) || !positive_finite(m)) {
    throw Error(ErrorCode::DomainError, "restricted Beta needs a, n, m finite and > 0");
  }
}

GB2Params::GB2Params(double scale_b_, double gamma_, double alpha_, double beta_)
    : scale_b(scale_b_), gamma(gamma_), alpha(alpha_), beta(beta_) {
  if (!positive_finite(scale_b) || !positive_finite(gamma) || !positive_finite(alpha) ||
      !positive_finite(beta)) {
    throw Error(ErrorCode::DomainError, "GB2 parameters must be finite and > 0");
  }
}

XiA::XiA(double xi_, double a_) : xi(xi_), a(a_) {
  if (!(xi > 0.0 && xi < 1.0) || !positive_finite(a)) {
    throw Error(ErrorCode::DomainError, "xi must lie in (0,1) and a must be > 0");
  }
}

double beta_log_pdf(double x, const ShapePair& p) {
  require_unit_interval(x, "beta density argument");
  const double lbeta = specfun::log_beta(p);
  if (x == 0.0 || x == 1.0) {
    const double edge_shape = (x == 0.0) ? p.alpha : p.beta;
    if (edge_shape < 1.0) {
      throw Error(ErrorCode::DomainError, "beta density is unbounded at the endpoint");
    }
    if (edge_shape > 1.0) return -std::numeric_limits<double>::infinity();
    return -lbeta;  // the other factor equals 1 at this endpoint
  }
  return (p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) - lbeta;
}

double beta_pdf(double x, const ShapePair& p) { return std::exp(beta_log_pdf(x, p)); }

double restricted_pdf(double x, const RestrictedBetaParams& p) { return beta_pdf(x, p.shapes()); }

double restricted_cdf(double x, const RestrictedBetaParams& p) {
  require_unit_interval(x, "CDF argument");
  return specfun::reg_inc_beta(x, p.shapes());
}

double restricted_sf(double x, const RestrictedBetaParams& p) {
  require_unit_interval(x, "survival argument");
  return specfun::reg_inc_beta_complement(x, p.shapes());
}

Moments restricted_moments(const RestrictedBetaParams& p) {
  const double s = p.n + p.m;
  return {p.n / s, p.n * p.m / (s * s * (p.n * p.a + p.m * p.a + 1.0))};
}

double gb2_cdf(double x, const GB2Params& p) {
  if (std::isnan(x) || x < 0.0) {
    throw Error(ErrorCode::DomainError, "GB2 CDF argument must be >= 0");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double z = std::pow(x / p.scale_b, p.gamma);
  if (z <= 1.0) return specfun::reg_inc_beta(z / (1.0 + z), p.shapes());
  return specfun::reg_inc_beta_complement(1.0 / (1.0 + z), p.shapes().swapped());
}

double gb2_sf(double x, const GB2Params& p) {
  if (std::isnan(x) || x < 0.0) {
    throw Error(ErrorCode::DomainError, "GB2 survival argument must be >= 0");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double z = std::pow(x / p.scale_b, p.gamma);
  if (z <= 1.0) return specfun::reg_inc_beta_complement(z / (1.0 + z), p.shapes());
  return specfun::reg_inc_beta(1.0 / (1.0 + z), p.shapes().swapped());
}

double gb2_quantile(double u, const GB2Params& p) {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorCode::DomainError, "GB2 quantile needs u in (0,1)");
  }
  // Work with whichever of y, 1 - y is small so the odds y / (1 - y) keep
  // full relative precision.
  double odds;
  if (u <= 0.5) {
    const double y = specfun::inv_reg_inc_beta(u, p.shapes());
    odds = y / (1.0 - y);
  } else {
    const double ybar = specfun::inv_reg_inc_beta(1.0 - u, p.shapes().swapped());
    odds = (1.0 - ybar) / ybar;
  }
  return p.scale_b * std::pow(odds, 1.0 / p.gamma);
}

MomentQuery gb2_mean(const GB2Params& p) {
  if (!p.has_mean()) return {std::numeric_limits<double>::infinity(), false};
  const double shift = 1.0 / p.gamma;
  const double log_ratio = specfun::log_beta({p.alpha + shift, p.beta - shift}) - specfun::log_beta(p.shapes());
  return {p.scale_b * std::exp(log_ratio), true};
}

double log_density_ratio(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2) {
  require_same_family(p1, p2);
  require_unit_interval(x, "density ratio argument");
  if (p1.a == p2.a) return 0.0;
  const double delta = p2.a - p1.a;
  const double log_k = specfun::log_beta(p2.shapes()) - specfun::log_beta(p1.shapes());
  const double px = p1.n * delta;
  const double qx = p1.m * delta;
  // -p ln x - q ln(1 - x); at an endpoint the finite factor is dropped so
  // the result is the signed infinite limit rather than NaN.
  if (x == 0.0) return px > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  if (x == 1.0) return qx > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  return log_k - px * std::log(x) - qx * std::log1p(-x);
}

double density_ratio(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2, double cap) {
  const double value = std::exp(log_density_ratio(x, p1, p2));
  return value > cap ? cap : value;
}

double ratio_second_derivative(double x, double p, double q) {
  if (!(x > 0.0 && x < 1.0) || !positive_finite(p) || !positive_finite(q)) {
    throw Error(ErrorCode::DomainError, "ratio_second_derivative needs x in (0,1) and p, q > 0");
  }
  const double y = 1.0 - x;
  const double cross = q * x - p * y;
  const double numerator = q * x * x + p * y * y + cross * cross;
  const double log_denominator = (2.0 + p) * std::log(x) + (2.0 + q) * std::log1p(-x);
  return std::exp(std::log(numerator) - log_denominator);
}

}  // namespace bunchkit::dist
