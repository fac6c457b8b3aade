#pragma once

#include "bunchkit/specfun.hpp"

namespace bunchkit::dist {

using specfun::ShapePair;

/// Default saturation value for density_ratio near the endpoints, where the
/// true ratio diverges.
inline constexpr double kDefaultRatioCap = 1e300;

/// Beta(n a, m a): the one-parameter family indexed by a with fixed weights
/// (n, m). The mean n / (n + m) does not depend on a.
struct RestrictedBetaParams {
  double a;
  double n;
  double m;

  RestrictedBetaParams(double a_, double n_, double m_);
  ShapePair shapes() const { return {n * a, m * a}; }
  bool same_family(const RestrictedBetaParams& other) const { return n == other.n && m == other.m; }
};

/// GB2(b, gamma, alpha, beta): (X/b)^gamma / (1 + (X/b)^gamma) ~ Beta(alpha, beta).
struct GB2Params {
  double scale_b;
  double gamma;
  double alpha;
  double beta;

  GB2Params(double scale_b_, double gamma_, double alpha_, double beta_);
  ShapePair shapes() const { return {alpha, beta}; }
  /// E[X] is finite iff beta * gamma > 1.
  bool has_mean() const { return beta * gamma > 1.0; }
};

/// Reparameterization of Beta shapes: alpha = a xi, beta = a (1 - xi).
struct XiA {
  double xi;
  double a;

  XiA(double xi_, double a_);
  ShapePair shapes() const { return {a * xi, a * (1.0 - xi)}; }
};

struct Moments {
  double mean;
  double variance;
};

/// A moment that may not exist; value is +inf when exists is false.
struct MomentQuery {
  double value;
  bool exists;
};

double beta_log_pdf(double x, const ShapePair& p);
double beta_pdf(double x, const ShapePair& p);

double restricted_pdf(double x, const RestrictedBetaParams& p);
double restricted_cdf(double x, const RestrictedBetaParams& p);
/// 1 - restricted_cdf without cancellation near x = 1.
double restricted_sf(double x, const RestrictedBetaParams& p);
Moments restricted_moments(const RestrictedBetaParams& p);

double gb2_cdf(double x, const GB2Params& p);
double gb2_sf(double x, const GB2Params& p);
double gb2_quantile(double u, const GB2Params& p);
/// E[X] = b B(alpha + 1/gamma, beta - 1/gamma) / B(alpha, beta), flagged
/// rather than rejected when beta * gamma <= 1.
MomentQuery gb2_mean(const GB2Params& p);

/// ln t(x) for t = p_{a1} / p_{a2}; equals ln K - p ln x - q ln(1 - x) with
/// p = n (a2 - a1), q = m (a2 - a1). Throws MismatchedFamily.
double log_density_ratio(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2);

/// t(x) = p_{a1}(x) / p_{a2}(x), saturated at cap.
double density_ratio(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                     double cap = kDefaultRatioCap);

/// Closed-form second derivative of x^-p (1-x)^-q on (0,1):
/// [q x^2 + p (1-x)^2 + (q x - p (1-x))^2] / [x^(2+p) (1-x)^(2+q)].
double ratio_second_derivative(double x, double p, double q);

}  // namespace bunchkit::dist
