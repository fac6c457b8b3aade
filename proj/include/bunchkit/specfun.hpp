#pragma once

namespace bunchkit::specfun {

/// Shapes above this bound are rejected with DomainError.
inline constexpr double kMaxShape = 1e6;

/// Beta shape parameters (alpha, beta); both finite, positive and at most
/// kMaxShape. Validated on construction.
struct ShapePair {
  double alpha;
  double beta;

  ShapePair(double alpha_, double beta_);
  ShapePair swapped() const { return {beta, alpha}; }
};

double log_gamma(double x);

/// ln B(alpha, beta). Switches to a Stirling-series difference when both
/// shapes are large so the three log-gamma terms do not cancel.
double log_beta(const ShapePair& p);

/// Regularized incomplete beta I_x(alpha, beta), i.e. the Beta CDF.
double reg_inc_beta(double x, const ShapePair& p);

/// 1 - I_x(alpha, beta), evaluated without cancellation.
double reg_inc_beta_complement(double x, const ShapePair& p);

/// Inverse of reg_inc_beta in x.
double inv_reg_inc_beta(double u, const ShapePair& p);

/// x with 1 - I_x(alpha, beta) = q. Keeps full precision for upper-tail
/// probabilities that would round to 1 as lower-tail values.
double inv_reg_inc_beta_complement(double q, const ShapePair& p);

}  // namespace bunchkit::specfun
