#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace bunchkit::numerics {

using ScalarFn = std::function<double(double)>;
using VectorFn = std::function<double(std::span<const double>)>;

inline constexpr double kDefaultXtol = 1e-12;
inline constexpr double kDefaultFtol = 1e-10;
inline constexpr double kDefaultIntegrateTol = 1e-10;
inline constexpr int kMaxSimpsonDepth = 50;

/// Closed interval [lo, hi] with lo < hi.
struct Bracket {
  double lo;
  double hi;

  Bracket(double lo_, double hi_);
  double width() const noexcept { return hi - lo; }
};

struct OptimResult {
  std::vector<double> point;
  double value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t restarts = 0;
};

/// Brent's zero finder. The bracket must straddle a sign change (an endpoint
/// that is an exact zero is returned immediately); throws NoSignChange
/// otherwise.
double find_root(const ScalarFn& f, Bracket bracket, double xtol = kDefaultXtol);

/// Brent's golden-section / parabolic minimizer for a unimodal f on the
/// bracket. Endpoints are never evaluated, so f may be singular there.
double minimize_1d(const ScalarFn& f, Bracket bracket, double xtol = kDefaultXtol);

/// Adaptive Simpson quadrature of f over [lo, hi].
///
/// When f is not finite at an endpoint the integral is taken after the
/// substitution x = lo + (hi - lo) * I_t(4, 4), whose Jacobian vanishes to
/// third order at both ends; integrable power singularities x^(s-1) with
/// s > 1/4 then become continuous integrands that vanish at the endpoints.
/// Throws MaxDepthExceeded if some subinterval fails to converge within
/// kMaxSimpsonDepth halvings.
double integrate(const ScalarFn& f, double lo, double hi, double tol = kDefaultIntegrateTol);

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  /// Restarts performed after the first convergence. At least one is always
  /// run; further ones only while they keep lowering the value by > ftol.
  std::size_t max_restarts = 4;
};

/// Derivative-free simplex minimization. The initial simplex is start plus
/// scale[i] along each axis. Converged when max - min of the simplex values
/// drops below ftol; the search is then restarted from the best vertex.
/// maxiter bounds the total number of simplex iterations across restarts.
OptimResult nelder_mead(const VectorFn& f, std::span<const double> start,
                        std::span<const double> scale, std::size_t maxiter,
                        double ftol = kDefaultFtol, const NelderMeadOptions& options = {});

}  // namespace bunchkit::numerics
