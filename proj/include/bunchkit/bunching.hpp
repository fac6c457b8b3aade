#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bunchkit/distributions.hpp"

namespace bunchkit::bunching {

using dist::RestrictedBetaParams;

inline constexpr std::size_t kDefaultGridSize = 4096;
inline constexpr double kDefaultXtol = 1e-12;

enum class IcvConclusion { a2_dominates_icv, a1_dominates_icv, inconclusive };

std::string_view to_string(IcvConclusion c) noexcept;

/// Outcome of comparing Beta(n a1, m a1) against Beta(n a2, m a2).
///
/// verified means the strict bunching pattern held at every grid point away
/// from x_star: with a2 > a1, F_{a1} > F_{a2} on (0, x*) and
/// 1 - F_{a1} > 1 - F_{a2} on (x*, 1). When a1 > a2 the roles swap and the
/// pattern is checked the other way round.
struct BunchingReport {
  double a1 = 0.0;
  double a2 = 0.0;
  double n = 0.0;
  double m = 0.0;
  double x_star = 0.0;
  double density_cross_lo = 0.0;
  double density_cross_hi = 0.0;
  std::size_t grid_size = 0;
  bool verified = false;
  /// S^- of (F_{a2} - F_{a1}) over the verification grid.
  std::size_t sign_changes = 0;
  IcvConclusion icv_conclusion = IcvConclusion::inconclusive;
};

/// One of four closed-form, strictly monotone maps:
///   affine       x -> s x + c        (s != 0)
///   power        x -> x^k            (k != 0, used on (0, inf))
///   logarithm    x -> ln x           (no parameters)
///   exponential  x -> exp(r x)       (r != 0)
class MonotoneTransform {
 public:
  enum class Kind { affine, power, logarithm, exponential };
  enum class Direction { increasing, decreasing };

  static MonotoneTransform affine(double slope, double intercept);
  static MonotoneTransform power(double exponent);
  static MonotoneTransform logarithm();
  static MonotoneTransform exponential(double rate);
  /// x -> 1 - x.
  static MonotoneTransform reflection() { return affine(-1.0, 1.0); }

  Kind kind() const noexcept { return kind_; }
  Direction direction() const noexcept { return direction_; }
  bool increasing() const noexcept { return direction_ == Direction::increasing; }
  std::span<const double> params() const noexcept { return params_; }

  double apply(double x) const;
  double inverse(double y) const;

 private:
  MonotoneTransform(Kind kind, std::vector<double> params);

  Kind kind_;
  std::vector<double> params_;
  Direction direction_;
};

struct TransformCrossing {
  double x_star_transformed;
  bool direction_preserved;
};

struct XstarPoint {
  double n;
  double x_star;
};

struct XstarCurve {
  std::vector<XstarPoint> points;
  /// Empirical observation only; never a proof of monotonicity.
  bool strictly_increasing = false;
};

struct HalfCdfPoint {
  double a;
  double cdf_at_half;
};

struct ConjectureScan {
  std::vector<HalfCdfPoint> points;
  bool strictly_decreasing = false;
};

/// y(x) with F_{a2}(y) = F_{a1}(x).
double push_forward_map(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2);

/// F_{a2}(x) - F_{a1}(x), switching to survival functions above 1/2 so the
/// sign stays reliable when both CDFs round to 1.
double cdf_difference(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2);

/// Unique interior zero x* of F_{a2} - F_{a1}. Order of a1, a2 does not
/// matter. Throws DegenerateParams when a1 == a2.
double crossing_point(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                      double xtol = kDefaultXtol);

/// The two points x1 < x2 where the densities are equal.
std::pair<double, double> density_crossings(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                                            double xtol = kDefaultXtol);

BunchingReport verify_bunching(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                               std::size_t grid_size = kDefaultGridSize, double xtol = kDefaultXtol);

/// Sign changes of a sequence with zero terms deleted.
std::size_t sign_changes(std::span<const double> values);

IcvConclusion check_icv_icx(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                            std::size_t grid_size = kDefaultGridSize);

XstarCurve xstar_curve(std::span<const double> n_grid, double m, double a1, double a2);

TransformCrossing transform_crossing(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                                     const MonotoneTransform& transform);

/// F_a(1/2) over a_grid with no restriction on (n, m).
ConjectureScan half_cdf_scan(double n, double m, std::span<const double> a_grid);

/// half_cdf_scan restricted to n > m, where P_a(1/2) is conjectured to
/// decrease in a. Throws DomainError otherwise.
ConjectureScan conjecture_scan(double n, double m, std::span<const double> a_grid);

/// Monte Carlo estimate of Pr{U < V} for U ~ Gamma(n a), V ~ Gamma(m a),
/// which equals F_a(1/2). Deterministic for a given seed.
double gamma_mc_oracle(double n, double m, double a, std::size_t samples, std::uint64_t seed);

/// sqrt(p (1 - p) / samples).
double binomial_standard_error(double p, std::size_t samples);

}  // namespace bunchkit::bunching
