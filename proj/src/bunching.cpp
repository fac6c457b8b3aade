#include "bunchkit/bunching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bunchkit/error.hpp"
#include "bunchkit/numerics.hpp"
#include "bunchkit/random.hpp"
#include "bunchkit/specfun.hpp"

namespace bunchkit::bunching {

namespace {

void require_same_family(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2) {
  if (!p1.same_family(p2)) {
    throw Error(ErrorCode::MismatchedFamily, "both members must share (n, m)");
  }
}

void require_distinct(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2) {
  if (p1.a == p2.a) {
    throw Error(ErrorCode::DegenerateParams, "a1 == a2: a distribution is not ordered against itself");
  }
}

// Scan points for bracketing the sign change of the CDF difference: a
// uniform 1/256 grid, refined geometrically towards both endpoints.
const std::vector<double>& scan_points() {
  static const std::vector<double> points = [] {
    std::vector<double> xs;
    for (int k = 60; k >= 9; --k) xs.push_back(std::ldexp(1.0, -k));
    for (int k = 1; k < 256; ++k) xs.push_back(k / 256.0);
    for (int k = 9; k <= 52; ++k) xs.push_back(1.0 - std::ldexp(1.0, -k));
    return xs;
  }();
  return points;
}

// First pair of ascending points on which g goes from negative to positive.
numerics::Bracket bracket_sign_change(const numerics::ScalarFn& g, std::span<const double> points) {
  double last_start = std::numeric_limits<double>::quiet_NaN();
  for (double x : points) {
    const double v = g(x);
    if (v < 0.0) {
      last_start = x;
    } else if (v > 0.0 && !std::isnan(last_start)) {
      return {last_start, x};
    }
  }
  throw Error(ErrorCode::NoSignChange, "CDF difference shows no interior sign change");
}

std::vector<double> uniform_grid(std::size_t size) {
  std::vector<double> xs(size);
  const double step = 1.0 / static_cast<double>(size + 1);
  for (std::size_t k = 0; k < size; ++k) xs[k] = static_cast<double>(k + 1) * step;
  return xs;
}

bool strictly_monotone(std::span<const double> values, bool increasing) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (increasing ? !(values[i] > values[i - 1]) : !(values[i] < values[i - 1])) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(IcvConclusion c) noexcept {
  switch (c) {
    case IcvConclusion::a2_dominates_icv: return "a2_dominates_icv";
    case IcvConclusion::a1_dominates_icv: return "a1_dominates_icv";
    case IcvConclusion::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

MonotoneTransform::MonotoneTransform(Kind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)), direction_(Direction::increasing) {
  for (double v : params_) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonMonotoneTransform, "transform parameter not finite");
  }
  double slope_sign = 1.0;
  switch (kind_) {
    case Kind::affine:
    case Kind::power:
    case Kind::exponential:
      if (params_.empty() || params_[0] == 0.0) {
        throw Error(ErrorCode::NonMonotoneTransform, "zero slope, exponent or rate is not strictly monotone");
      }
      slope_sign = params_[0];
      break;
    case Kind::logarithm:
      break;
  }
  direction_ = slope_sign > 0.0 ? Direction::increasing : Direction::decreasing;
}

MonotoneTransform MonotoneTransform::affine(double slope, double intercept) {
  return {Kind::affine, {slope, intercept}};
}
MonotoneTransform MonotoneTransform::power(double exponent) { return {Kind::power, {exponent}}; }
MonotoneTransform MonotoneTransform::logarithm() { return {Kind::logarithm, {}}; }
MonotoneTransform MonotoneTransform::exponential(double rate) { return {Kind::exponential, {rate}}; }

double MonotoneTransform::apply(double x) const {
  switch (kind_) {
    case Kind::affine: return params_[0] * x + params_[1];
    case Kind::power: return std::pow(x, params_[0]);
    case Kind::logarithm: return std::log(x);
    case Kind::exponential: return std::exp(params_[0] * x);
  }
  return x;
}

double MonotoneTransform::inverse(double y) const {
  switch (kind_) {
    case Kind::affine: return (y - params_[1]) / params_[0];
    case Kind::power: return std::pow(y, 1.0 / params_[0]);
    case Kind::logarithm: return std::exp(y);
    case Kind::exponential: return std::log(y) / params_[0];
  }
  return y;
}

double push_forward_map(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2) {
  require_same_family(p1, p2);
  const double lower = dist::restricted_cdf(x, p1);
  if (lower <= 0.5) return specfun::inv_reg_inc_beta(lower, p2.shapes());
  // Upper half: invert the survival function to keep precision near 1.
  const double upper = dist::restricted_sf(x, p1);
  return specfun::inv_reg_inc_beta_complement(upper, p2.shapes());
}

double cdf_difference(double x, const RestrictedBetaParams& p1, const RestrictedBetaParams& p2) {
  if (x <= 0.5) return dist::restricted_cdf(x, p2) - dist::restricted_cdf(x, p1);
  return dist::restricted_sf(x, p1) - dist::restricted_sf(x, p2);
}

double crossing_point(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2, double xtol) {
  require_same_family(p1, p2);
  require_distinct(p1, p2);
  const auto& lo = p1.a < p2.a ? p1 : p2;
  const auto& hi = p1.a < p2.a ? p2 : p1;
  const numerics::ScalarFn diff = [&](double x) { return cdf_difference(x, lo, hi); };
  const auto bracket = bracket_sign_change(diff, scan_points());
  return numerics::find_root(diff, bracket, xtol);
}

std::pair<double, double> density_crossings(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                                            double xtol) {
  require_same_family(p1, p2);
  require_distinct(p1, p2);
  const auto& lo = p1.a < p2.a ? p1 : p2;
  const auto& hi = p1.a < p2.a ? p2 : p1;

  // ln t is convex with limits +inf at both ends; its zeros are the crossings.
  const numerics::ScalarFn log_ratio = [&](double x) { return dist::log_density_ratio(x, lo, hi); };
  const double x_min = numerics::minimize_1d(log_ratio, {0.0, 1.0}, xtol);
  if (!(log_ratio(x_min) < 0.0)) {
    throw Error(ErrorCode::RatioAboveOne, "density ratio never drops below one");
  }

  double left = 0.5 * x_min;
  while (log_ratio(left) <= 0.0) {
    left *= 0.5;
    if (left == 0.0) throw Error(ErrorCode::NoSignChange, "left density crossing not bracketed");
  }
  double right_gap = 0.5 * (1.0 - x_min);
  while (log_ratio(1.0 - right_gap) <= 0.0) {
    right_gap *= 0.5;
    if (1.0 - right_gap == 1.0) throw Error(ErrorCode::NoSignChange, "right density crossing not bracketed");
  }
  const double x1 = numerics::find_root(log_ratio, {left, x_min}, xtol);
  const double x2 = numerics::find_root(log_ratio, {x_min, 1.0 - right_gap}, xtol);
  return {x1, x2};
}

BunchingReport verify_bunching(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                               std::size_t grid_size, double xtol) {
  require_same_family(p1, p2);
  require_distinct(p1, p2);
  if (grid_size < 64) {
    throw Error(ErrorCode::DomainError, "verification grid needs at least 64 points");
  }

  BunchingReport report;
  report.a1 = p1.a;
  report.a2 = p2.a;
  report.n = p1.n;
  report.m = p1.m;
  report.grid_size = grid_size;
  report.x_star = crossing_point(p1, p2, xtol);
  std::tie(report.density_cross_lo, report.density_cross_hi) = density_crossings(p1, p2, xtol);

  // The member with the larger a must be the concentrated one.
  const auto& spread = p1.a < p2.a ? p1 : p2;
  const auto& tight = p1.a < p2.a ? p2 : p1;

  const auto grid = uniform_grid(grid_size);
  std::vector<double> diffs;
  diffs.reserve(grid.size());
  bool pattern = true;
  for (double x : grid) {
    diffs.push_back(cdf_difference(x, p1, p2));
    if (std::fabs(x - report.x_star) <= xtol) continue;
    if (x < report.x_star) {
      pattern = pattern && dist::restricted_cdf(x, spread) > dist::restricted_cdf(x, tight);
    } else {
      pattern = pattern && dist::restricted_sf(x, spread) > dist::restricted_sf(x, tight);
    }
  }
  report.sign_changes = sign_changes(diffs);
  report.verified = pattern && report.sign_changes == 1 &&
                    report.density_cross_lo < report.x_star && report.x_star < report.density_cross_hi;
  report.icv_conclusion = check_icv_icx(p1, p2, grid_size);
  return report;
}

std::size_t sign_changes(std::span<const double> values) {
  std::size_t changes = 0;
  int previous = 0;
  for (double v : values) {
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0) continue;
    if (previous != 0 && sign != previous) ++changes;
    previous = sign;
  }
  return changes;
}

IcvConclusion check_icv_icx(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                            std::size_t grid_size) {
  require_same_family(p1, p2);
  const auto grid = uniform_grid(grid_size);
  std::vector<double> diffs;
  diffs.reserve(grid.size());
  for (double x : grid) diffs.push_back(cdf_difference(x, p1, p2));

  const std::size_t changes = sign_changes(diffs);
  const auto first = std::find_if(diffs.begin(), diffs.end(), [](double v) { return v != 0.0; });
  if (changes > 1 || first == diffs.end()) return IcvConclusion::inconclusive;

  const double mean1 = dist::restricted_moments(p1).mean;
  const double mean2 = dist::restricted_moments(p2).mean;
  // S^-(F2 - F1) <= 1 starting with '-': X_{a2} >=_icv X_{a1} iff E X_{a2} >= E X_{a1}.
  if (*first < 0.0) return mean2 >= mean1 ? IcvConclusion::a2_dominates_icv : IcvConclusion::inconclusive;
  return mean1 >= mean2 ? IcvConclusion::a1_dominates_icv : IcvConclusion::inconclusive;
}

XstarCurve xstar_curve(std::span<const double> n_grid, double m, double a1, double a2) {
  if (n_grid.empty()) throw Error(ErrorCode::DomainError, "n grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < m || (i > 0 && !(n_grid[i] > n_grid[i - 1]))) {
      throw Error(ErrorCode::DomainError, "n grid must be strictly increasing with every n >= m");
    }
  }
  XstarCurve curve;
  std::vector<double> xs;
  for (double n : n_grid) {
    const double x = crossing_point({a1, n, m}, {a2, n, m});
    curve.points.push_back({n, x});
    xs.push_back(x);
  }
  curve.strictly_increasing = strictly_monotone(xs, true);
  return curve;
}

TransformCrossing transform_crossing(const RestrictedBetaParams& p1, const RestrictedBetaParams& p2,
                                     const MonotoneTransform& transform) {
  require_same_family(p1, p2);
  require_distinct(p1, p2);
  const auto& lo = p1.a < p2.a ? p1 : p2;
  const auto& hi = p1.a < p2.a ? p2 : p1;
  const bool increasing = transform.increasing();

  // CDFs of T(X): F(T^-1(y)) for increasing T, 1 - F(T^-1(y)) otherwise.
  const numerics::ScalarFn diff = [&](double y) {
    const double x = std::clamp(transform.inverse(y), 0.0, 1.0);
    return increasing ? cdf_difference(x, lo, hi) : -cdf_difference(x, lo, hi);
  };

  std::vector<double> ys;
  for (double x : scan_points()) {
    const double y = transform.apply(x);
    if (!std::isfinite(y)) {
      throw Error(ErrorCode::NonMonotoneTransform, "transform is not finite on (0,1)");
    }
    ys.push_back(y);
  }
  // Neighbouring scan points may round to the same image; only an order
  // reversal or a constant map disqualifies the transform.
  const bool ordered = increasing ? std::is_sorted(ys.begin(), ys.end())
                                  : std::is_sorted(ys.rbegin(), ys.rend());
  if (!ordered || ys.front() == ys.back()) {
    throw Error(ErrorCode::NonMonotoneTransform, "transform is not strictly monotone on (0,1)");
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  // Either way G2 - G1 is negative below the transformed crossing.
  const auto bracket = bracket_sign_change(diff, ys);
  const double scale = std::max({1.0, std::fabs(bracket.lo), std::fabs(bracket.hi)});
  const double y_star = numerics::find_root(diff, bracket, kDefaultXtol * scale);
  return {y_star, increasing};
}

ConjectureScan half_cdf_scan(double n, double m, std::span<const double> a_grid) {
  ConjectureScan scan;
  std::vector<double> values;
  for (std::size_t i = 0; i < a_grid.size(); ++i) {
    if (i > 0 && !(a_grid[i] > a_grid[i - 1])) {
      throw Error(ErrorCode::DomainError, "a grid must be strictly increasing");
    }
    const double value = dist::restricted_cdf(0.5, {a_grid[i], n, m});
    scan.points.push_back({a_grid[i], value});
    values.push_back(value);
  }
  scan.strictly_decreasing = !values.empty() && strictly_monotone(values, false);
  return scan;
}

ConjectureScan conjecture_scan(double n, double m, std::span<const double> a_grid) {
  if (!(n > m)) {
    throw Error(ErrorCode::DomainError, "the P_a(1/2) conjecture concerns n > m only");
  }
  return half_cdf_scan(n, m, a_grid);
}

double gamma_mc_oracle(double n, double m, double a, std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw Error(ErrorCode::DomainError, "gamma MC oracle needs at least 1e4 samples");
  const RestrictedBetaParams params(a, n, m);
  const double shape_u = params.n * params.a;
  const double shape_v = params.m * params.a;
  random::Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = rng.gamma(shape_u);
    const double v = rng.gamma(shape_v);
    hits += (u < v) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double binomial_standard_error(double p, std::size_t samples) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}

}  // namespace bunchkit::bunching
