#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bunchkit/distributions.hpp"

namespace bunchkit::fitting {

using dist::GB2Params;
using dist::XiA;

/// Model probabilities below this make the chi-square return kChiSquarePenalty.
inline constexpr double kMinCellProbability = 1e-12;
inline constexpr double kChiSquarePenalty = 1e12;

/// One year of grouped income data. edges_kusd holds the lower edge of every
/// bin (first is 0); the last bin is open above. percents has one entry per
/// bin and sums to 100 up to publication rounding.
struct GroupedTable {
  int year = 0;
  std::vector<double> edges_kusd;
  std::vector<double> percents;
  /// Externally published median, when the input supplies one.
  std::optional<double> median_kusd;
  std::optional<double> gini_official;

  /// Throws ValidationError unless the invariants above hold and the
  /// percents sum to within [99, 101].
  void validate() const;
  /// Percents rescaled to proportions summing to one.
  std::vector<double> proportions() const;
};

enum class ScaleMode { fixed_median, provided, free };
enum class GammaMode { fixed_one, free };

struct FitConfig {
  ScaleMode scale_mode = ScaleMode::fixed_median;
  /// Used when scale_mode == provided; must be > 0.
  double provided_scale = 0.0;
  GammaMode gamma_mode = GammaMode::fixed_one;
  /// Overrides the default start (xi = 0.5, a = 4, gamma = 1, b = 1 in
  /// median-scaled units).
  std::optional<GB2Params> start;
  std::size_t maxiter = 20000;
  double ftol = 1e-15;
};

struct FitResult {
  /// Fitted parameters in the table's units (scale_b in k$).
  GB2Params params{1.0, 1.0, 1.0, 1.0};
  XiA xi_a{0.5, 2.0};
  double chi_square = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  /// Fewer bins than free parameters + 1: the fit is underdetermined.
  bool degenerate = false;
  /// Empty on success; otherwise a short diagnostic.
  std::string note;
};

/// Cell probabilities for bins with the given lower edges, the last bin
/// open. Any mass below edges[0] is folded into the first cell.
std::vector<double> bin_probabilities(const GB2Params& p, std::span<const double> edges_kusd);

/// Sum over bins of (o - pi)^2 / pi with o the observed proportions.
double chi_square_objective(const GB2Params& p, const GroupedTable& table);

/// Linear interpolation of the grouped empirical CDF at one half.
double estimate_median_from_groups(const GroupedTable& table);

XiA xi_a_from_shapes(double alpha, double beta);

FitResult fit_gb2(const GroupedTable& table, const FitConfig& config = {});

/// Table whose percents are exactly 100 * bin_probabilities(p, edges).
GroupedTable synthesize_table(int year, const GB2Params& p, std::span<const double> edges_kusd);

/// Lower bin edges (k$) of the published household income tables.
std::vector<double> census_edges_kusd();

}  // namespace bunchkit::fitting
