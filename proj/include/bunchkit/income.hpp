#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bunchkit/fitting.hpp"

namespace bunchkit::income {

using fitting::FitConfig;
using fitting::GroupedTable;

inline constexpr double kDefaultXiTolerance = 0.005;

struct TrendRow {
  int year = 0;
  double a_hat = 0.0;
  double xi_hat = 0.0;
  double neg_a = 0.0;
  /// NaN when the fitted GB2 has no mean (beta * gamma <= 1) or the fit failed.
  double gini_model = 0.0;
  std::optional<double> gini_official;
  double chi_square = 0.0;
  bool converged = false;
  std::string note;
};

enum class YearComparison { year2_more_bunched, year1_more_bunched, not_comparable };

std::string_view to_string(YearComparison c) noexcept;

/// Parses `year,bin_lower_kusd,bin_upper_kusd,percent[,median_kusd][,gini_official]`
/// (header required, columns matched by name). An empty upper edge marks the
/// open top bin. Throws ParseError with the offending line number, or
/// ValidationError for a year whose bins are inconsistent.
std::vector<GroupedTable> parse_grouped_csv(std::istream& in);
std::vector<GroupedTable> load_grouped_csv(const std::filesystem::path& path);

/// `year,gini` file of externally published Gini indices.
std::map<int, double> load_official_gini(const std::filesystem::path& path);

/// 1 - (1/mu) * integral_0^inf S(x)^2 dx, integrated in Beta space.
/// Throws MeanUndefined when beta * gamma <= 1.
double model_gini(const fitting::GB2Params& p);

/// Gini of a Beta(alpha, beta) variable on [0, 1].
double beta_gini(const specfun::ShapePair& p);

/// Fits every table and assembles rows in ascending year order. Per-year
/// failures are recorded in the row (converged = false, note set).
std::vector<TrendRow> build_trend(const std::vector<GroupedTable>& tables, const FitConfig& config);

/// Larger a means more bunched; only meaningful when the xi values agree.
YearComparison compare_years(const TrendRow& row1, const TrendRow& row2,
                             double xi_tolerance = kDefaultXiTolerance);

/// `year,a_hat,xi_hat,neg_a,gini_model,gini_official,chi_square,converged`;
/// undefined values are written as empty fields.
void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows);

}  // namespace bunchkit::income
