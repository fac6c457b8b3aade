#include "bunchkit/income.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "bunchkit/error.hpp"
#include "bunchkit/format.hpp"
#include "bunchkit/numerics.hpp"

namespace bunchkit::income {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                              : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

double parse_number(std::string_view field, std::size_t line_no, std::string_view column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    parse_fail(line_no, "bad number '" + std::string(field) + "' in column " + std::string(column));
  }
  return value;
}

int parse_year(std::string_view field, std::size_t line_no) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    parse_fail(line_no, "bad year '" + std::string(field) + "'");
  }
  return value;
}

struct CsvRow {
  std::size_t line_no;
  double lower;
  std::optional<double> upper;
  double percent;
  std::optional<double> median;
  std::optional<double> gini;
};

[[noreturn]] void validation_fail(int year, const std::string& what) {
  throw Error(ErrorCode::ValidationError, "year " + std::to_string(year) + ": " + what);
}

std::optional<double> consistent(int year, const std::vector<CsvRow>& rows, std::optional<double> CsvRow::*field,
                                 const char* name) {
  std::optional<double> value;
  for (const auto& row : rows) {
    const auto& v = row.*field;
    if (!v) continue;
    if (value && *value != *v) validation_fail(year, std::string(name) + " differs between rows");
    value = v;
  }
  return value;
}

GroupedTable assemble(int year, std::vector<CsvRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const CsvRow& l, const CsvRow& r) { return l.lower < r.lower; });
  GroupedTable table;
  table.year = year;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const bool last = i + 1 == rows.size();
    if (!row.upper && !last) validation_fail(year, "open bin (empty upper edge) must be the top bin");
    if (row.upper && last) validation_fail(year, "top bin must be open (empty upper edge)");
    if (row.upper && !last && *row.upper != rows[i + 1].lower) {
      validation_fail(year, "bins are not contiguous at " + format_double(*row.upper));
    }
    if (row.upper && !(*row.upper > row.lower)) {
      validation_fail(year, "bin upper edge must exceed its lower edge (line " + std::to_string(row.line_no) + ")");
    }
    table.edges_kusd.push_back(row.lower);
    table.percents.push_back(row.percent);
  }
  table.median_kusd = consistent(year, rows, &CsvRow::median, "median_kusd");
  table.gini_official = consistent(year, rows, &CsvRow::gini, "gini_official");
  table.validate();
  return table;
}

}  // namespace

std::string_view to_string(YearComparison c) noexcept {
  switch (c) {
    case YearComparison::year2_more_bunched: return "year2_more_bunched";
    case YearComparison::year1_more_bunched: return "year1_more_bunched";
    case YearComparison::not_comparable: return "not_comparable";
  }
  return "not_comparable";
}

std::vector<GroupedTable> parse_grouped_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;

  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (auto f : split_fields(line)) header.emplace_back(f);
  }
  if (header.empty()) throw Error(ErrorCode::ParseError, "line 1: empty input, header required");

  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  static constexpr std::string_view kKnown[] = {"year", "bin_lower_kusd", "bin_upper_kusd", "percent",
                                                "median_kusd", "gini_official"};
  for (const auto& h : header) {
    if (std::find(std::begin(kKnown), std::end(kKnown), h) == std::end(kKnown)) {
      parse_fail(line_no, "unknown column '" + h + "'");
    }
  }
  const auto c_year = column("year");
  const auto c_lower = column("bin_lower_kusd");
  const auto c_upper = column("bin_upper_kusd");
  const auto c_percent = column("percent");
  const auto c_median = column("median_kusd");
  const auto c_gini = column("gini_official");
  if (!c_year || !c_lower || !c_upper || !c_percent) {
    parse_fail(line_no, "header must name year, bin_lower_kusd, bin_upper_kusd and percent");
  }

  std::map<int, std::vector<CsvRow>> by_year;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      parse_fail(line_no, "expected " + std::to_string(header.size()) + " fields, found " +
                              std::to_string(fields.size()));
    }
    CsvRow row{};
    row.line_no = line_no;
    const int year = parse_year(fields[*c_year], line_no);
    row.lower = parse_number(fields[*c_lower], line_no, "bin_lower_kusd");
    if (!fields[*c_upper].empty()) row.upper = parse_number(fields[*c_upper], line_no, "bin_upper_kusd");
    row.percent = parse_number(fields[*c_percent], line_no, "percent");
    if (c_median && !fields[*c_median].empty()) row.median = parse_number(fields[*c_median], line_no, "median_kusd");
    if (c_gini && !fields[*c_gini].empty()) row.gini = parse_number(fields[*c_gini], line_no, "gini_official");
    by_year[year].push_back(row);
  }
  if (by_year.empty()) parse_fail(line_no, "no data rows after the header");

  std::vector<GroupedTable> tables;
  for (auto& [year, rows] : by_year) tables.push_back(assemble(year, std::move(rows)));
  return tables;
}

std::vector<GroupedTable> load_grouped_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  return parse_grouped_csv(in);
}

std::map<int, double> load_official_gini(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  std::map<int, double> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!seen_header) {
      if (fields.size() != 2 || fields[0] != "year" || fields[1] != "gini") {
        parse_fail(line_no, "gini file header must be 'year,gini'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != 2) parse_fail(line_no, "expected 2 fields");
    out[parse_year(fields[0], line_no)] = parse_number(fields[1], line_no, "gini");
  }
  if (!seen_header) throw Error(ErrorCode::ParseError, "line 1: empty gini file");
  return out;
}

double model_gini(const fitting::GB2Params& p) {
  const auto mean = dist::gb2_mean(p);
  if (!mean.exists) {
    throw Error(ErrorCode::MeanUndefined, "GB2 mean is infinite (beta * gamma <= 1)");
  }
  const auto shapes = p.shapes();
  const double log_front = std::log(p.scale_b / p.gamma);
  const double inv_gamma = 1.0 / p.gamma;
  // x = b (w / (1 - w))^(1/gamma), dx/dw = (b/gamma) w^(1/gamma - 1) (1 - w)^(-1/gamma - 1).
  const numerics::ScalarFn integrand = [&](double w) {
    if (!(w > 0.0 && w < 1.0)) return kNaN;
    const double sf = specfun::reg_inc_beta_complement(w, shapes);
    if (sf == 0.0) return 0.0;
    return std::exp(2.0 * std::log(sf) + log_front + (inv_gamma - 1.0) * std::log(w) -
                    (inv_gamma + 1.0) * std::log1p(-w));
  };
  const double squared_survival = numerics::integrate(integrand, 0.0, 1.0, 1e-11 * mean.value);
  return 1.0 - squared_survival / mean.value;
}

double beta_gini(const specfun::ShapePair& p) {
  const double mean = p.alpha / (p.alpha + p.beta);
  const numerics::ScalarFn integrand = [&](double x) {
    const double sf = specfun::reg_inc_beta_complement(x, p);
    return sf * sf;
  };
  return 1.0 - numerics::integrate(integrand, 0.0, 1.0, 1e-12) / mean;
}

std::vector<TrendRow> build_trend(const std::vector<GroupedTable>& tables, const FitConfig& config) {
  std::vector<const GroupedTable*> ordered;
  for (const auto& t : tables) ordered.push_back(&t);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const GroupedTable* l, const GroupedTable* r) { return l->year < r->year; });

  std::vector<TrendRow> rows;
  for (const GroupedTable* table : ordered) {
    TrendRow row;
    row.year = table->year;
    row.gini_official = table->gini_official;
    try {
      const auto fit = fitting::fit_gb2(*table, config);
      row.a_hat = fit.xi_a.a;
      row.xi_hat = fit.xi_a.xi;
      row.neg_a = -row.a_hat;
      row.chi_square = fit.chi_square;
      row.converged = fit.converged;
      row.note = fit.note;
      row.gini_model = fit.params.has_mean() ? model_gini(fit.params) : kNaN;
    } catch (const Error& e) {
      row.a_hat = row.xi_hat = row.neg_a = row.gini_model = row.chi_square = kNaN;
      row.converged = false;
      row.note = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

YearComparison compare_years(const TrendRow& row1, const TrendRow& row2, double xi_tolerance) {
  if (!row1.converged || !row2.converged) return YearComparison::not_comparable;
  if (!(std::fabs(row1.xi_hat - row2.xi_hat) <= xi_tolerance)) return YearComparison::not_comparable;
  if (row1.a_hat < row2.a_hat) return YearComparison::year2_more_bunched;
  if (row1.a_hat > row2.a_hat) return YearComparison::year1_more_bunched;
  return YearComparison::not_comparable;
}

void write_trend_csv(std::ostream& out, const std::vector<TrendRow>& rows) {
  auto field = [](double v) { return std::isfinite(v) ? format_double(v) : std::string(); };
  out << "year,a_hat,xi_hat,neg_a,gini_model,gini_official,chi_square,converged\n";
  for (const auto& r : rows) {
    out << r.year << ',' << field(r.a_hat) << ',' << field(r.xi_hat) << ',' << field(r.neg_a) << ','
        << field(r.gini_model) << ',' << (r.gini_official ? format_double(*r.gini_official) : std::string())
        << ',' << field(r.chi_square) << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

}  // namespace bunchkit::income
