#include "bunchkit/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "bunchkit/bunching.hpp"
#include "bunchkit/error.hpp"
#include "bunchkit/fitting.hpp"
#include "bunchkit/format.hpp"
#include "bunchkit/income.hpp"

namespace bunchkit::cli {

namespace {

using json = nlohmann::ordered_json;

struct Range {
  std::string text;
  std::vector<double> values;
};

// "lo:hi:step", both ends inclusive up to half a step of rounding.
Range parse_range(const std::string& text) {
  double parts[3] = {};
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const auto colon = text.find(':', start);
    if ((i < 2) == (colon == std::string::npos)) {
      throw Error(ErrorCode::DomainError, "range must look like lo:hi:step, got '" + text + "'");
    }
    const std::string_view field(text.data() + start, (i < 2 ? colon : text.size()) - start);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), parts[i]);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(parts[i])) {
      throw Error(ErrorCode::DomainError, "bad number in range '" + text + "'");
    }
    start = colon + 1;
  }
  const double lo = parts[0];
  const double hi = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || hi < lo) {
    throw Error(ErrorCode::DomainError, "range needs step > 0 and hi >= lo: '" + text + "'");
  }
  Range range{text, {}};
  for (std::size_t k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > hi + 0.5 * step) break;
    range.values.push_back(v);
  }
  return range;
}

std::uint64_t seed_from_env() {
  const char* raw = std::getenv("BUNCHKIT_SEED");
  if (raw == nullptr || *raw == '\0') return kDefaultSeed;
  std::uint64_t seed = 0;
  const std::string_view s(raw);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::DomainError, "BUNCHKIT_SEED must be an unsigned integer");
  }
  return seed;
}

std::string fmt(double v) { return format_double(v); }

json json_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Ordered key/value settings echoed at the top of every report.
using Settings = std::vector<std::pair<std::string, std::string>>;

void write_comment_header(std::ostream& os, const std::string& command, const Settings& settings) {
  os << "# bunchkit " << command << '\n' << '#';
  for (const auto& [k, v] : settings) os << ' ' << k << '=' << v;
  os << '\n';
}

json settings_json(const Settings& settings) {
  json j = json::object();
  for (const auto& [k, v] : settings) j[k] = v;
  return j;
}

struct OutputTarget {
  std::string path;

  void emit(const std::string& text, std::ostream& out) const {
    if (path.empty()) {
      out << text;
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::DomainError, "cannot write " + path);
    file << text;
  }
};

struct CompareArgs {
  double n = 1.0;
  double m = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  std::size_t grid = bunching::kDefaultGridSize;
  double xtol = bunching::kDefaultXtol;
  std::string format = "text";
  OutputTarget target;
};

int run_compare(const CompareArgs& args, std::ostream& out) {
  const dist::RestrictedBetaParams p1(args.a1, args.n, args.m);
  const dist::RestrictedBetaParams p2(args.a2, args.n, args.m);
  const auto report = bunching::verify_bunching(p1, p2, args.grid, args.xtol);

  const Settings settings = {{"n", fmt(args.n)},   {"m", fmt(args.m)},
                             {"a1", fmt(args.a1)}, {"a2", fmt(args.a2)},
                             {"grid", std::to_string(args.grid)}, {"xtol", fmt(args.xtol)}};
  const std::string verified = report.verified ? "true" : "false";
  const std::string icv(bunching::to_string(report.icv_conclusion));

  std::ostringstream os;
  if (args.format == "json") {
    json j;
    j["command"] = "compare";
    j["settings"] = settings_json(settings);
    j["report"] = {{"n", report.n},
                   {"m", report.m},
                   {"a1", report.a1},
                   {"a2", report.a2},
                   {"x_star", report.x_star},
                   {"density_cross_lo", report.density_cross_lo},
                   {"density_cross_hi", report.density_cross_hi},
                   {"grid_size", report.grid_size},
                   {"sign_changes", report.sign_changes},
                   {"verified", report.verified},
                   {"icv_conclusion", icv}};
    os << j.dump(2) << '\n';
  } else if (args.format == "csv") {
    write_comment_header(os, "compare", settings);
    os << "n,m,a1,a2,x_star,density_cross_lo,density_cross_hi,grid_size,sign_changes,verified,icv_conclusion\n"
       << fmt(report.n) << ',' << fmt(report.m) << ',' << fmt(report.a1) << ',' << fmt(report.a2) << ','
       << fmt(report.x_star) << ',' << fmt(report.density_cross_lo) << ',' << fmt(report.density_cross_hi) << ','
       << report.grid_size << ',' << report.sign_changes << ',' << verified << ',' << icv << '\n';
  } else {
    write_comment_header(os, "compare", settings);
    os << "x_star=" << fmt(report.x_star) << '\n'
       << "density_cross_lo=" << fmt(report.density_cross_lo) << '\n'
       << "density_cross_hi=" << fmt(report.density_cross_hi) << '\n'
       << "sign_changes=" << report.sign_changes << '\n'
       << "verified=" << verified << '\n'
       << "icv_conclusion=" << icv << '\n';
  }
  args.target.emit(os.str(), out);
  return report.verified ? kExitOk : kExitVerificationFailed;
}

struct XstarArgs {
  double m = 1.0;
  std::string n_range;
  double a1 = 0.0;
  double a2 = 0.0;
  std::string format = "text";
  OutputTarget target;
};

int run_xstar(const XstarArgs& args, std::ostream& out) {
  const auto range = parse_range(args.n_range);
  const auto curve = bunching::xstar_curve(range.values, args.m, args.a1, args.a2);
  const Settings settings = {
      {"m", fmt(args.m)}, {"n_range", range.text}, {"a1", fmt(args.a1)}, {"a2", fmt(args.a2)}};
  const std::string verdict = curve.strictly_increasing ? "strictly_increasing" : "not_strictly_increasing";

  std::ostringstream os;
  if (args.format == "json") {
    json rows = json::array();
    for (const auto& p : curve.points) rows.push_back({{"n", p.n}, {"x_star", p.x_star}});
    json j = {{"command", "xstar"}, {"settings", settings_json(settings)}, {"rows", rows},
              {"strictly_increasing", curve.strictly_increasing}};
    os << j.dump(2) << '\n';
  } else {
    write_comment_header(os, "xstar", settings);
    os << "n,x_star\n";
    for (const auto& p : curve.points) os << fmt(p.n) << ',' << fmt(p.x_star) << '\n';
    os << "# verdict=" << verdict << '\n';
  }
  args.target.emit(os.str(), out);
  return kExitOk;
}

struct ConjectureArgs {
  double n = 0.0;
  double m = 1.0;
  std::string a_range;
  std::size_t mc_samples = 0;
  std::string format = "text";
  OutputTarget target;
};

int run_conjecture(const ConjectureArgs& args, std::ostream& out) {
  const auto range = parse_range(args.a_range);
  const auto scan = bunching::conjecture_scan(args.n, args.m, range.values);
  Settings settings = {{"n", fmt(args.n)}, {"m", fmt(args.m)}, {"a_range", range.text}};

  std::vector<double> mc;
  if (args.mc_samples > 0) {
    const auto seed = seed_from_env();
    settings.emplace_back("mc_samples", std::to_string(args.mc_samples));
    settings.emplace_back("seed", std::to_string(seed));
    for (const auto& p : scan.points) {
      mc.push_back(bunching::gamma_mc_oracle(args.n, args.m, p.a, args.mc_samples, seed));
    }
  }
  const std::string verdict = scan.strictly_decreasing ? "strictly_decreasing" : "not_strictly_decreasing";

  std::ostringstream os;
  if (args.format == "json") {
    json rows = json::array();
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
      json row = {{"a", scan.points[i].a}, {"cdf_at_half", scan.points[i].cdf_at_half}};
      if (!mc.empty()) row["mc_estimate"] = mc[i];
      rows.push_back(row);
    }
    json j = {{"command", "conjecture"}, {"settings", settings_json(settings)}, {"rows", rows},
              {"strictly_decreasing", scan.strictly_decreasing}};
    os << j.dump(2) << '\n';
  } else {
    write_comment_header(os, "conjecture", settings);
    os << (mc.empty() ? "a,cdf_at_half\n" : "a,cdf_at_half,mc_estimate\n");
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
      os << fmt(scan.points[i].a) << ',' << fmt(scan.points[i].cdf_at_half);
      if (!mc.empty()) os << ',' << fmt(mc[i]);
      os << '\n';
    }
    os << "# verdict=" << verdict << '\n';
  }
  args.target.emit(os.str(), out);
  return kExitOk;
}

struct FitArgs {
  std::string input;
  std::optional<double> scale_value;
  bool free_scale = false;
  bool median_scale = false;
  std::string gamma = "fixed";
  double xi_tol = income::kDefaultXiTolerance;
  std::string gini_path;
  std::string format;
  OutputTarget target;

  fitting::FitConfig config() const {
    fitting::FitConfig c;
    if (scale_value) {
      c.scale_mode = fitting::ScaleMode::provided;
      c.provided_scale = *scale_value;
    } else if (free_scale) {
      c.scale_mode = fitting::ScaleMode::free;
    }
    c.gamma_mode = gamma == "free" ? fitting::GammaMode::free : fitting::GammaMode::fixed_one;
    return c;
  }

  Settings settings() const {
    std::string scale = "median";
    if (scale_value) scale = fmt(*scale_value);
    if (free_scale) scale = "free";
    return {{"input", input}, {"scale", scale}, {"gamma", gamma}, {"xi_tol", fmt(xi_tol)}};
  }
};

std::vector<fitting::GroupedTable> load_tables(const FitArgs& args) {
  auto tables = income::load_grouped_csv(args.input);
  std::filesystem::path gini = args.gini_path;
  if (gini.empty()) {
    const auto sibling = std::filesystem::path(args.input).parent_path() / "gini_official.csv";
    if (std::filesystem::exists(sibling)) gini = sibling;
  }
  if (!gini.empty()) {
    const auto official = income::load_official_gini(gini);
    for (auto& t : tables) {
      if (const auto it = official.find(t.year); it != official.end()) t.gini_official = it->second;
    }
  }
  return tables;
}

int run_fit(const FitArgs& args, std::ostream& out) {
  const auto tables = load_tables(args);
  const auto config = args.config();
  bool all_converged = true;

  struct Row {
    int year;
    std::optional<fitting::FitResult> fit;
    std::string note;
  };
  std::vector<Row> rows;
  for (const auto& t : tables) {
    try {
      auto fit = fitting::fit_gb2(t, config);
      all_converged = all_converged && fit.converged;
      std::string note = fit.note;
      rows.push_back({t.year, std::move(fit), std::move(note)});
    } catch (const Error& e) {
      all_converged = false;
      rows.push_back({t.year, std::nullopt, e.what()});
    }
  }

  std::ostringstream os;
  if (args.format == "json") {
    json fits = json::array();
    for (const auto& r : rows) {
      json j = {{"year", r.year}, {"converged", r.fit && r.fit->converged}, {"note", r.note}};
      if (r.fit) {
        const auto& f = *r.fit;
        j["scale_b"] = f.params.scale_b;
        j["gamma"] = f.params.gamma;
        j["alpha"] = f.params.alpha;
        j["beta"] = f.params.beta;
        j["xi"] = f.xi_a.xi;
        j["a"] = f.xi_a.a;
        j["chi_square"] = f.chi_square;
        j["iterations"] = f.iterations;
      }
      fits.push_back(j);
    }
    os << json{{"command", "fit"}, {"settings", settings_json(args.settings())}, {"fits", fits}}.dump(2) << '\n';
  } else {
    write_comment_header(os, "fit", args.settings());
    os << "year,scale_b,gamma,alpha,beta,xi,a,chi_square,converged,iterations,note\n";
    for (const auto& r : rows) {
      os << r.year << ',';
      if (r.fit) {
        const auto& f = *r.fit;
        os << fmt(f.params.scale_b) << ',' << fmt(f.params.gamma) << ',' << fmt(f.params.alpha) << ','
           << fmt(f.params.beta) << ',' << fmt(f.xi_a.xi) << ',' << fmt(f.xi_a.a) << ',' << fmt(f.chi_square)
           << ',' << (f.converged ? "true" : "false") << ',' << f.iterations << ',';
      } else {
        os << ",,,,,,,false,,";
      }
      std::string note = r.note;
      for (char& c : note) {
        if (c == ',' || c == '\n') c = ';';
      }
      os << note << '\n';
    }
  }
  args.target.emit(os.str(), out);
  return all_converged ? kExitOk : kExitPartialFitFailure;
}

int run_trend(const FitArgs& args, std::ostream& out) {
  const auto tables = load_tables(args);
  const auto rows = income::build_trend(tables, args.config());
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.converged;

  std::ostringstream table;
  if (args.format == "json") {
    json arr = json::array();
    for (const auto& r : rows) {
      arr.push_back({{"year", r.year},
                     {"a_hat", json_number(r.a_hat)},
                     {"xi_hat", json_number(r.xi_hat)},
                     {"neg_a", json_number(r.neg_a)},
                     {"gini_model", json_number(r.gini_model)},
                     {"gini_official", r.gini_official ? json(*r.gini_official) : json(nullptr)},
                     {"chi_square", json_number(r.chi_square)},
                     {"converged", r.converged},
                     {"note", r.note}});
    }
    table << json{{"command", "trend"}, {"settings", settings_json(args.settings())}, {"rows", arr}}.dump(2)
          << '\n';
  } else {
    income::write_trend_csv(table, rows);
  }

  std::ostringstream summary;
  write_comment_header(summary, "trend", args.settings());
  std::size_t converged = 0;
  for (const auto& r : rows) converged += r.converged ? 1 : 0;
  summary << "# years=" << rows.size() << " converged=" << converged << '\n';
  for (const auto& r : rows) {
    if (!r.note.empty()) summary << "# " << r.year << ": " << r.note << '\n';
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    summary << "# " << rows[i - 1].year << "->" << rows[i].year << ": "
            << income::to_string(income::compare_years(rows[i - 1], rows[i], args.xi_tol)) << '\n';
  }

  if (args.target.path.empty()) {
    out << table.str();
    if (args.format != "json") out << summary.str();
  } else {
    args.target.emit(table.str(), out);
    out << summary.str();
  }
  return all_converged ? kExitOk : kExitPartialFitFailure;
}

void add_format(CLI::App* cmd, std::string& format, const std::vector<std::string>& allowed) {
  cmd->add_option("--format", format, "Output format")->check(CLI::IsMember(allowed))->capture_default_str();
}

void add_fit_options(CLI::App* cmd, FitArgs& args) {
  cmd->add_option("--input", args.input, "Grouped income CSV")->required()->check(CLI::ExistingFile);
  auto* median = cmd->add_flag("--scale-median", args.median_scale,
                               "Scale breakpoints by the year's median (default)");
  auto* value = cmd->add_option("--scale", args.scale_value, "Fixed GB2 scale in k$")->check(CLI::PositiveNumber);
  auto* free = cmd->add_flag("--free-scale", args.free_scale, "Estimate the scale as a free parameter");
  median->excludes(value)->excludes(free);
  value->excludes(free);
  cmd->add_option("--gamma", args.gamma, "GB2 gamma: fixed at 1 or free")
      ->check(CLI::IsMember({"fixed", "free"}))
      ->capture_default_str();
  cmd->add_option("--xi-tol", args.xi_tol, "xi tolerance for year comparisons")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--gini", args.gini_path, "year,gini file of published Gini indices")->check(CLI::ExistingFile);
  cmd->add_option("--out", args.target.path, "Write the table to this path instead of stdout");
}

}  // namespace

namespace {

// Valid flags for which the landmark searches broke down.
bool numerical_failure(ErrorCode code) {
  return code == ErrorCode::NoSignChange || code == ErrorCode::RatioAboveOne ||
         code == ErrorCode::MaxDepthExceeded || code == ErrorCode::NonFiniteObjective;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bunching order for restricted Beta families and GB2 income fits", "bunchkit"};
  app.require_subcommand(1);

  CompareArgs compare;
  auto* c = app.add_subcommand("compare", "Locate x* and verify the bunching order of Beta(n a, m a) pairs");
  c->add_option("--n", compare.n, "Weight n")->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--m", compare.m, "Weight m")->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--a1", compare.a1, "First family parameter")->required()->check(CLI::PositiveNumber);
  c->add_option("--a2", compare.a2, "Second family parameter")->required()->check(CLI::PositiveNumber);
  c->add_option("--grid", compare.grid, "Verification grid size")->check(CLI::Range(64, 1 << 24))
      ->capture_default_str();
  c->add_option("--xtol", compare.xtol, "Root tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  add_format(c, compare.format, {"text", "json", "csv"});
  c->add_option("--out", compare.target.path, "Write the report to this path instead of stdout");

  XstarArgs xstar;
  auto* x = app.add_subcommand("xstar", "Trace the crossing point x* as n varies");
  x->add_option("--m", xstar.m, "Weight m")->check(CLI::PositiveNumber)->capture_default_str();
  x->add_option("--n-range", xstar.n_range, "lo:hi:step")->required();
  x->add_option("--a1", xstar.a1, "First family parameter")->required()->check(CLI::PositiveNumber);
  x->add_option("--a2", xstar.a2, "Second family parameter")->required()->check(CLI::PositiveNumber);
  add_format(x, xstar.format, {"text", "json", "csv"});
  x->add_option("--out", xstar.target.path, "Write the table to this path instead of stdout");

  ConjectureArgs conj;
  auto* k = app.add_subcommand("conjecture", "Scan F_a(1/2) over a for n > m");
  k->add_option("--n", conj.n, "Weight n")->required()->check(CLI::PositiveNumber);
  k->add_option("--m", conj.m, "Weight m")->check(CLI::PositiveNumber)->capture_default_str();
  k->add_option("--a-range", conj.a_range, "lo:hi:step")->required();
  k->add_option("--mc-samples", conj.mc_samples, "Add a Gamma Monte Carlo column with this many samples")
      ->check(CLI::Range(std::size_t{10000}, std::size_t{1} << 32));
  add_format(k, conj.format, {"text", "json", "csv"});
  k->add_option("--out", conj.target.path, "Write the table to this path instead of stdout");

  FitArgs fit;
  fit.format = "text";
  auto* f = app.add_subcommand("fit", "Minimum chi-square GB2 fit per year");
  add_fit_options(f, fit);
  add_format(f, fit.format, {"text", "json", "csv"});

  FitArgs trend;
  trend.format = "csv";
  auto* t = app.add_subcommand("trend", "Per-year a-hat, xi-hat and model Gini trend table");
  add_fit_options(t, trend);
  add_format(t, trend.format, {"csv", "json"});

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("bunchkit");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_storage) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c->parsed()) {
      try {
        return run_compare(compare, out);
      } catch (const Error& e) {
        if (!numerical_failure(e.code())) throw;
        err << "error: verification could not be completed: " << e.what() << '\n';
        return kExitVerificationFailed;
      }
    }
    if (x->parsed()) return run_xstar(xstar, out);
    if (k->parsed()) return run_conjecture(conj, out);
    if (f->parsed()) return run_fit(fit, out);
    if (t->parsed()) return run_trend(trend, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace bunchkit::cli
