// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bunchkit/bunching.hpp"
#include "bunchkit/cli.hpp"
#include "bunchkit/distributions.hpp"
#include "bunchkit/error.hpp"
#include "bunchkit/fitting.hpp"
#include "bunchkit/income.hpp"
#include "bunchkit/numerics.hpp"
#include "bunchkit/specfun.hpp"

using namespace bunchkit;
using bunching::MonotoneTransform;
using dist::RestrictedBetaParams;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) {
    o.pass = false;
    o.detail += " runtime over limit";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), secs);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const double kXstar21 = (1.0 + std::sqrt(17.0)) / 8.0;

Outcome special_functions() {
  const std::vector<double> shapes = {0.5, 1, 2, 5, 20};
  double worst_reflect = 0, worst_trip = 0, worst_tail_trip = 0;
  int over = 0;
  for (double a : shapes) {
    for (double b : shapes) {
      const specfun::ShapePair p(a, b);
      for (int k = 1; k <= 99; ++k) {
        const double x = k / 100.0;
        const double u = specfun::reg_inc_beta(x, p);
        worst_reflect = std::max(worst_reflect, std::fabs(u + specfun::reg_inc_beta(1 - x, p.swapped()) - 1));
        const double err = std::fabs(specfun::inv_reg_inc_beta(u, p) - x);
        worst_trip = std::max(worst_trip, err);
        if (err > 1e-9) ++over;
        const double back = u <= 0.5 ? specfun::inv_reg_inc_beta(u, p)
                                     : specfun::inv_reg_inc_beta_complement(specfun::reg_inc_beta_complement(x, p), p);
        worst_tail_trip = std::max(worst_tail_trip, std::fabs(back - x));
      }
    }
  }
  Outcome o;
  o.pass = worst_reflect <= 1e-12 && worst_trip <= 1e-9;
  o.detail = "reflection " + fmt("%.2e", worst_reflect) + ", round trip " + fmt("%.2e", worst_trip) + " (" +
             std::to_string(over) + "/2475 over 1e-9; upper-tail round trip via complement " +
             fmt("%.2e", worst_tail_trip) + ")";
  return o;
}

const std::vector<std::pair<double, double>> kSymmetricPairs = {{1, 2}, {1, 5}, {2, 3}, {0.5, 4}};

Outcome symmetric_anchor() {
  double worst = 0;
  for (auto [a1, a2] : kSymmetricPairs) {
    worst = std::max(worst, std::fabs(bunching::crossing_point({a1, 1, 1}, {a2, 1, 1}) - 0.5));
  }
  return {worst <= 1e-8, "max |x* - 1/2| " + fmt("%.2e", worst)};
}

Outcome asymmetric_oracle() {
  const double xs = bunching::crossing_point({1, 2, 1}, {2, 2, 1});
  const auto [lo, hi] = bunching::density_crossings({1, 1, 1}, {2, 1, 1});
  const double e1 = std::fabs(xs - kXstar21);
  const double e2 = std::max(std::fabs(lo - (3 - std::sqrt(3.0)) / 6), std::fabs(hi - (3 + std::sqrt(3.0)) / 6));
  return {e1 <= 1e-8 && e2 <= 1e-8, "x* error " + fmt("%.2e", e1) + ", density crossings error " + fmt("%.2e", e2)};
}

Outcome bunching_verification() {
  std::vector<std::array<double, 4>> cases;  // n, m, a1, a2
  for (auto [a1, a2] : kSymmetricPairs) cases.push_back({1, 1, a1, a2});
  cases.push_back({2, 1, 1, 2});
  int ok = 0;
  for (const auto& c : cases) {
    const RestrictedBetaParams p1(c[2], c[0], c[1]), p2(c[3], c[0], c[1]);
    const auto r = bunching::verify_bunching(p1, p2, 4096);
    const bool starts_negative = bunching::cdf_difference(1.0 / 4097.0, p1, p2) < 0.0;
    if (r.verified && r.sign_changes == 1 && starts_negative) ++ok;
  }
  return {ok == static_cast<int>(cases.size()), std::to_string(ok) + "/" + std::to_string(cases.size()) + " verified"};
}

Outcome convexity() {
  const std::vector<double> vals = {0.5, 1, 2, 5};
  int negatives = 0;
  double worst_fd = 0;
  for (double p : vals) {
    for (double q : vals) {
      for (int k = 1; k <= 999; ++k) {
        if (!(dist::ratio_second_derivative(k / 1000.0, p, q) > 0.0)) ++negatives;
      }
      // t(x) = K x^-p (1-x)^-q for Beta(p, q) against Beta(2p, 2q).
      const RestrictedBetaParams p1(1, p, q), p2(2, p, q);
      const double log_k = dist::log_density_ratio(0.5, p1, p2) - (p + q) * std::log(2.0);
      for (double x : {0.2, 0.5, 0.8}) {
        auto t = [&](double y) { return dist::density_ratio(y, p1, p2) / std::exp(log_k); };
        auto central = [&](double h) { return (t(x + h) - 2 * t(x) + t(x - h)) / (h * h); };
        // Richardson step removes the O(h^2) term.
        const double fd = (4 * central(5e-4) - central(1e-3)) / 3;
        const double exact = dist::ratio_second_derivative(x, p, q);
        worst_fd = std::max(worst_fd, std::fabs(fd - exact) / exact);
      }
    }
  }
  return {negatives == 0 && worst_fd <= 1e-6,
          std::to_string(negatives) + " non-positive values, worst finite-difference rel error " + fmt("%.2e", worst_fd)};
}

Outcome transform_invariance() {
  const RestrictedBetaParams p1(1, 2, 1), p2(2, 2, 1);
  const double xs = bunching::crossing_point(p1, p2);
  struct Named {
    const char* name;
    MonotoneTransform t;
    bool increasing;
  };
  const std::vector<Named> ts = {{"x^2", MonotoneTransform::power(2), true},
                                 {"2x+1", MonotoneTransform::affine(2, 1), true},
                                 {"exp", MonotoneTransform::exponential(1), true},
                                 {"1-x", MonotoneTransform::reflection(), false}};
  double worst = 0;
  bool directions = true;
  for (const auto& n : ts) {
    const auto tc = bunching::transform_crossing(p1, p2, n.t);
    worst = std::max(worst, std::fabs(tc.x_star_transformed - n.t.apply(xs)));
    directions = directions && tc.direction_preserved == n.increasing;
  }
  return {worst <= 1e-8 && directions,
          "max |crossing - T(x*)| " + fmt("%.2e", worst) + (directions ? ", directions as expected" : ", direction mismatch")};
}

Outcome conjecture_and_xstar() {
  std::vector<double> a_grid;
  for (int k = 1; k <= 40; ++k) a_grid.push_back(0.25 * k);
  int decreasing = 0;
  for (auto [n, m] : std::vector<std::pair<double, double>>{{2, 1}, {3, 1}, {3, 2}}) {
    if (bunching::conjecture_scan(n, m, a_grid).strictly_decreasing) ++decreasing;
  }
  std::vector<double> n_grid;
  for (int k = 0; k <= 20; ++k) n_grid.push_back(1.0 + 0.1 * k);
  const bool increasing = bunching::xstar_curve(n_grid, 1, 1, 2).strictly_increasing;
  return {decreasing == 3 && increasing, std::to_string(decreasing) + "/3 scans decreasing, x*(n) " +
                                             (increasing ? "strictly increasing" : "not increasing") +
                                             " (empirical observation)"};
}

Outcome mc_oracle() {
  const std::size_t samples = 1000000;
  double worst_z = 0;
  bool deterministic = true;
  for (auto [n, m, a] : std::vector<std::array<double, 3>>{{2, 1, 1}, {2, 1, 2}, {1, 1, 3}}) {
    const double exact = dist::restricted_cdf(0.5, {a, n, m});
    const double est = bunching::gamma_mc_oracle(n, m, a, samples, cli::kDefaultSeed);
    worst_z = std::max(worst_z, std::fabs(est - exact) / bunching::binomial_standard_error(exact, samples));
    deterministic = deterministic && est == bunching::gamma_mc_oracle(n, m, a, samples, cli::kDefaultSeed);
  }
  return {worst_z <= 4.0 && deterministic,
          "max deviation " + fmt("%.2f", worst_z) + " SE" + (deterministic ? ", deterministic" : ", NOT deterministic")};
}

Outcome fit_recovery() {
  std::mt19937_64 gen(20240917);
  std::uniform_real_distribution<double> shape(1.0, 5.0), scale(40.0, 80.0);
  double worst_rel = 0, worst_chi = 0;
  bool converged = true;
  for (int i = 0; i < 5; ++i) {
    const fitting::GB2Params truth(scale(gen), 1.0, shape(gen), shape(gen));
    const auto table = fitting::synthesize_table(2012 + i, truth, fitting::census_edges_kusd());
    fitting::FitConfig cfg;
    cfg.scale_mode = fitting::ScaleMode::provided;
    cfg.provided_scale = truth.scale_b;
    const auto r = fitting::fit_gb2(table, cfg);
    const auto want = fitting::xi_a_from_shapes(truth.alpha, truth.beta);
    worst_rel = std::max({worst_rel, std::fabs(r.xi_a.xi / want.xi - 1), std::fabs(r.xi_a.a / want.a - 1)});
    worst_chi = std::max(worst_chi, r.chi_square);
    converged = converged && r.converged;
  }
  return {worst_rel <= 0.02 && worst_chi < 1e-10 && converged,
          "worst relative error " + fmt("%.2e", worst_rel) + ", worst chi-square " + fmt("%.2e", worst_chi)};
}

Outcome gini() {
  const double g = income::model_gini({1, 1, 1, 2});
  const double u = income::beta_gini({1, 1});
  std::vector<double> sym;
  for (double a : {2.0, 4.0, 8.0}) sym.push_back(income::model_gini({1, 1, a, a}));
  const bool decreasing = sym[0] > sym[1] && sym[1] > sym[2];
  return {std::fabs(g - 2.0 / 3.0) <= 1e-6 && std::fabs(u - 1.0 / 3.0) <= 1e-6 && decreasing,
          "GB2(1,1,1,2) " + fmt("%.10f", g) + ", uniform " + fmt("%.10f", u) + ", symmetric a=2,4,8: " +
              fmt("%.4f", sym[0]) + " " + fmt("%.4f", sym[1]) + " " + fmt("%.4f", sym[2])};
}

Outcome moments() {
  const std::vector<std::array<double, 3>> cases = {{1, 1, 1}, {3, 2, 1}, {0.5, 2, 3}, {2, 0.7, 0.7}, {4, 5, 2}, {1.5, 1, 4}};
  double worst = 0;
  bool mean_invariant = true;
  for (const auto& c : cases) {
    const RestrictedBetaParams p(c[0], c[1], c[2]);
    auto pdf = [&](double x) {
      return (x > 0 && x < 1) ? dist::restricted_pdf(x, p) : std::numeric_limits<double>::infinity();
    };
    const double m1 = numerics::integrate([&](double x) { return x * pdf(x); }, 0, 1, 1e-12);
    const double m2 = numerics::integrate([&](double x) { return x * x * pdf(x); }, 0, 1, 1e-12);
    const auto mo = dist::restricted_moments(p);
    worst = std::max({worst, std::fabs(m1 - mo.mean), std::fabs(m2 - m1 * m1 - mo.variance)});
    for (double a : {0.1, 7.0, 300.0}) {
      mean_invariant = mean_invariant && dist::restricted_moments({a, c[1], c[2]}).mean == mo.mean;
    }
  }
  return {worst <= 1e-8 && mean_invariant, "max quadrature gap " + fmt("%.2e", worst) +
                                                (mean_invariant ? ", mean independent of a" : ", mean varies with a")};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_contract() {
  auto run = [](std::vector<std::string> args, std::string* out_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (out_text) *out_text = out.str();
    return code;
  };
  const std::filesystem::path golden(BUNCHKIT_GOLDEN_DIR);
  int matched = 0, total = 0;
  auto golden_case = [&](std::vector<std::string> args, const char* file) {
    std::string text;
    ++total;
    if (run(std::move(args), &text) == 0 && text == slurp(golden / file)) ++matched;
  };
  golden_case({"compare", "--n", "1", "--m", "1", "--a1", "1", "--a2", "2"}, "compare_symmetric.txt");
  golden_case({"compare", "--n", "2", "--m", "1", "--a1", "1", "--a2", "2", "--format", "json"}, "compare_asymmetric.json");
  golden_case({"xstar", "--m", "1", "--n-range", "1:2:0.25", "--a1", "1", "--a2", "2"}, "xstar.csv");
  golden_case({"conjecture", "--n", "2", "--m", "1", "--a-range", "1:2:1"}, "conjecture.csv");

  const auto dir = std::filesystem::temp_directory_path() / "bunchkit_acceptance";
  std::filesystem::create_directories(dir);
  const auto partial = dir / "partial.csv";
  {
    std::ofstream f(partial);
    f << "year,bin_lower_kusd,bin_upper_kusd,percent\n2001,0,10,20\n2001,10,20,20\n2001,20,,60\n";
  }
  const auto malformed = dir / "malformed.csv";
  {
    std::ofstream f(malformed);
    f << "year,bin_lower_kusd,bin_upper_kusd,percent\n2001,0,x,20\n";
  }
  struct Expect {
    std::vector<std::string> args;
    int code;
  };
  const std::vector<Expect> matrix = {
      {{"compare", "--n", "1", "--m", "1", "--a1", "1", "--a2", "2"}, 0},
      {{"compare", "--n", "1", "--m", "1", "--a1", "2", "--a2", "2"}, 1},
      {{"compare", "--n", "1000", "--m", "0.001", "--a1", "1", "--a2", "2"}, 2},
      {{"conjecture", "--n", "1", "--m", "2", "--a-range", "1:2:1"}, 1},
      {{"fit", "--input", malformed.string()}, 1},
      {{"trend", "--input", partial.string()}, 3},
      {{"bogus"}, 1},
  };
  int codes_ok = 0;
  for (const auto& e : matrix) codes_ok += run(e.args) == e.code ? 1 : 0;
  std::filesystem::remove_all(dir);
  return {matched == total && codes_ok == static_cast<int>(matrix.size()),
          std::to_string(matched) + "/" + std::to_string(total) + " golden files, " + std::to_string(codes_ok) + "/" +
              std::to_string(matrix.size()) + " exit codes"};
}

}  // namespace

int main() {
  report(1, "special-function identities", 5, special_functions);
  report(2, "symmetric bunching anchor", 0, symmetric_anchor);
  report(3, "asymmetric analytic oracle", 0, asymmetric_oracle);
  report(4, "bunching verification", 10, bunching_verification);
  report(5, "convexity certificate", 0, convexity);
  report(6, "monotone-transform invariance", 0, transform_invariance);
  report(7, "conjecture scan and x*(n)", 30, conjecture_and_xstar);
  report(8, "gamma Monte Carlo oracle", 20, mc_oracle);
  report(9, "fit recovery", 30, fit_recovery);
  report(10, "Gini oracles", 0, gini);
  report(11, "moment formulas", 0, moments);
  report(12, "CLI contract", 0, cli_contract);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
