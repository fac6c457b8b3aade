#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "bunchkit/error.hpp"
#include "bunchkit/fitting.hpp"

using namespace bunchkit;
using namespace bunchkit::fitting;

namespace {

bool throws_code(auto&& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

const std::vector<double> kUnitEdges = {0, 0.25, 0.5, 0.75, 1, 1.5, 2, 3, 4};

FitConfig provided(double scale, GammaMode gamma = GammaMode::fixed_one) {
  FitConfig cfg;
  cfg.scale_mode = ScaleMode::provided;
  cfg.provided_scale = scale;
  cfg.gamma_mode = gamma;
  return cfg;
}

GroupedTable table_of(std::vector<double> edges, std::vector<double> percents) {
  GroupedTable t;
  t.year = 2000;
  t.edges_kusd = std::move(edges);
  t.percents = std::move(percents);
  return t;
}

}  // namespace

TEST_CASE("bin_probabilities: closed forms") {
  const std::vector<double> e1 = {0, 1};
  const auto p1 = bin_probabilities({1, 1, 1, 1}, e1);
  REQUIRE(p1.size() == 2);
  CHECK(p1[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p1[1] == doctest::Approx(0.5).epsilon(1e-14));

  const std::vector<double> e2 = {0, 1, 3};
  const auto p2 = bin_probabilities({1, 1, 1, 2}, e2);
  REQUIRE(p2.size() == 3);
  CHECK(p2[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(p2[1] == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(p2[2] == doctest::Approx(0.0625).epsilon(1e-14));

  const std::vector<double> e0 = {0};
  const auto p0 = bin_probabilities({3, 2, 1.5, 4}, e0);
  REQUIRE(p0.size() == 1);
  CHECK(p0[0] == 1.0);
}

TEST_CASE("bin_probabilities sum to one") {
  for (const GB2Params& p : {GB2Params(50, 1, 2, 2.2), GB2Params(1, 3, 0.6, 0.8), GB2Params(200, 0.7, 5, 1.2)}) {
    const auto probs = bin_probabilities(p, census_edges_kusd());
    CHECK(std::accumulate(probs.begin(), probs.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    for (double q : probs) CHECK(q >= 0.0);
  }
}

TEST_CASE("chi_square_objective") {
  const GB2Params p(1, 1, 1, 1);
  CHECK(chi_square_objective(p, table_of({0, 1}, {60, 40})) == doctest::Approx(0.04).epsilon(1e-13));
  const GB2Params q(40, 1, 2, 2.2);
  CHECK(chi_square_objective(q, synthesize_table(2010, q, census_edges_kusd())) <= 1e-18);
  // every finite bin is far below the mass of a huge-scale model
  const GB2Params escaped(1e30, 1, 2, 2);
  CHECK(chi_square_objective(escaped, table_of({0, 1, 2}, {30, 30, 40})) == kChiSquarePenalty);
  CHECK(chi_square_objective(q, table_of({0, 15, 50}, {10, 60, 30})) >= 0.0);
}

TEST_CASE("chi-square is scale equivariant") {
  const GroupedTable t = table_of({0, 15, 25, 35, 50, 75, 100, 150, 200}, {11, 9, 9, 12, 17, 12, 15, 7, 8});
  const GB2Params p(55, 1.2, 2, 2.4);
  const double base = chi_square_objective(p, t);
  for (double c : {0.01, 3.0, 1000.0}) {
    GroupedTable scaled = t;
    for (double& e : scaled.edges_kusd) e *= c;
    const GB2Params ps(c * p.scale_b, p.gamma, p.alpha, p.beta);
    CHECK(std::fabs(chi_square_objective(ps, scaled) - base) <= 1e-12);
  }
}

TEST_CASE("GroupedTable validation") {
  CHECK_NOTHROW(table_of({0, 1}, {60, 40}).validate());
  CHECK(throws_code([] { table_of({0, 1}, {60, 37}).validate(); }, ErrorCode::ValidationError));
  CHECK(throws_code([] { table_of({0, 2, 1}, {30, 30, 40}).validate(); }, ErrorCode::ValidationError));
  CHECK(throws_code([] { table_of({1, 2}, {60, 40}).validate(); }, ErrorCode::ValidationError));
  CHECK(throws_code([] { table_of({0, 1}, {110, -10}).validate(); }, ErrorCode::ValidationError));
  CHECK(throws_code([] { table_of({0, 1}, {100}).validate(); }, ErrorCode::ValidationError));
  const auto props = table_of({0, 1}, {60.5, 40}).proportions();
  CHECK(props[0] + props[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("estimate_median_from_groups") {
  CHECK(estimate_median_from_groups(table_of({0, 50, 100}, {40, 35, 25})) ==
        doctest::Approx(50.0 + 10.0 / 35.0 * 50.0).epsilon(1e-13));
  CHECK(estimate_median_from_groups(table_of({0, 100}, {50, 50})) == doctest::Approx(100.0));
  CHECK(throws_code([] { estimate_median_from_groups(table_of({0, 10, 20}, {20, 20, 60})); },
                    ErrorCode::MedianInOpenBin));
}

TEST_CASE("xi_a_from_shapes") {
  const XiA q = xi_a_from_shapes(2, 2.2);
  CHECK(q.xi == doctest::Approx(2.0 / 4.2).epsilon(1e-15));
  CHECK(q.a == doctest::Approx(4.2).epsilon(1e-15));
  const XiA u = xi_a_from_shapes(1, 1);
  CHECK(u.xi == 0.5);
  CHECK(u.a == 2.0);
  for (const XiA& z : {XiA(0.25, 8), XiA(0.5, 2), XiA(0.75, 4)}) {
    const auto s = z.shapes();
    const XiA back = xi_a_from_shapes(s.alpha, s.beta);
    CHECK(back.xi == z.xi);
    CHECK(back.a == z.a);
  }
}

TEST_CASE("fit_gb2 recovers a synthetic table") {
  const GB2Params truth(1, 1, 2, 2.2);
  const GroupedTable t = synthesize_table(2015, truth, kUnitEdges);
  const FitResult r = fit_gb2(t, provided(1.0));
  CHECK(r.converged);
  CHECK(r.params.alpha == doctest::Approx(2.0).epsilon(0.02));
  CHECK(r.params.beta == doctest::Approx(2.2).epsilon(0.02));
  CHECK(r.xi_a.xi == doctest::Approx(2.0 / 4.2).epsilon(0.02));
  CHECK(r.xi_a.a == doctest::Approx(4.2).epsilon(0.02));
  CHECK(r.chi_square < 1e-10);
  CHECK(r.xi_a.xi == r.params.alpha / (r.params.alpha + r.params.beta));
  CHECK(r.xi_a.a == r.params.alpha + r.params.beta);

  const FitResult rg = fit_gb2(t, provided(1.0, GammaMode::free));
  CHECK(rg.params.gamma == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("fit_gb2: refit from the optimum is stable") {
  const GroupedTable t = table_of({0, 15, 25, 35, 50, 75, 100, 150, 200}, {11, 9, 9, 12, 17, 12, 15, 7, 8});
  FitConfig cfg;
  const FitResult first = fit_gb2(t, cfg);
  REQUIRE(first.converged);
  const double median = estimate_median_from_groups(t);
  cfg.start = GB2Params(1.0, 1.0, first.params.alpha, first.params.beta);
  const FitResult again = fit_gb2(t, cfg);
  CHECK(std::fabs(again.chi_square - first.chi_square) < 1e-12);
  CHECK(first.params.scale_b == doctest::Approx(median));
}

TEST_CASE("fit_gb2: one bin is underdetermined") {
  const FitResult r = fit_gb2(table_of({0}, {100}), provided(1.0, GammaMode::free));
  CHECK(r.degenerate);
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("fit_gb2: seeded recoveries") {
  std::mt19937_64 gen(424242);
  std::uniform_real_distribution<double> shape(1.0, 5.0);
  for (int i = 0; i < 5; ++i) {
    const double alpha = shape(gen), beta = shape(gen);
    const GB2Params truth(60, 1, alpha, beta);
    const FitResult r = fit_gb2(synthesize_table(2000 + i, truth, census_edges_kusd()), provided(60));
    const XiA want = xi_a_from_shapes(alpha, beta);
    CAPTURE(alpha);
    CAPTURE(beta);
    CHECK(r.converged);
    CHECK(r.xi_a.xi == doctest::Approx(want.xi).epsilon(0.02));
    CHECK(r.xi_a.a == doctest::Approx(want.a).epsilon(0.02));
  }
}

TEST_CASE("fit_gb2: fixed median uses the published median when present") {
  const GB2Params truth(70, 1, 2.5, 2.5);
  GroupedTable t = synthesize_table(2020, truth, census_edges_kusd());
  t.median_kusd = 70.0;
  const FitResult r = fit_gb2(t);
  CHECK(r.params.scale_b == 70.0);
  CHECK(r.xi_a.a == doctest::Approx(5.0).epsilon(0.02));
  CHECK(throws_code([] {
    FitConfig cfg;
    cfg.scale_mode = ScaleMode::provided;
    fit_gb2(table_of({0, 1}, {60, 40}), cfg);
  }, ErrorCode::DomainError));
}
