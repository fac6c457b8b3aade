#include "bunchkit/fitting.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "bunchkit/error.hpp"
#include "bunchkit/numerics.hpp"

namespace bunchkit::fitting {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

std::string year_tag(int year) { return "year " + std::to_string(year) + ": "; }

void require_edges(std::span<const double> edges) {
  if (edges.empty() || !(edges.front() >= 0.0)) {
    throw Error(ErrorCode::DomainError, "bin edges must be non-empty and start at >= 0");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1]) || !std::isfinite(edges[i])) {
      throw Error(ErrorCode::DomainError, "bin edges must be finite and strictly increasing");
    }
  }
}

}  // namespace

void GroupedTable::validate() const {
  if (edges_kusd.empty()) throw Error(ErrorCode::ValidationError, year_tag(year) + "no bins");
  if (edges_kusd.front() != 0.0) {
    throw Error(ErrorCode::ValidationError, year_tag(year) + "first bin must start at 0");
  }
  for (std::size_t i = 1; i < edges_kusd.size(); ++i) {
    if (!(edges_kusd[i] > edges_kusd[i - 1]) || !std::isfinite(edges_kusd[i])) {
      throw Error(ErrorCode::ValidationError, year_tag(year) + "bin edges are not strictly increasing");
    }
  }
  if (percents.size() != edges_kusd.size()) {
    throw Error(ErrorCode::ValidationError, year_tag(year) + "need exactly one percent per bin");
  }
  for (double p : percents) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::ValidationError, year_tag(year) + "percents must be finite and >= 0");
    }
  }
  const double total = std::accumulate(percents.begin(), percents.end(), 0.0);
  if (!(total >= 99.0 && total <= 101.0)) {
    throw Error(ErrorCode::ValidationError,
                year_tag(year) + "percents sum to " + std::to_string(total) + ", outside [99, 101]");
  }
  if (median_kusd && !(*median_kusd > 0.0 && std::isfinite(*median_kusd))) {
    throw Error(ErrorCode::ValidationError, year_tag(year) + "median must be > 0");
  }
}

std::vector<double> GroupedTable::proportions() const {
  const double total = std::accumulate(percents.begin(), percents.end(), 0.0);
  std::vector<double> out(percents.size());
  for (std::size_t i = 0; i < percents.size(); ++i) out[i] = percents[i] / total;
  return out;
}

std::vector<double> bin_probabilities(const GB2Params& p, std::span<const double> edges_kusd) {
  require_edges(edges_kusd);
  const std::size_t bins = edges_kusd.size();
  std::vector<double> probs(bins);
  // Cell masses from the CDF in the lower half and from the survival
  // function in the upper half, so tail cells keep relative precision.
  double prev_cdf = 0.0;
  double prev_sf = 1.0;
  for (std::size_t i = 0; i + 1 < bins; ++i) {
    const double edge = edges_kusd[i + 1];
    const double cdf = dist::gb2_cdf(edge, p);
    const double sf = dist::gb2_sf(edge, p);
    probs[i] = (cdf <= 0.5) ? cdf - prev_cdf : prev_sf - sf;
    prev_cdf = cdf;
    prev_sf = sf;
  }
  probs[bins - 1] = prev_sf;
  return probs;
}

double chi_square_objective(const GB2Params& p, const GroupedTable& table) {
  const auto observed = table.proportions();
  const auto model = bin_probabilities(p, table.edges_kusd);
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (!(model[i] >= kMinCellProbability)) return kChiSquarePenalty;
    const double d = observed[i] - model[i];
    total += d * d / model[i];
  }
  return total;
}

double estimate_median_from_groups(const GroupedTable& table) {
  const auto props = table.proportions();
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < props.size(); ++i) {
    const double next = cumulative + props[i];
    if (next >= 0.5 && props[i] > 0.0) {
      const double lo = table.edges_kusd[i];
      const double hi = table.edges_kusd[i + 1];
      return lo + (0.5 - cumulative) / props[i] * (hi - lo);
    }
    cumulative = next;
  }
  throw Error(ErrorCode::MedianInOpenBin,
              year_tag(table.year) + "cumulative share at the last finite edge is below one half");
}

XiA xi_a_from_shapes(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw Error(ErrorCode::DomainError, "shapes must be > 0");
  const double a = alpha + beta;
  return {alpha / a, a};
}

FitResult fit_gb2(const GroupedTable& table, const FitConfig& config) {
  table.validate();

  double scale = 1.0;
  switch (config.scale_mode) {
    case ScaleMode::fixed_median:
      scale = table.median_kusd ? *table.median_kusd : estimate_median_from_groups(table);
      break;
    case ScaleMode::provided:
      if (!(config.provided_scale > 0.0) || !std::isfinite(config.provided_scale)) {
        throw Error(ErrorCode::DomainError, "provided scale must be > 0");
      }
      scale = config.provided_scale;
      break;
    case ScaleMode::free:
      try {
        scale = table.median_kusd ? *table.median_kusd : estimate_median_from_groups(table);
      } catch (const Error&) {
        scale = table.edges_kusd.back() > 0.0 ? table.edges_kusd.back() : 1.0;
      }
      break;
  }

  // Work in scale units: edges / scale, model scale 1 unless freed.
  GroupedTable scaled = table;
  for (double& e : scaled.edges_kusd) e /= scale;

  const bool free_gamma = config.gamma_mode == GammaMode::free;
  const bool free_scale = config.scale_mode == ScaleMode::free;

  double xi0 = 0.5;
  double a0 = 4.0;
  double gamma0 = 1.0;
  double b0 = 1.0;
  if (config.start) {
    const auto seed = xi_a_from_shapes(config.start->alpha, config.start->beta);
    xi0 = seed.xi;
    a0 = seed.a;
    if (free_gamma) gamma0 = config.start->gamma;
    if (free_scale) b0 = config.start->scale_b / scale;
  }

  std::vector<double> start = {logit(xi0), std::log(a0)};
  if (free_gamma) start.push_back(std::log(gamma0));
  if (free_scale) start.push_back(std::log(b0));
  const std::vector<double> step(start.size(), 0.3);

  auto decode = [&](std::span<const double> theta) {
    const double xi = logistic(theta[0]);
    const double a = std::exp(theta[1]);
    std::size_t k = 2;
    const double gamma = free_gamma ? std::exp(theta[k++]) : 1.0;
    const double b = free_scale ? std::exp(theta[k++]) : 1.0;
    return GB2Params(b, gamma, a * xi, a * (1.0 - xi));
  };

  const numerics::VectorFn objective = [&](std::span<const double> theta) {
    try {
      return chi_square_objective(decode(theta), scaled);
    } catch (const Error&) {
      return kChiSquarePenalty;
    }
  };

  const auto opt = numerics::nelder_mead(objective, start, step, config.maxiter, config.ftol);
  const GB2Params fitted = decode(opt.point);

  FitResult result;
  result.params = GB2Params(fitted.scale_b * scale, fitted.gamma, fitted.alpha, fitted.beta);
  result.xi_a = xi_a_from_shapes(fitted.alpha, fitted.beta);
  result.chi_square = opt.value;
  result.converged = opt.converged;
  result.iterations = opt.iterations;
  result.degenerate = table.percents.size() < start.size() + 1;
  if (result.degenerate) {
    result.converged = false;
    result.note = "OptimizerFailed: " + std::to_string(table.percents.size()) + " bins cannot identify " +
                  std::to_string(start.size()) + " free parameters";
  } else if (!opt.converged) {
    result.note = "OptimizerFailed: simplex did not converge within " + std::to_string(config.maxiter) +
                  " iterations";
  }
  return result;
}

GroupedTable synthesize_table(int year, const GB2Params& p, std::span<const double> edges_kusd) {
  GroupedTable table;
  table.year = year;
  table.edges_kusd.assign(edges_kusd.begin(), edges_kusd.end());
  for (double prob : bin_probabilities(p, edges_kusd)) table.percents.push_back(100.0 * prob);
  return table;
}

std::vector<double> census_edges_kusd() { return {0.0, 15.0, 25.0, 35.0, 50.0, 75.0, 100.0, 150.0, 200.0}; }

}  // namespace bunchkit::fitting
