#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "bunchkit/bunching.hpp"
#include "bunchkit/distributions.hpp"
#include "bunchkit/error.hpp"
#include "bunchkit/fitting.hpp"
#include "bunchkit/income.hpp"
#include "bunchkit/specfun.hpp"

namespace py = pybind11;
using namespace bunchkit;

namespace {

fitting::FitConfig make_config(const std::string& scale, double scale_value, const std::string& gamma) {
  fitting::FitConfig cfg;
  if (scale == "median") {
    cfg.scale_mode = fitting::ScaleMode::fixed_median;
  } else if (scale == "provided") {
    cfg.scale_mode = fitting::ScaleMode::provided;
    cfg.provided_scale = scale_value;
  } else if (scale == "free") {
    cfg.scale_mode = fitting::ScaleMode::free;
  } else {
    throw Error(ErrorCode::DomainError, "scale must be 'median', 'provided' or 'free'");
  }
  if (gamma == "fixed") {
    cfg.gamma_mode = fitting::GammaMode::fixed_one;
  } else if (gamma == "free") {
    cfg.gamma_mode = fitting::GammaMode::free;
  } else {
    throw Error(ErrorCode::DomainError, "gamma must be 'fixed' or 'free'");
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bunching comparisons for restricted Beta families and GB2 income fits";

  py::exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::module_::import("bunchkit._core").attr("Error");
      py::object exc = type(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(type.ptr(), exc.ptr());
    }
  });

  py::class_<specfun::ShapePair>(m, "ShapePair")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
      .def_readonly("alpha", &specfun::ShapePair::alpha)
      .def_readonly("beta", &specfun::ShapePair::beta);

  py::class_<dist::RestrictedBetaParams>(m, "RestrictedBeta")
      .def(py::init<double, double, double>(), py::arg("a"), py::arg("n"), py::arg("m"))
      .def_readonly("a", &dist::RestrictedBetaParams::a)
      .def_readonly("n", &dist::RestrictedBetaParams::n)
      .def_readonly("m", &dist::RestrictedBetaParams::m)
      .def("cdf", [](const dist::RestrictedBetaParams& p, double x) { return dist::restricted_cdf(x, p); })
      .def("pdf", [](const dist::RestrictedBetaParams& p, double x) { return dist::restricted_pdf(x, p); })
      .def("moments", [](const dist::RestrictedBetaParams& p) {
        const auto mo = dist::restricted_moments(p);
        return py::make_tuple(mo.mean, mo.variance);
      })
      .def("__repr__", [](const dist::RestrictedBetaParams& p) {
        return "RestrictedBeta(a=" + std::to_string(p.a) + ", n=" + std::to_string(p.n) +
               ", m=" + std::to_string(p.m) + ")";
      });

  py::class_<dist::GB2Params>(m, "GB2")
      .def(py::init<double, double, double, double>(), py::arg("b"), py::arg("gamma"), py::arg("alpha"),
           py::arg("beta"))
      .def_readonly("b", &dist::GB2Params::scale_b)
      .def_readonly("gamma", &dist::GB2Params::gamma)
      .def_readonly("alpha", &dist::GB2Params::alpha)
      .def_readonly("beta", &dist::GB2Params::beta)
      .def("cdf", [](const dist::GB2Params& p, double x) { return dist::gb2_cdf(x, p); })
      .def("quantile", [](const dist::GB2Params& p, double u) { return dist::gb2_quantile(u, p); })
      .def("mean", [](const dist::GB2Params& p) -> py::object {
        const auto q = dist::gb2_mean(p);
        if (!q.exists) return py::none();
        return py::float_(q.value);
      });

  m.def("reg_inc_beta", &specfun::reg_inc_beta, py::arg("x"), py::arg("p"));
  m.def("reg_inc_beta_complement", &specfun::reg_inc_beta_complement, py::arg("x"), py::arg("p"));
  m.def("inv_reg_inc_beta", &specfun::inv_reg_inc_beta, py::arg("u"), py::arg("p"));
  m.def("log_beta", &specfun::log_beta, py::arg("p"));

  py::class_<bunching::BunchingReport>(m, "BunchingReport")
      .def_readonly("a1", &bunching::BunchingReport::a1)
      .def_readonly("a2", &bunching::BunchingReport::a2)
      .def_readonly("n", &bunching::BunchingReport::n)
      .def_readonly("m", &bunching::BunchingReport::m)
      .def_readonly("x_star", &bunching::BunchingReport::x_star)
      .def_readonly("density_cross_lo", &bunching::BunchingReport::density_cross_lo)
      .def_readonly("density_cross_hi", &bunching::BunchingReport::density_cross_hi)
      .def_readonly("grid_size", &bunching::BunchingReport::grid_size)
      .def_readonly("verified", &bunching::BunchingReport::verified)
      .def_readonly("sign_changes", &bunching::BunchingReport::sign_changes)
      .def_property_readonly("icv_conclusion", [](const bunching::BunchingReport& r) {
        return std::string(bunching::to_string(r.icv_conclusion));
      });

  m.def("push_forward_map", &bunching::push_forward_map, py::arg("x"), py::arg("p1"), py::arg("p2"));
  m.def("crossing_point", &bunching::crossing_point, py::arg("p1"), py::arg("p2"),
        py::arg("xtol") = bunching::kDefaultXtol);
  m.def("density_crossings", &bunching::density_crossings, py::arg("p1"), py::arg("p2"),
        py::arg("xtol") = bunching::kDefaultXtol);
  m.def("verify_bunching", &bunching::verify_bunching, py::arg("p1"), py::arg("p2"),
        py::arg("grid_size") = bunching::kDefaultGridSize, py::arg("xtol") = bunching::kDefaultXtol);
  m.def("sign_changes", [](const std::vector<double>& v) { return bunching::sign_changes(v); }, py::arg("values"));
  m.def(
      "xstar_curve",
      [](const std::vector<double>& n_grid, double m_, double a1, double a2) {
        const auto c = bunching::xstar_curve(n_grid, m_, a1, a2);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : c.points) pts.emplace_back(p.n, p.x_star);
        return py::make_tuple(pts, c.strictly_increasing);
      },
      py::arg("n_grid"), py::arg("m"), py::arg("a1"), py::arg("a2"));
  m.def(
      "conjecture_scan",
      [](double n, double m_, const std::vector<double>& a_grid) {
        const auto s = bunching::conjecture_scan(n, m_, a_grid);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : s.points) pts.emplace_back(p.a, p.cdf_at_half);
        return py::make_tuple(pts, s.strictly_decreasing);
      },
      py::arg("n"), py::arg("m"), py::arg("a_grid"));
  m.def("gamma_mc_oracle", &bunching::gamma_mc_oracle, py::arg("n"), py::arg("m"), py::arg("a"),
        py::arg("samples"), py::arg("seed"), py::call_guard<py::gil_scoped_release>());

  py::class_<fitting::GroupedTable>(m, "GroupedTable")
      .def(py::init([](int year, std::vector<double> edges, std::vector<double> percents) {
             fitting::GroupedTable t;
             t.year = year;
             t.edges_kusd = std::move(edges);
             t.percents = std::move(percents);
             t.validate();
             return t;
           }),
           py::arg("year"), py::arg("edges_kusd"), py::arg("percents"))
      .def_readonly("year", &fitting::GroupedTable::year)
      .def_readonly("edges_kusd", &fitting::GroupedTable::edges_kusd)
      .def_readonly("percents", &fitting::GroupedTable::percents)
      .def_readwrite("median_kusd", &fitting::GroupedTable::median_kusd);

  py::class_<fitting::FitResult>(m, "FitResult")
      .def_readonly("params", &fitting::FitResult::params)
      .def_property_readonly("xi", [](const fitting::FitResult& r) { return r.xi_a.xi; })
      .def_property_readonly("a", [](const fitting::FitResult& r) { return r.xi_a.a; })
      .def_readonly("chi_square", &fitting::FitResult::chi_square)
      .def_readonly("converged", &fitting::FitResult::converged)
      .def_readonly("iterations", &fitting::FitResult::iterations)
      .def_readonly("degenerate", &fitting::FitResult::degenerate)
      .def_readonly("note", &fitting::FitResult::note);

  m.def(
      "bin_probabilities",
      [](const dist::GB2Params& p, const std::vector<double>& edges) { return fitting::bin_probabilities(p, edges); },
      py::arg("p"), py::arg("edges_kusd"));
  m.def(
      "synthesize_table",
      [](int year, const dist::GB2Params& p, const std::vector<double>& edges) {
        return fitting::synthesize_table(year, p, edges);
      },
      py::arg("year"), py::arg("p"), py::arg("edges_kusd"));
  m.def("census_edges_kusd", &fitting::census_edges_kusd);
  m.def("estimate_median_from_groups", &fitting::estimate_median_from_groups, py::arg("table"));
  m.def(
      "fit_gb2",
      [](const fitting::GroupedTable& t, const std::string& scale, double scale_value, const std::string& gamma) {
        return fitting::fit_gb2(t, make_config(scale, scale_value, gamma));
      },
      py::arg("table"), py::arg("scale") = "median", py::arg("scale_value") = 0.0, py::arg("gamma") = "fixed",
      py::call_guard<py::gil_scoped_release>());
  m.def("model_gini", &income::model_gini, py::arg("p"));
  m.def(
      "load_grouped_csv", [](const std::string& path) { return income::load_grouped_csv(path); }, py::arg("path"));
}
