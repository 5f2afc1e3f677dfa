#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cirsim/analysis.hpp"
#include "cirsim/error.hpp"
#include "cirsim/model.hpp"
#include "cirsim/oracles.hpp"
#include "cirsim/paths.hpp"
#include "cirsim/schemes.hpp"

namespace py = pybind11;
using namespace cirsim;

PYBIND11_MODULE(_cirsim, m) {
    m.doc() = "Drift-implicit square-root Euler simulation of CIR processes";

    auto base = py::register_exception<Error>(m, "Error");
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<RegimeError>(m, "RegimeError", validation.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    py::class_<CirParams>(m, "CirParams")
        .def(py::init([](double delta, double gamma, double beta, double x0) {
                 CirParams p{delta, gamma, beta, x0};
                 p.validate();
                 return p;
             }),
             py::arg("delta"), py::arg("gamma"), py::arg("beta"), py::arg("x0"))
        .def_readwrite("delta", &CirParams::delta)
        .def_readwrite("gamma", &CirParams::gamma)
        .def_readwrite("beta", &CirParams::beta)
        .def_readwrite("x0", &CirParams::x0)
        .def_property_readonly("feller_index", &CirParams::feller_index)
        .def_property_readonly("alpha", &CirParams::alpha);

    py::class_<RegimeReport>(m, "RegimeReport")
        .def_readonly("feller_index", &RegimeReport::feller_index)
        .def_readonly("boundary_accessible", &RegimeReport::boundary_accessible)
        .def_readonly("alpha", &RegimeReport::alpha)
        .def_readonly("scheme_applicable", &RegimeReport::scheme_applicable)
        .def_readonly("theorem_applicable", &RegimeReport::theorem_applicable)
        .def_readonly("max_step_reversion", &RegimeReport::max_step_reversion);

    py::class_<ErrorReport>(m, "ErrorReport")
        .def_readonly("p", &ErrorReport::p)
        .def_readonly("h", &ErrorReport::h)
        .def_readonly("h_ref", &ErrorReport::h_ref)
        .def_readonly("n_paths", &ErrorReport::n_paths)
        .def_readonly("sup_error_lp", &ErrorReport::sup_error_lp)
        .def_readonly("std_error", &ErrorReport::std_error);

    py::class_<RateReport>(m, "RateReport")
        .def_readonly("h", &RateReport::h)
        .def_readonly("errors", &RateReport::errors)
        .def_readonly("fitted_slope", &RateReport::fitted_slope)
        .def_readonly("intercept", &RateReport::intercept)
        .def_readonly("residual", &RateReport::residual)
        .def_readonly("slope_confidence_halfwidth", &RateReport::slope_confidence_halfwidth);

    m.def("classify_regime", &classify_regime, py::arg("params"));
    m.def("theoretical_rate", &theoretical_rate, py::arg("params"), py::arg("p"));
    m.def("lamperti_phi", &lamperti_phi, py::arg("params"), py::arg("x"));
    m.def("lamperti_inv", &lamperti_inv, py::arg("params"), py::arg("z"));
    m.def("implicit_sqrt_euler_step", &implicit_sqrt_euler_step, py::arg("params"), py::arg("y"),
          py::arg("dw"), py::arg("h"));
    m.def(
        "implicit_additive_step",
        [](const CirParams& params, double z, double dw, double h) {
            return implicit_additive_step(TransformedModel::from(params), z, dw, h);
        },
        py::arg("params"), py::arg("z"), py::arg("dw"), py::arg("h"));
    m.def(
        "brownian_increments",
        [](std::uint64_t seed, std::uint64_t path, double horizon, std::size_t n_steps) {
            return generate_increments(seed, path, TimeGrid(horizon, n_steps));
        },
        py::arg("seed"), py::arg("path"), py::arg("horizon"), py::arg("n_steps"));
    m.def(
        "simulate",
        [](const CirParams& params, std::uint64_t seed, std::uint64_t path, double horizon,
           std::size_t n_steps) {
            const TimeGrid grid(horizon, n_steps);
            return simulate_cir_implicit(params, grid, generate_increments(seed, path, grid)).values;
        },
        py::arg("params"), py::arg("seed"), py::arg("path"), py::arg("horizon"), py::arg("n_steps"));
    m.def("strong_error", &strong_error, py::arg("params"), py::arg("seed"), py::arg("n_paths"),
          py::arg("h"), py::arg("h_ref"), py::arg("p"), py::arg("horizon") = 1.0,
          py::arg("threads") = 1);
    m.def(
        "fit_rate",
        [](const std::vector<double>& h, const std::vector<double>& errors) { return fit_rate(h, errors); },
        py::arg("h"), py::arg("errors"));
    m.def("inverse_moment_exact_cir", &inverse_moment_exact_cir, py::arg("params"), py::arg("p"),
          py::arg("t"));
    m.def("cir_exact_moment", &cir_exact_moment, py::arg("params"), py::arg("q"), py::arg("t"));
    m.def("cir_moment_bound_oracle", &cir_moment_bound_oracle, py::arg("params"), py::arg("p"),
          py::arg("t"));
}
