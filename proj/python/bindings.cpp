#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ultraslow/cmcheck.hpp"
#include "ultraslow/fdoracle.hpp"
#include "ultraslow/kernels.hpp"
#include "ultraslow/moments.hpp"
#include "ultraslow/pdf.hpp"
#include "ultraslow/specfun.hpp"
#include "ultraslow/volterra.hpp"

namespace py = pybind11;
using namespace ultraslow;

namespace {

// Python floats are doubles; long double crosses the boundary through these casts.
template <class F>
auto with_gil_released(F f) {
    py::gil_scoped_release nogil;
    return f();
}

VPArgs vp_args(real alpha, real gamma, real lambda, real p) {
    VPArgs a;
    a.params.alpha = alpha;
    a.params.gamma = gamma;
    a.params.lambda = lambda;
    a.p = p;
    return a;
}

py::array_t<double> to_array(const std::vector<real>& v) {
    py::array_t<double> a(v.size());
    auto m = a.mutable_unchecked<1>();
    for (std::size_t i = 0; i < v.size(); ++i) m(i) = double(v[i]);
    return a;
}

MomentRoute moment_route(const std::string& s) {
    if (s == "closed") return MomentRoute::ClosedForm;
    if (s == "ilt") return MomentRoute::IltOracle;
    if (s == "quadrature") return MomentRoute::QuadratureOracle;
    throw DomainError("route must be closed, ilt or quadrature");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Distributed-order diffusion kernels, moments, densities and checks.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
    py::register_exception<QuadratureFailure>(m, "QuadratureFailure", base.ptr());
    py::register_exception<RouteUnavailable>(m, "RouteUnavailable", base.ptr());
    py::register_exception<SingularSample>(m, "SingularSample", base.ptr());
    py::register_exception<Inapplicable>(m, "Inapplicable", base.ptr());
    py::register_exception<InstabilityDetected>(m, "InstabilityDetected", base.ptr());

    py::class_<EvalResult>(m, "EvalResult")
        .def_property_readonly("value", [](const EvalResult& r) { return double(r.value); })
        .def_property_readonly("abs_err", [](const EvalResult& r) { return double(r.abs_err); })
        .def_readonly("terms", &EvalResult::terms)
        .def_readonly("converged", &EvalResult::converged)
        .def_readonly("diagnostics", &EvalResult::diagnostics)
        .def("__float__", [](const EvalResult& r) { return double(r.value); })
        .def("__repr__", [](const EvalResult& r) {
            return "EvalResult(value=" + py::repr(py::float_(double(r.value))).cast<std::string>() +
                   ", abs_err=" + py::repr(py::float_(double(r.abs_err))).cast<std::string>() + ")";
        });

    py::class_<MemoryKernel>(m, "MemoryKernel")
        .def_static("distributed", &MemoryKernel::distributed, py::arg("B") = 1.0)
        .def_static("distributed_prabhakar", &MemoryKernel::distributed_prabhakar, py::arg("alpha"), py::arg("gamma"),
                    py::arg("lambda_"), py::arg("B") = 1.0)
        .def_static("caputo", &MemoryKernel::caputo, py::arg("mu"), py::arg("B") = 1.0)
        .def_static("prabhakar", &MemoryKernel::prabhakar, py::arg("alpha"), py::arg("mu"), py::arg("gamma"),
                    py::arg("lambda_"), py::arg("B") = 1.0)
        .def_property_readonly("B", [](const MemoryKernel& k) { return double(k.B); })
        .def_property_readonly("name", &MemoryKernel::name)
        .def("__repr__", [](const MemoryKernel& k) { return "MemoryKernel(" + k.name() + ")"; });

    // special functions
    m.def("exp_integral_ei", [](real x) { return double(exp_integral_ei(x)); }, py::arg("x"));
    m.def("digamma", [](real x) { return double(digamma(x)); }, py::arg("x"));
    m.def(
        "mittag_leffler",
        [](real alpha, real beta, real gamma, real z) { return mittag_leffler_3p({alpha, beta, gamma, 0}, z); },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("z"));
    m.def(
        "prabhakar_e",
        [](real alpha, real beta, real gamma, real lambda, real t) { return prabhakar_e({alpha, beta, gamma, lambda}, t); },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma"), py::arg("lambda_"), py::arg("t"));
    m.def("nu", [](real t, real q) { return nu(t, q); }, py::arg("t"), py::arg("q") = 0.0);
    m.def(
        "vp_epsilon",
        [](real alpha, real gamma, real lambda, real p, real t) {
            return vp_epsilon(vp_args(alpha, gamma, lambda, p), t, VPRoute::NuSeries);
        },
        py::arg("alpha"), py::arg("gamma"), py::arg("lambda_"), py::arg("p"), py::arg("t"));
    m.def(
        "spectral_density", [](real alpha, real gamma, real p, real r) { return double(-spectral_kernel(alpha, gamma, p, r)); },
        py::arg("alpha"), py::arg("gamma"), py::arg("p"), py::arg("r"), "K~^gamma_{alpha,p}(r)");
    m.def(
        "spectral_mass", [](real alpha, real gamma, real p) { return spectral_laplace(alpha, gamma, p, 0); },
        py::arg("alpha"), py::arg("gamma"), py::arg("p"), "int_0^inf K~ dr");

    // kernels
    m.def("kernel", [](const MemoryKernel& k, real t) { return kernel_time(k, t); }, py::arg("kernel"), py::arg("t"));
    m.def("partner", [](const MemoryKernel& k, real t) { return partner_time(k, t); }, py::arg("kernel"), py::arg("t"));
    m.def(
        "sonnine_residual", [](const MemoryKernel& k, real t) { return double(sonnine_residual(k, t)); },
        py::arg("kernel"), py::arg("t"));

    // moments
    m.def("msd1", [](real t, real B) { return double(msd1(t, B)); }, py::arg("t"), py::arg("B") = 1.0);
    m.def(
        "msd2", [](real alpha, real gamma, real lambda, real t, real B) { return msd2(alpha, gamma, lambda, t, B); },
        py::arg("alpha"), py::arg("gamma"), py::arg("lambda_"), py::arg("t"), py::arg("B") = 1.0);
    m.def(
        "moment",
        [](const MemoryKernel& k, int order, real t, const std::string& route) {
            return with_gil_released([&] { return moment_even({k, order, t, moment_route(route)}); });
        },
        py::arg("kernel"), py::arg("order"), py::arg("t"), py::arg("route") = "closed");
    m.def(
        "kurtosis",
        [](const MemoryKernel& k, real t) {
            const auto r = kurtosis(k, t);
            return py::make_tuple(r.kurtosis, double(r.skewness));
        },
        py::arg("kernel"), py::arg("t"), "(kurtosis, skewness)");

    // densities
    m.def(
        "pdf",
        [](const MemoryKernel& k, real x, real t, const std::string& route) {
            if (route != "ilt" && route != "series") throw DomainError("route must be ilt or series");
            return pdf_eval({x, t, k, route == "series" ? PdfRoute::Series : PdfRoute::IltOfClosedLaplace});
        },
        py::arg("kernel"), py::arg("x"), py::arg("t"), py::arg("route") = "ilt");
    m.def(
        "pdf_laplace", [](const MemoryKernel& k, real x, real s) { return double(pdf_laplace(x, s, k)); },
        py::arg("kernel"), py::arg("x"), py::arg("s"));

    // finite differences
    m.def(
        "fd_solve",
        [](const MemoryKernel& k, real t_final, int nx, int nt, real half_width) {
            GridSpec g = default_grid(k, t_final, nx);
            if (nt > 0) g.nt = nt;
            if (half_width > 0) g.x_half_width = half_width;
            FdOptions opt;
            opt.store_every = g.nt;
            const auto s = with_gil_released([&] { return solve_fp_integral(k, g, InitialCondition::DeltaApprox, opt); });
            std::vector<real> last(s.field.back().begin(), s.field.back().end());
            py::dict d;
            d["x"] = to_array(s.x);
            d["p"] = to_array(last);
            d["mass"] = to_array(s.mass);
            d["msd"] = to_array(s.msd);
            d["nt"] = g.nt;
            d["x_half_width"] = double(g.x_half_width);
            return d;
        },
        py::arg("kernel"), py::arg("t_final"), py::arg("nx") = 401, py::arg("nt") = 0, py::arg("half_width") = 0.0,
        "final profile plus per-step mass and msd");

    // complete monotonicity
    m.def(
        "check_cm",
        [](const std::function<double(double)>& f, real a, real b, int max_order, real tol, real eval_rel_err) {
            CmOptions o;
            o.eval_rel_err = eval_rel_err;
            const auto r = check_cm([&](real x) { return real(f(double(x))); }, a, b, max_order, tol, o);
            return py::module_::import("json").attr("loads")(to_json(r));
        },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("max_order") = 4, py::arg("tol") = 1e-10,
        py::arg("eval_rel_err") = 1e-15, "report as a dict");
}
