#include <cmath>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skyrme/coeffs.hpp"
#include "skyrme/diagnostics.hpp"
#include "skyrme/errors.hpp"
#include "skyrme/model_rhs.hpp"
#include "skyrme/physical.hpp"
#include "skyrme/profile.hpp"
#include "skyrme/similarity.hpp"
#include "skyrme/spectral.hpp"

namespace py = pybind11;
using namespace skyrme;

namespace {

py::dict spectrum_dict(const SpectrumReport& r) {
    py::dict d;
    d["n_coarse"] = r.n_coarse;
    d["n_fine"] = r.n_fine;
    d["match_tol"] = r.match_tol;
    d["eigenvalues"] = r.eigenvalues;
    d["resolved"] = std::vector<bool>(r.resolved.begin(), r.resolved.end());
    d["unstable"] = r.unstable_list;
    d["has_unit"] = r.has_unit;
    d["unit_eigenvalue"] = r.unit_eigenvalue;
    d["has_gap"] = r.has_gap;
    d["gap"] = r.gap;
    d["symmetry_residual"] = r.symmetry_residual;
    d["unit_residual"] = r.unit_residual;
    d["g_h"] = r.g_h;
    d["g_adj"] = r.g_adj;
    return d;
}

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    d["t"] = t.t;
    d["origin_gradient"] = t.origin_gradient;
    d["final_value"] = t.final_state.value;
    d["final_rate"] = t.final_state.rate;
    d["stop_reason"] = t.stop_reason;
    d["truncated"] = t.truncated;
    return d;
}

}  // namespace

PYBIND11_MODULE(skyrmelab, m) {
    m.doc() = "Self-similar blowup toolkit for the co-rotational Skyrme model";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SingularInputError>(m, "SingularInputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<ProfileParams>(m, "ProfileParams")
        .def_readonly("d", &ProfileParams::d)
        .def_readonly("a", &ProfileParams::a)
        .def_readonly("b", &ProfileParams::b)
        .def_readonly("rho_star", &ProfileParams::rho_star);
    m.def("profile_constants", &profile_constants, py::arg("d") = 5);
    m.def("eval_U", [](double rho) { return eval_U(profile_constants(5), rho); }, py::arg("rho"));
    m.def("eval_U_prime", [](double rho) { return eval_U_prime(profile_constants(5), rho); }, py::arg("rho"));
    m.def(
        "eval_profile",
        [](double rho) {
            const auto v = eval_profile(profile_constants(5), rho);
            return py::make_tuple(v.U, v.U_tilde, v.U1, v.U2);
        },
        py::arg("rho"), "(U, U_tilde, U1, U2) at rho for d = 5");

    m.def("f_wm", &f_wm, py::arg("x"), py::arg("r"));
    m.def(
        "f_sf", [](double z1, double z2, double z3, double r) { return f_sf({z1, z2, z3, r}); }, py::arg("zeta1"),
        py::arg("zeta2"), py::arg("zeta3"), py::arg("r"));
    m.def(
        "g_difference",
        [](double z1, double z2, double z3, double r) { return g_difference({z1, z2, z3, r}); },
        py::arg("zeta1"), py::arg("zeta2"), py::arg("zeta3"), py::arg("r"));
    m.def("g_lambda_weight", &g_lambda_weight, py::arg("zeta1"), py::arg("r"), py::arg("lam"));
    m.def("guard_A", &guard_A);

    m.def("v1", &v1, py::arg("rho"));
    m.def("v2", &v2, py::arg("rho"));
    m.def(
        "taylor_coeffs",
        [](double sigma, double rho) {
            const auto t = taylor_coeffs(sigma, rho);
            py::dict d;
            d["G0"] = t.G0;
            d["dG0_dsigma"] = t.dG0_dsigma;
            d["G1w"] = t.G1w;
            d["G2"] = t.G2;
            d["G3w"] = t.G3w;
            return d;
        },
        py::arg("sigma"), py::arg("rho"));
    m.def(
        "verify_coeffs",
        [](int n, double tol) {
            const auto r = verify_coeffs_fd(n, tol);
            py::dict d;
            d["max_rel_err"] = r.max_rel_err;
            d["n_samples"] = r.n_samples;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("n_samples") = 200, py::arg("tol") = 1e-6);

    m.def(
        "compute_spectrum",
        [](int nc, int nf, double tol, bool potential) {
            return spectrum_dict(compute_spectrum(nc, nf, tol, potential));
        },
        py::arg("n_coarse") = 128, py::arg("n_fine") = 192, py::arg("match_tol") = 1e-3,
        py::arg("include_potential") = true);

    m.def(
        "evolve_self_similar",
        [](const std::string& model, double lam, int n, double r_max, double t_end, double T) {
            ModelParams p;
            if (model == "strong_field") {
                p.model = Model::strong_field;
            } else if (model == "full") {
                p.model = Model::full;
            } else {
                throw ConfigError("model", "expected 'full' or 'strong_field'");
            }
            p.lambda = lam;
            const auto g = RadialGrid::uniform(r_max, n);
            const auto tr = evolve_physical(p, g, self_similar_state(g, 0.0, T, FieldForm::angle), t_end, {});
            auto d = trajectory_dict(tr);
            d["r"] = g.nodes;
            return d;
        },
        py::arg("model") = "strong_field", py::arg("lam") = 1.0, py::arg("n") = 512, py::arg("r_max") = 1.05,
        py::arg("t_end") = 0.5, py::arg("T") = 1.0, "Evolve exact self-similar data in the angle form");
    m.def(
        "self_similar_angle",
        [](int n, double r_max, double t, double T) {
            return self_similar_state(RadialGrid::uniform(r_max, n), t, T, FieldForm::angle).value;
        },
        py::arg("n"), py::arg("r_max"), py::arg("t"), py::arg("T") = 1.0);
    m.def(
        "fit_blowup_rate",
        [](const std::vector<double>& t, const std::vector<double>& g, double frac) {
            const auto r = fit_blowup_rate(t, g, frac);
            py::dict d;
            d["detected"] = r.detected;
            d["T_fit"] = r.T_fit;
            d["c_fit"] = r.c_fit;
            d["exponent_fit"] = r.exponent_fit;
            d["residual"] = r.residual;
            return d;
        },
        py::arg("t"), py::arg("g"), py::arg("fraction") = 0.5);

    m.def(
        "shoot_T",
        [](double lam, double eps, int M, double lo, double hi, double tol) {
            const auto ctx = SimilarityContext::with_projection(M);
            const RadialFn v1f = [eps](double r) { return eps * std::exp(-4.0 * r * r); };
            const RadialFn zero = [](double) { return 0.0; };
            py::gil_scoped_release release;
            const auto r = shoot_T(ctx, v1f, zero, lam, lo, hi, tol);
            py::gil_scoped_acquire acquire;
            py::dict d;
            d["T_star"] = r.T_star;
            d["lo"] = r.lo;
            d["hi"] = r.hi;
            d["converged"] = r.converged;
            d["evaluations"] = r.evaluations;
            return d;
        },
        py::arg("lam"), py::arg("eps") = 1e-3, py::arg("M") = 32, py::arg("lo") = 0.9, py::arg("hi") = 1.1,
        py::arg("tol") = 1e-6, "Shoot on T for the perturbation eps * exp(-4 r^2)");
}
