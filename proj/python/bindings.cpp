// Python access to the solver and measurements. Fields cross the boundary as
// real physical-space samples on a periodic grid of the given length.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "ckdv/coeffs.hpp"
#include "ckdv/config.hpp"
#include "ckdv/dynamics.hpp"
#include "ckdv/errors.hpp"
#include "ckdv/experiments.hpp"
#include "ckdv/gevrey.hpp"
#include "ckdv/io.hpp"
#include "ckdv/profiles.hpp"
#include "ckdv/runner.hpp"

namespace py = pybind11;
using namespace ckdv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

SpectralField to_field(const Array& a, const GridPtr& g) {
    if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != g->size())
        throw InvalidParameter("expected a 1-d array of length " + std::to_string(g->size()));
    return forward_transform(std::span<const double>(a.data(), g->size()), g);
}

GridPtr grid_for(const Array& u, double length) { return make_grid(static_cast<std::size_t>(u.shape(0)), length); }

SpectralState to_state(const Array& u, const Array& v, double length) {
    auto g = grid_for(u, length);
    return {to_field(u, g), to_field(v, g)};
}

py::tuple physical(const SpectralState& s) {
    return py::make_tuple(to_array(inverse_transform(s.u_hat)), to_array(inverse_transform(s.v_hat)));
}

py::dict radius_dict(const RadiusEstimate& r) {
    py::dict d;
    d["sigma_hat"] = r.sigma_hat;
    d["k_lo"] = r.k_lo;
    d["k_hi"] = r.k_hi;
    d["slope_stderr"] = r.slope_stderr;
    d["residual"] = r.residual;
    d["floor_hit"] = r.floor_hit;
    d["modes_used"] = r.modes_used;
    return d;
}

StepperConfig stepper(double dt, const std::string& scheme) {
    StepperConfig cfg;
    cfg.dt = dt;
    if (scheme == "etdrk4") cfg.scheme = Scheme::ETDRK4;
    else if (scheme == "ifrk4") cfg.scheme = Scheme::IFRK4;
    else throw InvalidParameter("scheme must be etdrk4 or ifrk4");
    return cfg;
}

py::object optional_real(const std::optional<double>& x) { return x ? py::cast(*x) : py::none(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Coupled KdV-KdV pseudospectral solver and analyticity-radius measurements";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidParameter>(m, "InvalidParameter", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::class_<SystemCoefficients>(m, "Coefficients")
        .def(py::init<double, double, double, double, double, double>(), py::arg("a1"), py::arg("a2"),
             py::arg("c11"), py::arg("c12"), py::arg("c21"), py::arg("c22"))
        .def_static("majda_biello", &make_majda_biello, py::arg("a2"))
        .def_static("hirota_satsuma", &make_hirota_satsuma, py::arg("a1"), py::arg("c12"))
        .def_property_readonly("a1", &SystemCoefficients::a1)
        .def_property_readonly("a2", &SystemCoefficients::a2)
        .def_property_readonly("c11", &SystemCoefficients::c11)
        .def_property_readonly("c12", &SystemCoefficients::c12)
        .def_property_readonly("c21", &SystemCoefficients::c21)
        .def_property_readonly("c22", &SystemCoefficients::c22)
        .def_property_readonly("ratio", &SystemCoefficients::ratio)
        .def("__eq__", [](const SystemCoefficients& a, const SystemCoefficients& b) { return a == b; })
        .def("__repr__", [](const SystemCoefficients& c) {
            return "Coefficients(" + format_real(c.a1()) + ", " + format_real(c.a2()) + ", " + format_real(c.c11()) +
                   ", " + format_real(c.c12()) + ", " + format_real(c.c21()) + ", " + format_real(c.c22()) + ")";
        });

    m.def("classify", [](const SystemCoefficients& c) {
        const auto r = classify(c);
        py::dict d;
        d["ratio"] = r.ratio;
        d["regime"] = std::string(to_string(r.regime));
        d["admissible"] = r.admissible;
        py::list cons;
        for (const auto& x : r.required_constraints) cons.append(py::make_tuple(x.description, x.satisfied));
        d["constraints"] = cons;
        py::list est;
        for (auto e : r.available_estimates) est.append(std::string(to_string(e)));
        d["estimates"] = est;
        return d;
    });
    m.def("is_divergence_form", &is_divergence_form);
    m.def("invariant_weight", [](const SystemCoefficients& c) { return optional_real(invariant_weight(c)); });

    m.def("grid_points", [](std::size_t n, double length) { return to_array(make_grid(n, length)->points()); },
          py::arg("n"), py::arg("length"));

    m.def(
        "initial_profile",
        [](const std::string& name, std::size_t n, double length, double u_amplitude, double v_amplitude,
           double width, std::optional<double> u_center, std::optional<double> v_center, double radius,
           std::uint64_t seed, bool dealias) {
            ProfileParams p;
            p.u_amplitude = u_amplitude;
            p.v_amplitude = v_amplitude;
            p.width = width;
            if (u_center) p.u_center = *u_center;
            if (v_center) p.v_center = *v_center;
            p.radius = radius;
            p.seed = seed;
            p.dealias = dealias;
            return physical(initial_profile(name, p, make_grid(n, length)));
        },
        py::arg("name"), py::arg("n"), py::arg("length"), py::arg("u_amplitude") = 0.5, py::arg("v_amplitude") = 0.5,
        py::arg("width") = 2.0, py::arg("u_center") = py::none(), py::arg("v_center") = py::none(),
        py::arg("radius") = 0.5, py::arg("seed") = 0, py::arg("dealias") = true);

    m.def(
        "nonlinear_rhs",
        [](const Array& u, const Array& v, double length, const SystemCoefficients& c, bool dealias) {
            const auto r = nonlinear_rhs(to_state(u, v, length), c, dealias);
            return py::make_tuple(to_array(inverse_transform(r.rhs_u)), to_array(inverse_transform(r.rhs_v)));
        },
        py::arg("u"), py::arg("v"), py::arg("length"), py::arg("coeffs"), py::arg("dealias") = true);

    m.def(
        "commutator_terms",
        [](const Array& u, const Array& v, double length, const SystemCoefficients& c, double sigma) {
            const auto f = commutator_terms(to_state(u, v, length), c, sigma);
            return py::make_tuple(to_array(inverse_transform(f.f1)), to_array(inverse_transform(f.f2)));
        },
        py::arg("u"), py::arg("v"), py::arg("length"), py::arg("coeffs"), py::arg("sigma"));

    m.def(
        "evolve",
        [](const Array& u, const Array& v, double length, const SystemCoefficients& c, double t_final, double dt,
           const std::string& scheme, std::size_t stride, std::vector<double> gevrey_sigmas) {
            auto s = to_state(u, v, length);
            Stepper st(s.grid(), c, stepper(dt, scheme));
            EvolveOptions o;
            o.stride = stride;
            o.gevrey_sigmas = std::move(gevrey_sigmas);
            o.eta = invariant_weight(c);
            o.estimate_radius = false;
            RunRecord rec;
            {
                py::gil_scoped_release nogil;
                rec = evolve(s, st, t_final, o);
            }
            std::vector<double> t, pair, inv;
            for (const auto& r : rec.rows) {
                t.push_back(r.t);
                pair.push_back(r.pair_l2);
                inv.push_back(r.invariant.value_or(std::nan("")));
            }
            py::dict d;
            auto [uf, vf] = std::pair{to_array(inverse_transform(s.u_hat)), to_array(inverse_transform(s.v_hat))};
            d["u"] = uf;
            d["v"] = vf;
            d["t"] = to_array(t);
            d["pair_l2"] = to_array(pair);
            d["invariant"] = to_array(inv);
            d["eta"] = optional_real(rec.eta);
            d["dt"] = rec.dt;
            d["status"] = to_string(rec.status);
            return d;
        },
        py::arg("u"), py::arg("v"), py::arg("length"), py::arg("coeffs"), py::arg("t_final"), py::arg("dt") = 1e-3,
        py::arg("scheme") = "etdrk4", py::arg("stride") = 0, py::arg("gevrey_sigmas") = std::vector<double>{});

    m.def(
        "gevrey_norm",
        [](const Array& u, double length, double sigma, double s) {
            return gevrey_norm(to_field(u, grid_for(u, length)), {sigma, s});
        },
        py::arg("u"), py::arg("length"), py::arg("sigma"), py::arg("s") = 0.0);
    m.def(
        "estimate_radius",
        [](const Array& u, double length, double noise_floor) {
            return radius_dict(estimate_radius(to_field(u, grid_for(u, length)), noise_floor));
        },
        py::arg("u"), py::arg("length"), py::arg("noise_floor") = kDefaultNoiseFloor);
    m.def("lifespan", &lifespan, py::arg("norm_u"), py::arg("norm_v"), py::arg("c0") = 0.1, py::arg("a") = 4.0);

    m.def("inequality_ratio", &inequality_ratio, py::arg("xi1"), py::arg("xi2"), py::arg("sigma"), py::arg("rho"));
    m.def(
        "commutator_inequality_scan",
        [](std::optional<std::vector<double>> xi, std::optional<std::vector<double>> sigmas,
           std::optional<std::vector<double>> rhos, int threads) {
            const auto x = xi.value_or(default_xi_grid());
            const auto s = sigmas.value_or(default_scan_sigmas());
            const auto r = rhos.value_or(default_scan_rhos());
            InequalityScanReport rep;
            {
                py::gil_scoped_release nogil;
                rep = commutator_inequality_scan(x, s, r, threads);
            }
            py::dict d;
            d["worst_ratio"] = rep.worst_ratio;
            d["worst_xi1"] = rep.worst_xi1;
            d["worst_xi2"] = rep.worst_xi2;
            d["worst_sigma"] = rep.worst_sigma;
            d["worst_rho"] = rep.worst_rho;
            d["tuples"] = rep.tuples;
            d["passed"] = rep.passed;
            return d;
        },
        py::arg("xi") = py::none(), py::arg("sigmas") = py::none(), py::arg("rhos") = py::none(),
        py::arg("threads") = 1);

    m.def(
        "commutator_scaling_fit",
        [](const Array& u, const Array& v, double length, const SystemCoefficients& c, std::vector<double> sigmas) {
            const auto fits = commutator_scaling_fit(to_state(u, v, length), c, sigmas);
            py::list out;
            for (const auto& f : fits) {
                py::dict d;
                d["term"] = f.term;
                d["skipped"] = f.skipped;
                d["notice"] = f.notice;
                d["exponent"] = f.exponent;
                d["exponent_stderr"] = f.exponent_stderr;
                d["sigmas"] = to_array(f.sigmas);
                d["norms"] = to_array(f.norms);
                out.append(d);
            }
            return out;
        },
        py::arg("u"), py::arg("v"), py::arg("length"), py::arg("coeffs"), py::arg("sigmas"));

    m.def(
        "acl_defect_scan",
        [](const Array& u, const Array& v, double length, const SystemCoefficients& c, std::vector<double> sigmas,
           double rho, double dt) {
            const auto s = to_state(u, v, length);
            AclScanResult r;
            {
                py::gil_scoped_release nogil;
                r = acl_defect_scan(s, c, sigmas, rho, stepper(dt, "etdrk4"));
            }
            py::dict d;
            d["delta"] = r.delta;
            d["sigmas"] = to_array(r.sigmas);
            d["eta"] = optional_real(r.eta);
            d["defects"] = to_array(r.defects);
            d["pair_defects"] = to_array(r.pair_defects);
            d["exponent"] = r.exponent;
            d["exponent_stderr"] = r.exponent_stderr;
            d["fit_ok"] = r.fit_ok;
            d["C_b"] = r.C_b;
            d["flagged"] = r.flagged;
            d["message"] = r.message;
            return d;
        },
        py::arg("u"), py::arg("v"), py::arg("length"), py::arg("coeffs"), py::arg("sigmas"), py::arg("rho") = 0.7,
        py::arg("dt") = 1e-3);

    m.def(
        "picard_contraction_study",
        [](const Array& u, const Array& v, double length, const SystemCoefficients& c, std::vector<double> deltas,
           int iterations) {
            PicardOptions o;
            o.iterations = iterations;
            const auto st = picard_contraction_study(to_state(u, v, length), c, deltas, o);
            py::list cells;
            for (const auto& cell : st.cells) {
                py::dict d;
                d["delta"] = cell.delta;
                d["differences"] = to_array(cell.differences);
                py::list ratios;
                for (const auto& r : cell.ratios) ratios.append(optional_real(r));
                d["ratios"] = ratios;
                d["max_ratio"] = cell.max_ratio;
                d["failed"] = cell.failed;
                d["message"] = cell.message;
                cells.append(d);
            }
            py::dict d;
            d["cells"] = cells;
            d["delta_star"] = optional_real(st.delta_star);
            d["monotone"] = st.monotone;
            return d;
        },
        py::arg("u"), py::arg("v"), py::arg("length"), py::arg("coeffs"), py::arg("deltas"),
        py::arg("iterations") = 8);

    m.def(
        "predicted_lower_bound_curve",
        [](double norm0, double sigma0, double rho, double c0, double a, double C_b, std::vector<double> times) {
            return to_array(predicted_lower_bound_curve(norm0, sigma0, rho, c0, a, C_b, times));
        },
        py::arg("norm0"), py::arg("sigma0"), py::arg("rho"), py::arg("c0"), py::arg("a"), py::arg("C_b"),
        py::arg("times"));

    m.def(
        "resolve_config",
        [](const std::string& text, std::map<std::string, std::string> overrides, std::filesystem::path base_dir) {
            ConfigOverrides o(overrides.begin(), overrides.end());
            const auto cfg = parse_config(text, o, base_dir);
            return py::make_tuple(resolved_config_text(cfg), config_hash(cfg));
        },
        py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("base_dir") = std::filesystem::path{});

    m.def(
        "run",
        [](const std::string& text, std::map<std::string, std::string> overrides, std::filesystem::path base_dir) {
            ConfigOverrides o(overrides.begin(), overrides.end());
            const auto cfg = parse_config(text, o, base_dir);
            RunOutcome out;
            {
                py::gil_scoped_release nogil;
                out = run(cfg);
            }
            py::dict d;
            d["exit_code"] = out.exit_code;
            d["status"] = to_string(out.status);
            d["run_dir"] = out.run_dir;
            d["summary"] = out.summary;
            return d;
        },
        py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("base_dir") = std::filesystem::path{});

    m.def("read_tsv", [](const std::filesystem::path& p) {
        const auto c = read_tsv(p);
        py::dict d;
        d[py::str(c.x_name)] = to_array(c.x);
        d[py::str(c.y_name)] = to_array(c.y);
        return d;
    });
}
