#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spraykit/errors.hpp"
#include "spraykit/geometry.hpp"
#include "spraykit/observables.hpp"
#include "spraykit/scenario.hpp"
#include "spraykit/trajectories.hpp"
#include "spraykit/vlasov.hpp"

namespace py = pybind11;
using namespace spraykit;

namespace {

PhasePoint point(const Vec& x, const Vec& v) {
    if (x.size() != v.size()) throw std::invalid_argument("x and v must have the same length");
    return {x, v};
}

py::array_t<double> tensor_array(const Tensor3& t) {
    const auto n = static_cast<py::ssize_t>(t.dim());
    py::array_t<double> out({n, n, n});
    std::copy(t.raw().begin(), t.raw().end(), out.mutable_data());
    return out;
}

std::vector<PhasePoint> points(const Mat& xs, const Mat& vs) {
    if (xs.rows() != vs.rows() || xs.cols() != vs.cols()) throw std::invalid_argument("xs and vs must match in shape");
    std::vector<PhasePoint> out;
    for (Eigen::Index i = 0; i < xs.rows(); ++i) out.push_back({xs.row(i).transpose(), vs.row(i).transpose()});
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Vlasov fields, kinematic domains and moments on the conic bundle";

    auto base = py::register_exception<Error>(m, "SprayKitError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ChartDomainError>(m, "ChartDomainError", base.ptr());
    py::register_exception<QuadratureDomainError>(m, "QuadratureDomainError", base.ptr());
    py::register_exception<ScenarioError>(m, "ScenarioError", base.ptr());

    py::class_<SpacetimeModel>(m, "Model")
        .def_readonly("name", &SpacetimeModel::name)
        .def_readonly("dim", &SpacetimeModel::dim)
        .def_readonly("charge_to_mass", &SpacetimeModel::charge_to_mass)
        .def("metric", [](const SpacetimeModel& s, const Vec& x) { return metric_at(s, x); })
        .def("inverse_metric", [](const SpacetimeModel& s, const Vec& x) { return inverse_metric_at(s, x); })
        .def("faraday", [](const SpacetimeModel& s, const Vec& x) { return faraday_at(s, x); })
        .def("christoffel", [](const SpacetimeModel& s, const Vec& x) { return tensor_array(christoffel_at(s, x)); },
             "Gamma[a, b, c] = Gamma^a_{bc}")
        .def("__repr__", [](const SpacetimeModel& s) { return "<Model " + s.name + ">"; });

    m.def("minkowski", &minkowski, py::arg("dim") = 4);
    m.def("schwarzschild", &schwarzschild, py::arg("mass") = 1.0);
    m.def("minkowski_electric", &minkowski_electric, py::arg("e0"), py::arg("charge_to_mass"), py::arg("dim") = 4);
    m.def("minkowski_nonmetric", &minkowski_nonmetric, py::arg("eps"), py::arg("bump") = 0.0, py::arg("dim") = 4);
    m.def("minkowski2_labtime", &minkowski2_labtime, py::arg("amplitude"));
    m.def(
        "model",
        [](const std::string& name, const std::map<std::string, double>& params) {
            return build_model(ModelSpec{name, params});
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{});

    py::class_<KinematicIndicator>(m, "Indicator")
        .def_readonly("name", &KinematicIndicator::name)
        .def_readonly("degree", &KinematicIndicator::degree)
        .def_readonly("level", &KinematicIndicator::level)
        .def("__call__", [](const KinematicIndicator& f, const Vec& x, const Vec& v) { return f(point(x, v)); })
        .def(
            "complete",
            [](const KinematicIndicator& f, const SpacetimeModel& s, const Vec& x, const Vec& spatial, double level) {
                return complete_velocity(s, f, x, spatial, level);
            },
            py::arg("model"), py::arg("x"), py::arg("spatial"), py::arg("level") = 1.0);
    m.def(
        "indicator",
        [](const SpacetimeModel& s, const std::string& name, double level) {
            return build_indicator(s, IndicatorSpec{name, level});
        },
        py::arg("model"), py::arg("name"), py::arg("level") = 1.0);

    py::class_<VlasovField>(m, "Field")
        .def_readonly("label", &VlasovField::label)
        .def("__call__", [](const VlasovField& w, const Vec& x, const Vec& v) { return w(point(x, v)); })
        .def("tangent", [](const VlasovField& w, const Vec& x, const Vec& v) { return w.tangent(point(x, v)); });
    m.def("geodesic_field", &geodesic_field);
    m.def("lorentz_field", &lorentz_field);
    m.def("transform_to_domain", &transform_to_domain, py::arg("field"), py::arg("indicator"));
    m.def(
        "apply_field",
        [](const VlasovField& w, const KinematicIndicator& f, const Vec& x, const Vec& v) {
            return apply_field(w, f.F, point(x, v));
        },
        py::arg("field"), py::arg("indicator"), py::arg("x"), py::arg("v"));
    m.def(
        "compatibility_defect",
        [](const VlasovField& w, const KinematicIndicator& f, const Mat& xs, const Mat& vs) {
            return compatibility_defect(w, f.F, points(xs, vs));
        },
        py::arg("field"), py::arg("indicator"), py::arg("xs"), py::arg("vs"));

    py::class_<VlasovBivector>(m, "Bivector");
    m.def("bivector_from_field", &bivector_from_field);
    m.def("field_from_bivector", &field_from_bivector, py::arg("bivector"), py::arg("indicator"));
    m.def(
        "bivectors_equal",
        [](const VlasovBivector& a, const VlasovBivector& b, const Mat& xs, const Mat& vs) {
            return bivectors_equal(a, b, points(xs, vs));
        },
        py::arg("a"), py::arg("b"), py::arg("xs"), py::arg("vs"));

    m.def(
        "integrate",
        [](const VlasovField& w, const Vec& x, const Vec& v, double t0, double t1, int steps) {
            const Prolongation p = integrate(w, point(x, v), t0, t1, steps);
            const auto n = static_cast<Eigen::Index>(p.size());
            const Eigen::Index d = x.size();
            Vec ts(n);
            Mat xs(n, d), vs(n, d);
            for (Eigen::Index i = 0; i < n; ++i) {
                ts(i) = p.params[static_cast<std::size_t>(i)];
                xs.row(i) = p.points[static_cast<std::size_t>(i)].x.transpose();
                vs.row(i) = p.points[static_cast<std::size_t>(i)].v.transpose();
            }
            py::dict out;
            out["t"] = ts;
            out["x"] = xs;
            out["v"] = vs;
            out["truncated"] = p.truncated;
            out["reason"] = p.truncation_reason;
            return out;
        },
        py::arg("field"), py::arg("x"), py::arg("v"), py::arg("t0"), py::arg("t1"), py::arg("steps"),
        "RK4 prolongation; returns dict(t, x, v, truncated, reason).");

    m.def(
        "current_from_E",
        [](const SpacetimeModel& s, const std::function<double(const Vec&, const Vec&)>& f,
           const KinematicIndicator& domain, const Vec& v_lo, const Vec& v_hi, const Vec& x, int nodes) {
            AnalyticDensity d{"python", [f](const PhasePoint& u) { return f(u.x, u.v); }, domain, v_lo, v_hi};
            QuadratureSpec q;
            q.nodes = nodes;
            const Moments mo = moments_from_E(s, d, x, q);
            return py::make_tuple(mo.J, mo.T, mo.truncation_warning);
        },
        py::arg("model"), py::arg("f"), py::arg("domain"), py::arg("v_lo"), py::arg("v_hi"), py::arg("x"),
        py::arg("nodes") = 24,
        "Current and stress-energy of f(x, v) on the domain at x; returns (J, T, truncation_warning).");

    m.def("scenario_names", [] {
        std::vector<std::string> out;
        for (const auto& b : bundled_scenarios()) out.push_back(b.name);
        return out;
    });
    m.def("scenario_text", [](const std::string& name) {
        for (const auto& b : bundled_scenarios())
            if (b.name == name) return b.text;
        return bundled_config(name).text;
    });
    m.def(
        "_run",
        [](const std::string& text, const std::string& source, std::optional<std::uint64_t> seed,
           std::optional<int> steps, std::optional<double> tol, std::optional<std::string> out) {
            RunOverrides o{seed, steps, tol, out};
            const ScenarioConfig cfg = apply_overrides(parse_config(text, source), o);
            RunReport r;
            {
                py::gil_scoped_release release;
                r = execute(cfg);
            }
            if (o.out) write_report(r, std::filesystem::path(*o.out) / cfg.name);
            return r.summary().dump();
        },
        py::arg("text"), py::arg("source"), py::arg("seed") = py::none(), py::arg("steps") = py::none(),
        py::arg("tol") = py::none(), py::arg("out") = py::none());
}
