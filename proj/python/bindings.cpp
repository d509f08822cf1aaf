#include "velatt/analysis.hpp"
#include "velatt/scenario.hpp"
#include "velatt/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace velatt;

namespace {

Rotation as_rotation(const Mat3& m) { return Rotation::from_matrix(m); }

py::dict pole_dict(const PoleReport& p) {
    py::dict d;
    d["tilt_poles"] = py::make_tuple(p.tilt_poles[0], p.tilt_poles[1]);
    d["discriminant"] = p.discriminant;
    d["discriminant_sign"] = p.discriminant_sign;
    d["double_root"] = p.double_root;
    d["decoupled_pole"] = p.decoupled_pole;
    d["yaw_gain"] = p.yaw_gain;
    d["yaw_gain_unsquared"] = p.yaw_gain_unsquared;
    d["yaw_pole_desired"] = p.yaw_pole_desired;
    d["yaw_pole_undesired"] = p.yaw_pole_undesired;
    d["satisfies_gain_bound"] = p.satisfies_gain_bound;
    return d;
}

// Column-major trace arrays, one row per recorded sample.
py::dict trace_dict(const TraceSet& t) {
    const auto n = static_cast<py::ssize_t>(t.truth.size());
    py::array_t<double> time(n), v({n, py::ssize_t{3}}), euler({n, py::ssize_t{3}});
    auto tt = time.mutable_unchecked<1>();
    auto vv = v.mutable_unchecked<2>();
    auto ee = euler.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < n; ++i) {
        const TruthSample& s = t.truth[static_cast<std::size_t>(i)];
        tt(i) = s.t;
        for (int j = 0; j < 3; ++j) vv(i, j) = s.v(j);
        ee(i, 0) = s.euler.roll;
        ee(i, 1) = s.euler.pitch;
        ee(i, 2) = s.euler.yaw;
    }
    py::dict out;
    out["t"] = time;
    out["truth_v"] = v;
    out["truth_euler"] = euler;
    py::dict observers;
    for (const ObserverTrace& o : t.observers) {
        py::array_t<double> v_hat({n, py::ssize_t{3}}), eu({n, py::ssize_t{3}}), gamma({n, py::ssize_t{3}});
        py::array_t<double> v_err(n), att(n), L0(n), L1(n), S0(n);
        py::array_t<int> eq(n);
        auto a = v_hat.mutable_unchecked<2>();
        auto b = eu.mutable_unchecked<2>();
        auto c = gamma.mutable_unchecked<2>();
        for (py::ssize_t i = 0; i < n; ++i) {
            const ObserverSample& s = o.samples[static_cast<std::size_t>(i)];
            for (int j = 0; j < 3; ++j) {
                a(i, j) = s.v_hat(j);
                c(i, j) = s.gamma_hat(j);
            }
            b(i, 0) = s.euler.roll;
            b(i, 1) = s.euler.pitch;
            b(i, 2) = s.euler.yaw;
            v_err.mutable_at(i) = s.v_err_norm;
            att.mutable_at(i) = s.attitude_error;
            L0.mutable_at(i) = s.L0;
            L1.mutable_at(i) = s.L1;
            S0.mutable_at(i) = s.S0;
            eq.mutable_at(i) = s.equilibrium;
        }
        py::dict d;
        d["v_hat"] = v_hat;
        d["euler"] = eu;
        d["gamma_hat"] = gamma;
        d["v_err_norm"] = v_err;
        d["attitude_error"] = att;
        d["L0"] = L0;
        d["L1"] = L1;
        d["S0"] = S0;
        d["equilibrium"] = eq;
        observers[py::str(to_string(o.kind))] = d;
    }
    out["observers"] = observers;
    out["header"] = header_json(t.header);
    return out;
}

}  // namespace

PYBIND11_MODULE(_velatt, m) {
    m.doc() = "Velocity-aided attitude observers on SO(3)";

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

    // SO(3) helpers on plain 3x3 arrays.
    m.def("exp_rotation", [](const Vec3& u) { return exp_rotation(u).matrix(); }, py::arg("u"));
    m.def("skew", &skew, py::arg("u"));
    m.def("orthonormalize", [](const Mat3& r) { return orthonormalize(r).matrix(); }, py::arg("R"));
    m.def("rotation_angle", [](const Mat3& r) { return rotation_angle(as_rotation(r)); }, py::arg("R"));
    m.def(
        "euler_from_rotation",
        [](const Mat3& r) {
            const EulerAngles e = euler_from_rotation(as_rotation(r));
            return py::make_tuple(e.roll, e.pitch, e.yaw);
        },
        py::arg("R"), "ZYX (roll, pitch, yaw) in radians");
    m.def(
        "rotation_from_euler",
        [](double roll, double pitch, double yaw) { return rotation_from_euler(roll, pitch, yaw).matrix(); },
        py::arg("roll"), py::arg("pitch"), py::arg("yaw"));

    py::class_<ObserverGains>(m, "ObserverGains")
        .def(py::init<double, double, double, double, double>(), py::arg("k1v"), py::arg("k2v"), py::arg("k1r"),
             py::arg("k2r"), py::arg("g") = kDefaultGravity)
        .def_static("at_bound", &ObserverGains::at_bound, py::arg("k1v"), py::arg("k2v"), py::arg("k2r"),
                    py::arg("g") = kDefaultGravity)
        .def_static("reference", &ObserverGains::reference)
        .def_property_readonly("k1v", &ObserverGains::k1v)
        .def_property_readonly("k2v", &ObserverGains::k2v)
        .def_property_readonly("k1r", &ObserverGains::k1r)
        .def_property_readonly("k2r", &ObserverGains::k2r)
        .def_property_readonly("g", &ObserverGains::g)
        .def_property_readonly("satisfies_gain_bound", &ObserverGains::satisfies_gain_bound)
        .def("__repr__", [](const ObserverGains& k) {
            return "ObserverGains(k1v=" + format_double(k.k1v()) + ", k2v=" + format_double(k.k2v()) +
                   ", k1r=" + format_double(k.k1r()) + ", k2r=" + format_double(k.k2r()) +
                   ", g=" + format_double(k.g()) + ")";
        });

    m.def(
        "validate_gains",
        [](double k1v, double k2v, double k1r, double k2r, double g) {
            const GainReport r = validate_gains(k1v, k2v, k1r, k2r, g);
            py::dict d;
            d["valid"] = r.valid;
            d["satisfies_gain_bound"] = r.satisfies_gain_bound;
            d["bound_margin"] = r.bound_margin;
            d["discriminant"] = r.discriminant;
            d["discriminant_sign"] = r.discriminant_sign;
            return d;
        },
        py::arg("k1v"), py::arg("k2v"), py::arg("k1r"), py::arg("k2r"), py::arg("g") = kDefaultGravity);

    m.def(
        "innovation",
        [](int variant, const Vec3& v_hat, const Mat3& R_hat, const Vec3& v_meas, const Vec3& m_B,
           const ObserverGains& k, const Vec3& m_I) {
            MeasurementFrame f;
            f.v_meas = v_meas;
            f.m_B = m_B;
            const Innovation s =
                innovation(variant_from_int(variant), {v_hat, as_rotation(R_hat)}, f, k, MagneticReference(m_I));
            return py::make_tuple(s.sigma_v, s.sigma_R);
        },
        py::arg("variant"), py::arg("v_hat"), py::arg("R_hat"), py::arg("v_meas"), py::arg("m_B"), py::arg("gains"),
        py::arg("m_I"), "Returns (sigma_v, sigma_R).");

    m.def(
        "step_full",
        [](int variant, const Vec3& v_hat, const Mat3& R_hat, const Vec3& omega, const Vec3& a_B, const Vec3& m_B,
           const Vec3& v_meas, const ObserverGains& k, const Vec3& m_I, double dt) {
            const MeasurementFrame f{0.0, omega, a_B, m_B, v_meas};
            const FullObserverState s =
                step_full({v_hat, as_rotation(R_hat)}, f, k, MagneticReference(m_I), dt, variant_from_int(variant));
            return py::make_tuple(s.v_hat, s.R_hat.matrix());
        },
        py::arg("variant"), py::arg("v_hat"), py::arg("R_hat"), py::arg("omega"), py::arg("a_B"), py::arg("m_B"),
        py::arg("v_meas"), py::arg("gains"), py::arg("m_I"), py::arg("dt"),
        "One observer step with the measurement held over the step. Returns (v_hat, R_hat).");

    m.def(
        "gamma_error_field",
        [](const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k, int variant) {
            const GammaErrorRate f = gamma_error_field(v_bar, gamma_bar, k, variant_from_int(variant));
            return py::make_tuple(f.v_bar_dot, f.gamma_bar_dot);
        },
        py::arg("v_bar"), py::arg("gamma_bar"), py::arg("gains"), py::arg("variant"));
    m.def("lyapunov_L0", py::overload_cast<const Vec3&, const Vec3&, const ObserverGains&>(&lyapunov_L0));
    m.def("lyapunov_L1", py::overload_cast<const Vec3&, const Vec3&, const ObserverGains&>(&lyapunov_L1));
    m.def("lyapunov_S0", py::overload_cast<const Vec3&, const Vec3&, const ObserverGains&>(&lyapunov_S0));

    m.def(
        "linearized_poles",
        [](const ObserverGains& k, const Vec3& m_I) { return pole_dict(linearized_poles(k, MagneticReference(m_I))); },
        py::arg("gains"), py::arg("m_I") = MagneticReference::reference().vector());

    m.def(
        "equilibria",
        [](const ObserverGains& k, const Vec3& m_I) {
            py::list out;
            for (const Equilibrium& e : equilibria(k, MagneticReference(m_I)).points) {
                out.append(py::make_tuple(e.v_bar, e.R_bar.matrix()));
            }
            return out;
        },
        py::arg("gains"), py::arg("m_I") = MagneticReference::reference().vector());

    m.def(
        "parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("json_text"), "Validates a scenario config and returns its normalised JSON.");
    m.def("reference_config", [](int which) {
        return serialize_config(which == 2 ? ScenarioConfig::reference_sim2() : ScenarioConfig::reference_sim1());
    }, py::arg("which") = 1);
    m.def(
        "run_scenario",
        [](const std::string& text) {
            const ScenarioConfig c = parse_config(text);
            TraceSet t;
            {
                py::gil_scoped_release release;
                t = run_scenario(c);
            }
            return trace_dict(t);
        },
        py::arg("config_json"));
    m.def(
        "verify",
        [](const std::string& suite, int samples, std::uint64_t seed, double dt) {
            VerifyReport r;
            {
                py::gil_scoped_release release;
                r = run_suite(suite, {samples, seed, dt});
            }
            return r.to_json();
        },
        py::arg("suite"), py::arg("samples") = 100, py::arg("seed") = 7, py::arg("dt") = 1e-3,
        "Runs a property suite and returns its JSON report.");
    m.def("build_tag", &build_tag);
}
