#include "velatt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#ifndef VELATT_BUILD_TAG
#define VELATT_BUILD_TAG "unknown"
#endif

namespace velatt {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

EulerAngles euler_from_gravity(const Vec3& gamma) {
    // gamma = [-sin(pitch), sin(roll) cos(pitch), cos(roll) cos(pitch)]
    EulerAngles e;
    e.pitch = std::asin(std::clamp(-gamma.x(), -1.0, 1.0));
    e.roll = wrap_angle(std::atan2(gamma.y() + 0.0, gamma.z()));
    e.yaw = std::numeric_limits<double>::quiet_NaN();
    return e;
}

double tilt_angle(const Vec3& gamma_bar) {
    return std::atan2(gamma_bar.cross(kE3).norm(), gamma_bar.dot(kE3));
}

bool finite_state(const FullObserverState& s) { return s.v_hat.allFinite() && s.R_hat.matrix().allFinite(); }
bool finite_state(const GammaObserverState& s) { return s.v_hat.allFinite() && s.gamma_hat.allFinite(); }

struct RunningObserver {
    ObserverKind kind;
    FullObserverState full;
    GammaObserverState gamma;
};

}  // namespace

std::string to_string(ObserverKind k) {
    switch (k) {
        case ObserverKind::kFull1: return "full1";
        case ObserverKind::kFull2: return "full2";
        case ObserverKind::kGamma1: return "gamma1";
        case ObserverKind::kGamma2: return "gamma2";
    }
    return "full1";
}

ObserverKind observer_kind_from_string(const std::string& s) {
    if (s == "full1") return ObserverKind::kFull1;
    if (s == "full2") return ObserverKind::kFull2;
    if (s == "gamma1") return ObserverKind::kGamma1;
    if (s == "gamma2") return ObserverKind::kGamma2;
    throw ContractViolation("unknown observer '" + s + "' (expected full1, full2, gamma1 or gamma2)");
}

Variant variant_of(ObserverKind k) {
    return (k == ObserverKind::kFull1 || k == ObserverKind::kGamma1) ? Variant::kObserver1 : Variant::kObserver2;
}

bool is_full(ObserverKind k) { return k == ObserverKind::kFull1 || k == ObserverKind::kFull2; }

ObserverGains GainsConfig::resolve() const {
    if (k1r) return ObserverGains(k1v, k2v, *k1r, k2r, g);
    return ObserverGains::at_bound(k1v, k2v, k2r, g);
}

Rotation InitialErrorSpec::R_bar() const {
    if (const auto* m = std::get_if<Mat3>(&attitude)) return Rotation::from_matrix(*m);
    const Vec3 rpy = std::get<EulerDeg>(attitude).rpy / kRadToDeg;
    return rotation_from_euler(rpy.x(), rpy.y(), rpy.z());
}

bool operator==(const InitialErrorSpec& a, const InitialErrorSpec& b) {
    return a.velocity == b.velocity && a.velocity_is_inertial == b.velocity_is_inertial &&
           a.attitude == b.attitude;
}

ScenarioConfig ScenarioConfig::reference_sim1() {
    ScenarioConfig c;
    c.scenario_id = "sim1";
    c.observers = {ObserverKind::kFull1, ObserverKind::kFull2, ObserverKind::kGamma1, ObserverKind::kGamma2};
    c.initial_error.velocity = Vec3(-5.0, 5.0, -5.0);
    c.initial_error.attitude = Mat3(Vec3(-1.0, 1.0, -1.0).asDiagonal());
    return c;
}

ScenarioConfig ScenarioConfig::reference_sim2() {
    ScenarioConfig c = reference_sim1();
    c.scenario_id = "sim2";
    c.sensors.mag_bias = Vec3(0.1, -0.05, 0.08);
    return c;
}

std::uint64_t row_count(double duration, double dt) {
    return static_cast<std::uint64_t>(std::floor(duration / dt + 1e-9)) + 1;
}

const ObserverTrace& TraceSet::observer(ObserverKind k) const {
    for (const auto& o : observers) {
        if (o.kind == k) return o;
    }
    throw ContractViolation("trace has no observer " + to_string(k));
}

std::string build_tag() { return VELATT_BUILD_TAG; }

TraceSet run_scenario(const ScenarioConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw ContractViolation("dt must be positive");
    if (!(cfg.duration >= 0.0)) throw ContractViolation("duration must be non-negative");
    if (cfg.output_stride == 0) throw ContractViolation("output stride must be >= 1");

    const ObserverGains gains = cfg.gains.resolve();
    const MagneticReference m_I(cfg.m_I);
    const HeadingFrame frame = heading_frame(m_I);
    const EquilibriumSet eq = equilibria(gains, m_I);
    SensorModel sensors(cfg.sensors, m_I, gains.g());

    TraceSet trace;
    trace.header.build_tag = build_tag();
    trace.header.config = cfg;

    const TruthState truth0 = truth_at(cfg.trajectory, 0.0);
    const Rotation R_bar0 = cfg.initial_error.R_bar();
    const Vec3 v_tilde0 = cfg.initial_error.velocity_is_inertial
                              ? Vec3(truth0.R.transpose() * cfg.initial_error.velocity)
                              : cfg.initial_error.velocity;
    FullObserverState init;
    init.v_hat = truth0.v - v_tilde0;
    init.R_hat = R_bar0.transpose() * truth0.R;

    std::vector<RunningObserver> running;
    for (ObserverKind k : cfg.observers) {
        running.push_back({k, init, reduce_to_gamma(init)});
        trace.observers.push_back({k, {}});
    }

    const std::uint64_t rows = row_count(cfg.duration, cfg.dt);
    const std::uint64_t steps = rows - 1;
    const std::uint64_t recorded = steps / cfg.output_stride + 1;
    trace.truth.reserve(recorded);
    for (auto& o : trace.observers) o.samples.reserve(recorded);

    const auto record = [&](const TruthState& truth) {
        trace.truth.push_back({truth.t, truth.v, truth.R, euler_from_rotation(truth.R)});
        for (std::size_t i = 0; i < running.size(); ++i) {
            const RunningObserver& r = running[i];
            ObserverSample s;
            if (is_full(r.kind)) {
                const ErrorState e = make_error_state(truth.R * (truth.v - r.full.v_hat),
                                                      truth.R * r.full.R_hat.transpose(), gains, frame);
                s.v_hat = r.full.v_hat;
                s.R_hat = r.full.R_hat;
                s.gamma_hat = gravity_direction(r.full.R_hat);
                s.euler = euler_from_rotation(r.full.R_hat);
                s.attitude_error = e.attitude_error_angle;
                s.v_bar = e.v_bar;
                s.gamma_bar = e.gamma_bar;
                s.equilibrium = classify(e, eq).label;
            } else {
                const GammaErrorState e = gamma_errors(truth, r.gamma);
                s.v_hat = r.gamma.v_hat;
                s.gamma_hat = r.gamma.gamma_hat;
                s.euler = euler_from_gravity(r.gamma.gamma_hat);
                s.attitude_error = tilt_angle(e.gamma_bar);
                s.v_bar = e.v_bar;
                s.gamma_bar = e.gamma_bar;
                s.equilibrium = classify_gamma(e, gains).label;
            }
            s.v_err_norm = (truth.v - s.v_hat).norm();
            s.L0 = lyapunov_L0(s.v_bar, s.gamma_bar, gains);
            s.L1 = lyapunov_L1(s.v_bar, s.gamma_bar, gains);
            s.S0 = lyapunov_S0(s.v_bar, s.gamma_bar, gains);
            trace.observers[i].samples.push_back(s);
        }
    };

    record(truth0);
    MeasurementFrame start = sensors.measure(truth0);
    for (std::uint64_t k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(k) * cfg.dt;
        const double t1 = static_cast<double>(k + 1) * cfg.dt;
        const MeasurementFrame mid = sensors.measure(truth_at(cfg.trajectory, 0.5 * (t0 + t1)));
        const TruthState truth1 = truth_at(cfg.trajectory, t1);
        const MeasurementFrame end = sensors.measure(truth1);
        const MeasurementInterval interval{start, mid, end};
        const double h = t1 - t0;

        for (RunningObserver& r : running) {
            const Variant v = variant_of(r.kind);
            if (is_full(r.kind)) {
                r.full = step_full(r.full, interval, gains, m_I, h, v);
                if ((k + 1) % kReorthonormalizePeriod == 0) r.full = reorthonormalized(r.full);
                if (!finite_state(r.full)) {
                    throw NumericalFailure(t1, k + 1, "non-finite estimate in observer " + to_string(r.kind));
                }
            } else {
                r.gamma = step_gamma(r.gamma, interval, gains, h, v);
                if (!finite_state(r.gamma)) {
                    throw NumericalFailure(t1, k + 1, "non-finite estimate in observer " + to_string(r.kind));
                }
            }
        }
        if ((k + 1) % cfg.output_stride == 0) record(truth1);
        start = end;
    }
    return trace;
}

}  // namespace velatt
