#include "velatt/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

namespace velatt {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Runs fn(i) for i in [0, n) on a small pool; results land in index order so
// reports do not depend on scheduling.
template <class T, class Fn>
std::vector<T> parallel_map(int n, Fn fn) {
    std::vector<T> out(static_cast<std::size_t>(n));
    const int workers = std::max(1, std::min<int>(n, static_cast<int>(std::thread::hardware_concurrency())));
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (int i = w; i < n; i += workers) out[static_cast<std::size_t>(i)] = fn(i);
        }));
    }
    for (auto& j : jobs) j.get();
    return out;
}

double candidate_value(LyapunovCandidate which, const GammaErrorState& e, const ObserverGains& k) {
    switch (which) {
        case LyapunovCandidate::kL0: return lyapunov_L0(e.v_bar, e.gamma_bar, k);
        case LyapunovCandidate::kL1: return lyapunov_L1(e.v_bar, e.gamma_bar, k);
        case LyapunovCandidate::kS0: return lyapunov_S0(e.v_bar, e.gamma_bar, k);
    }
    return 0.0;
}

PropertyResult property(std::string name, bool passed, std::map<std::string, double> metrics,
                        std::string detail = {}) {
    return {std::move(name), passed, std::move(metrics), std::move(detail)};
}

ScenarioConfig quiet(ScenarioConfig c) {
    c.output_stride = 1;
    return c;
}

}  // namespace

bool VerifyReport::passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const PropertyResult& p) { return p.passed; });
}

std::string VerifyReport::to_json() const {
    nlohmann::ordered_json j;
    j["suite"] = suite;
    j["passed"] = passed();
    j["properties"] = nlohmann::ordered_json::array();
    for (const auto& p : properties) {
        nlohmann::ordered_json q;
        q["name"] = p.name;
        q["passed"] = p.passed;
        nlohmann::ordered_json m = nlohmann::ordered_json::object();
        for (const auto& [k, v] : p.metrics) {
            if (std::isfinite(v)) m[k] = v;
            else m[k] = nullptr;
        }
        q["metrics"] = m;
        if (!p.detail.empty()) q["detail"] = p.detail;
        j["properties"].push_back(q);
    }
    return j.dump(2);
}

Vec3 ErrorSampler::unit_vector() {
    for (;;) {
        const Vec3 x(gauss_.next(), gauss_.next(), gauss_.next());
        const double n = x.norm();
        if (n > 1e-12) return x / n;
    }
}

double ErrorSampler::uniform01() { return 0.5 * std::erfc(-gauss_.next() / std::numbers::sqrt2); }

Vec3 ErrorSampler::in_ball(double radius) { return radius * std::cbrt(uniform01()) * unit_vector(); }

Vec3 ErrorSampler::unit_vector_avoiding_south(double cap) {
    const double limit = std::cos(cap);
    for (;;) {
        const Vec3 u = unit_vector();
        if (-u.z() < limit) return u;
    }
}

MonotonicityResult lyapunov_monotonicity(LyapunovCandidate which, const ObserverGains& gains, Variant variant,
                                         int samples, std::uint64_t seed, double dt, double horizon) {
    ErrorSampler sampler(seed);
    std::vector<GammaErrorState> starts;
    for (int i = 0; i < samples; ++i) {
        GammaErrorState e;
        e.v_bar = sampler.in_ball(20.0);
        e.gamma_bar = sampler.unit_vector_avoiding_south(1e-3);
        starts.push_back(e);
    }
    struct One {
        bool monotone = true;
        double worst = -std::numeric_limits<double>::infinity();
    };
    const auto runs = parallel_map<One>(samples, [&](int i) {
        One r;
        double prev = std::numeric_limits<double>::quiet_NaN();
        integrate_gamma_error(starts[static_cast<std::size_t>(i)], gains, variant, dt, horizon,
                              [&](double, const GammaErrorState& e) {
                                  const double L = candidate_value(which, e, gains);
                                  if (!std::isfinite(L)) {
                                      r.monotone = false;
                                      return false;
                                  }
                                  if (!std::isnan(prev)) {
                                      const double excess = (L - prev) / (1.0 + prev);
                                      r.worst = std::max(r.worst, excess);
                                      if (excess > 1e-8) r.monotone = false;
                                  }
                                  prev = L;
                                  return true;
                              });
        return r;
    });
    MonotonicityResult out;
    out.trajectories = samples;
    out.worst_excess = -std::numeric_limits<double>::infinity();
    for (const One& r : runs) {
        out.monotone += r.monotone ? 1 : 0;
        out.worst_excess = std::max(out.worst_excess, r.worst);
    }
    return out;
}

DerivativeIdentityErrors derivative_identities(const ObserverGains& gains, int samples, std::uint64_t seed) {
    ErrorSampler sampler(seed);
    DerivativeIdentityErrors out;
    for (int i = 0; i < samples; ++i) {
        const Vec3 v = sampler.in_ball(20.0);
        const Vec3 g = sampler.unit_vector();
        const GammaErrorRate f1 = gamma_error_field(v, g, gains, Variant::kObserver1);
        const GammaErrorRate f2 = gamma_error_field(v, g, gains, Variant::kObserver2);
        // Scale-aware: the rates grow like |v|^2, so compare relative to the
        // size of the terms being summed.
        const double l0 = lyapunov_L0_gradient(v, g, gains).along(f1);
        const double l0_ref = lyapunov_L0_rate_closed_form(v, g, gains);
        const double s0 = lyapunov_S0_gradient(v, g, gains).along(f2);
        const double s0_ref = lyapunov_S0_rate_closed_form(v, g, gains);
        const Vec3 c = cross_product_rate(v, g, gains, Variant::kObserver2);
        const Vec3 c_ref = cross_product_rate_closed_form(v, g, gains);
        out.L0_rate = std::max(out.L0_rate, std::abs(l0 - l0_ref) / (1.0 + std::abs(l0_ref)));
        out.S0_rate = std::max(out.S0_rate, std::abs(s0 - s0_ref) / (1.0 + std::abs(s0_ref)));
        out.cross_rate = std::max(out.cross_rate, (c - c_ref).norm() / (1.0 + c_ref.norm()));
    }
    return out;
}

double delta_decay_rate(const ObserverGains& gains, const GammaErrorState& e0, double dt, double t_from,
                        double t_to) {
    double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    integrate_gamma_error(e0, gains, Variant::kObserver1, dt, t_to, [&](double t, const GammaErrorState& e) {
        if (t + 1e-12 < t_from) return true;
        const Vec3 d = e.v_bar - (gains.g() / gains.k1v()) * (kE3 - e.gamma_bar);
        const double y = std::log(d.norm());
        n += 1.0;
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
        return true;
    });
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -slope;
}

CensusResult equilibrium_census(const ObserverGains& gains, Variant variant, int states, std::uint64_t seed) {
    CensusResult out;
    out.states = states;
    const auto eq = gamma_equilibria(gains);
    const auto norm_at = [&](const GammaErrorState& e) {
        const GammaErrorRate f = gamma_error_field(e.v_bar, e.gamma_bar, gains, variant);
        return std::hypot(f.v_bar_dot.norm(), f.gamma_bar_dot.norm());
    };
    out.field_norm_at_desired = norm_at(eq[0]);
    out.field_norm_at_undesired = norm_at(eq[1]);

    // Half the states uniform over the region |v_bar| <= 2 * 2g/k1v, half
    // concentrated near the equilibria to probe their neighbourhoods.
    ErrorSampler sampler(seed);
    const double v_scale = 4.0 * gains.g() / gains.k1v();
    out.min_norm_elsewhere = std::numeric_limits<double>::infinity();
    for (int i = 0; i < states; ++i) {
        GammaErrorState e;
        if (i % 2 == 0) {
            e.v_bar = sampler.in_ball(v_scale);
            e.gamma_bar = sampler.unit_vector();
        } else {
            const GammaErrorState& c = eq[static_cast<std::size_t>((i / 2) % 2)];
            e.v_bar = c.v_bar + sampler.in_ball(0.05);
            e.gamma_bar = (c.gamma_bar + sampler.in_ball(0.05)).normalized();
        }
        bool near = false;
        for (const auto& c : eq) {
            const double d = std::hypot((e.v_bar - c.v_bar).norm(), (e.gamma_bar - c.gamma_bar).norm());
            if (d < 1e-3) near = true;
        }
        if (near) continue;
        out.min_norm_elsewhere = std::min(out.min_norm_elsewhere, norm_at(e));
    }
    return out;
}

ProbeResult probe_equilibrium(const ObserverGains& gains, const MagneticReference& m_I, Variant variant, int index,
                              int trials, std::uint64_t seed, double dt, double radius, double escape_window,
                              double horizon) {
    const EquilibriumSet eq = equilibria(gains, m_I);
    const Equilibrium& start = eq.points[static_cast<std::size_t>(index)];
    const Equilibrium& target = eq.points[0];

    ErrorSampler sampler(seed);
    std::vector<FullErrorState> starts;
    for (int i = 0; i < trials; ++i) {
        Eigen::Matrix<double, 6, 1> p;
        do {
            for (int j = 0; j < 6; ++j) p(j) = sampler.normal();
        } while (p.norm() < 1e-6);
        p *= radius / p.norm();
        starts.push_back({start.v_bar + p.head<3>(), start.R_bar * exp_rotation(p.tail<3>())});
    }

    struct One {
        bool escaped = false, reconverged = false, contained = true;
        double escape_time = std::numeric_limits<double>::infinity();
        double final_distance = 0.0, excursion = 0.0;
    };
    const auto runs = parallel_map<One>(trials, [&](int i) {
        const FullErrorState& e0 = starts[static_cast<std::size_t>(i)];
        const double d0 = distance_to(e0.v_bar, e0.R_bar, start);
        One r;
        integrate_full_error(e0, gains, m_I, variant, dt, horizon, [&](double t, const FullErrorState& e) {
            const double d = distance_to(e.v_bar, e.R_bar, start);
            if (!r.escaped && d > 0.1 && t <= escape_window + 1e-9) {
                r.escaped = true;
                r.escape_time = t;
            }
            r.excursion = std::max(r.excursion, d / d0);
            r.final_distance = distance_to(e.v_bar, e.R_bar, target);
            return true;
        });
        r.reconverged = r.final_distance < 0.01;
        r.contained = r.excursion <= 10.0;
        return r;
    });

    ProbeResult out;
    out.equilibrium = index;
    out.trials = trials;
    for (const One& r : runs) {
        out.escaped += r.escaped ? 1 : 0;
        out.reconverged += r.reconverged ? 1 : 0;
        out.contained += r.contained ? 1 : 0;
        out.max_escape_time = std::max(out.max_escape_time, r.escape_time);
        out.max_final_distance = std::max(out.max_final_distance, r.final_distance);
        out.max_excursion_ratio = std::max(out.max_excursion_ratio, r.excursion);
    }
    return out;
}

double invariant_error_gap(const TraceSet& a, const TraceSet& b) {
    double gap = 0.0;
    for (const ObserverTrace& oa : a.observers) {
        if (!is_full(oa.kind)) continue;
        const ObserverTrace& ob = b.observer(oa.kind);
        const std::size_t n = std::min(oa.samples.size(), ob.samples.size());
        for (std::size_t i = 0; i < n; ++i) {
            const Mat3 Ra = a.truth[i].R.matrix() * oa.samples[i].R_hat.matrix().transpose();
            const Mat3 Rb = b.truth[i].R.matrix() * ob.samples[i].R_hat.matrix().transpose();
            gap = std::max({gap, (oa.samples[i].v_bar - ob.samples[i].v_bar).norm(), (Ra - Rb).norm()});
        }
    }
    return gap;
}

std::pair<ScenarioConfig, ScenarioConfig> autonomy_scenarios(double dt, double duration) {
    ScenarioConfig a = ScenarioConfig::reference_sim1();
    a.scenario_id = "autonomy_circular";
    a.observers = {ObserverKind::kFull1, ObserverKind::kFull2};
    a.duration = duration;
    a.dt = dt;
    a.initial_error.velocity_is_inertial = true;
    ScenarioConfig b = a;
    b.scenario_id = "autonomy_hover_spin";
    b.trajectory = TrajectorySpec::hover_spin();
    return {a, b};
}

AutonomyResult autonomy_check(double dt, double duration) {
    const auto gap_at = [&](double h, std::uint64_t stride) {
        auto [a, b] = autonomy_scenarios(h, duration);
        a.output_stride = stride;
        b.output_stride = stride;
        return invariant_error_gap(run_scenario(a), run_scenario(b));
    };
    AutonomyResult r;
    r.gap = gap_at(dt, 1);
    r.gap_half_step = gap_at(0.5 * dt, 2);
    r.ratio = r.gap / r.gap_half_step;
    return r;
}

DecouplingResult decoupling_check(const ScenarioConfig& biased, double dt) {
    ScenarioConfig b = quiet(biased);
    b.dt = dt;
    b.observers = {ObserverKind::kFull1, ObserverKind::kFull2, ObserverKind::kGamma1, ObserverKind::kGamma2};
    ScenarioConfig c = b;
    c.sensors.mag_bias = Vec3::Zero();

    const auto gamma_gap = [](const TraceSet& x, const TraceSet& y) {
        double gap = 0.0;
        for (const ObserverTrace& ox : x.observers) {
            if (!is_full(ox.kind)) continue;
            const ObserverTrace& oy = y.observer(ox.kind);
            for (std::size_t i = 0; i < ox.samples.size(); ++i) {
                gap = std::max(gap, (ox.samples[i].gamma_hat - oy.samples[i].gamma_hat).norm());
            }
        }
        return gap;
    };

    const TraceSet tb = run_scenario(b);
    const TraceSet tc = run_scenario(c);

    DecouplingResult r;
    r.gamma_traces_identical = true;
    for (ObserverKind k : {ObserverKind::kGamma1, ObserverKind::kGamma2}) {
        const auto& xb = tb.observer(k).samples;
        const auto& xc = tc.observer(k).samples;
        for (std::size_t i = 0; i < xb.size(); ++i) {
            if (xb[i].v_hat != xc[i].v_hat || xb[i].gamma_hat != xc[i].gamma_hat) {
                r.gamma_traces_identical = false;
                break;
            }
        }
    }
    r.full_gamma_gap = gamma_gap(tb, tc);

    ScenarioConfig b2 = b, c2 = c;
    b2.dt = c2.dt = 0.5 * dt;
    b2.output_stride = c2.output_stride = 2;
    r.full_gamma_gap_half_step = gamma_gap(run_scenario(b2), run_scenario(c2));
    r.ratio = r.full_gamma_gap / r.full_gamma_gap_half_step;

    // Euler errors of the biased full observers against truth over the last
    // 10 s. Yaw errors are wrapped into (-180, 180].
    const double t_end = tb.truth.back().t;
    r.final_yaw_error_deg = 0.0;
    for (ObserverKind k : {ObserverKind::kFull1, ObserverKind::kFull2}) {
        const auto& s = tb.observer(k).samples;
        const EulerAngles& te = tb.truth.back().euler;
        const EulerAngles& ee = s.back().euler;
        r.max_final_roll_pitch_error_deg =
            std::max({r.max_final_roll_pitch_error_deg, std::abs(wrap_angle(ee.roll - te.roll)) * kRadToDeg,
                      std::abs(wrap_angle(ee.pitch - te.pitch)) * kRadToDeg});
        double n = 0.0, sum = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (tb.truth[i].t < t_end - 10.0 - 1e-9) continue;
            const double y = wrap_angle(s[i].euler.yaw - tb.truth[i].euler.yaw) * kRadToDeg;
            n += 1.0;
            sum += y;
            sq += y * y;
        }
        const double mean = sum / n;
        const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
        if (sd >= r.yaw_error_std_deg) {
            r.yaw_error_std_deg = sd;
            r.final_yaw_error_deg = mean;
        }
    }
    return r;
}

VerifyReport verify_poles(const VerifyOptions&) {
    VerifyReport rep{"poles", {}};
    const ObserverGains k = ObserverGains::reference();
    const MagneticReference m_I = MagneticReference::reference();
    const PoleReport p = linearized_poles(k, m_I);
    const double worst = std::max(std::abs(p.tilt_poles[0] - -1.2), std::abs(p.tilt_poles[1] - -1.2));
    rep.properties.push_back(property("double_tilt_pole", p.double_root && worst <= 1e-9,
                                      {{"pole_1_re", p.tilt_poles[0].real()},
                                       {"pole_1_im", p.tilt_poles[0].imag()},
                                       {"pole_2_re", p.tilt_poles[1].real()},
                                       {"pole_2_im", p.tilt_poles[1].imag()},
                                       {"max_abs_error", worst}}));
    rep.properties.push_back(property("decoupled_pole", std::abs(p.decoupled_pole - -1.2) <= 1e-12,
                                      {{"pole", p.decoupled_pole}}));
    rep.properties.push_back(property(
        "yaw_linearization_signs", p.yaw_pole_undesired > 0.0 && p.yaw_pole_desired < 0.0,
        {{"yaw_gain", p.yaw_gain},
         {"yaw_gain_unsquared", p.yaw_gain_unsquared},
         {"desired", p.yaw_pole_desired},
         {"undesired", p.yaw_pole_undesired}}));

    // The reduced heading field itself: d/ds of eta_dot . e2 along e2 at eta =
    // +e1 is -k_bar, at -e1 it is +k_bar.
    const double h = 1e-6;
    const auto slope = [&](const Vec3& eta) {
        const Vec3 tangent = kE3.cross(eta);
        return (eta_field((eta + h * tangent).normalized(), p.yaw_gain).dot(tangent) -
                eta_field((eta - h * tangent).normalized(), p.yaw_gain).dot(tangent)) /
               (2.0 * h);
    };
    const double s_desired = slope(kE1), s_undesired = slope(-kE1);
    rep.properties.push_back(property(
        "eta_field_slopes",
        std::abs(s_desired + p.yaw_gain) < 1e-6 && std::abs(s_undesired - p.yaw_gain) < 1e-6,
        {{"slope_desired", s_desired}, {"slope_undesired", s_undesired}}));
    return rep;
}

VerifyReport verify_lyapunov(const VerifyOptions& opts) {
    VerifyReport rep{"lyapunov", {}};
    const double horizon = 30.0;
    const ObserverGains strict(1.2, 1.2, 0.1, 2.764);
    const ObserverGains violating(1.2, 1.2, 1.0, 2.764);

    const MonotonicityResult l0 =
        lyapunov_monotonicity(LyapunovCandidate::kL0, strict, Variant::kObserver1, opts.samples, opts.seed, opts.dt,
                              horizon);
    rep.properties.push_back(property("L0_monotone_gamma_observer1", l0.monotone == l0.trajectories,
                                      {{"trajectories", l0.trajectories},
                                       {"monotone", l0.monotone},
                                       {"worst_relative_increase", l0.worst_excess}}));
    const MonotonicityResult s0 =
        lyapunov_monotonicity(LyapunovCandidate::kS0, violating, Variant::kObserver2, opts.samples, opts.seed,
                              opts.dt, horizon);
    rep.properties.push_back(property("S0_monotone_gamma_observer2", s0.monotone == s0.trajectories,
                                      {{"trajectories", s0.trajectories},
                                       {"monotone", s0.monotone},
                                       {"worst_relative_increase", s0.worst_excess}}));

    const DerivativeIdentityErrors d = derivative_identities(strict, 1000, opts.seed);
    rep.properties.push_back(property("derivative_identities",
                                      d.L0_rate <= 1e-10 && d.S0_rate <= 1e-10 && d.cross_rate <= 1e-10,
                                      {{"L0_rate_error", d.L0_rate},
                                       {"S0_rate_error", d.S0_rate},
                                       {"cross_rate_error", d.cross_rate}}));

    const ObserverGains bound = ObserverGains::reference();
    GammaErrorState e0;
    e0.v_bar = Vec3(-5.0, 5.0, -5.0);
    e0.gamma_bar = Vec3(0.6, -0.3, 0.5).normalized();
    const double rate = delta_decay_rate(bound, e0, opts.dt, 1.0, 10.0);
    const double rel = std::abs(rate - bound.k1v()) / bound.k1v();
    rep.properties.push_back(property("delta_decay_at_bound", rel <= 0.05,
                                      {{"fitted_rate", rate}, {"k1v", bound.k1v()}, {"relative_error", rel}}));
    return rep;
}

VerifyReport verify_autonomy(const VerifyOptions& opts) {
    VerifyReport rep{"autonomy", {}};
    const AutonomyResult a = autonomy_check(opts.dt);
    rep.properties.push_back(property("trajectory_independence", a.gap < 1e-4 && a.ratio >= 3.0,
                                      {{"gap", a.gap}, {"gap_half_step", a.gap_half_step}, {"ratio", a.ratio}}));
    return rep;
}

VerifyReport verify_decoupling(const VerifyOptions& opts) {
    VerifyReport rep{"decoupling", {}};
    const DecouplingResult d = decoupling_check(ScenarioConfig::reference_sim2(), opts.dt);
    rep.properties.push_back(property("gamma_observers_unaffected", d.gamma_traces_identical,
                                      {{"identical", d.gamma_traces_identical ? 1.0 : 0.0}}));
    rep.properties.push_back(property(
        "full_observer_gravity_estimate", d.full_gamma_gap < 1e-3 && d.ratio >= 3.0,
        {{"gap", d.full_gamma_gap}, {"gap_half_step", d.full_gamma_gap_half_step}, {"ratio", d.ratio}}));
    rep.properties.push_back(property("roll_pitch_unbiased", d.max_final_roll_pitch_error_deg < 0.5,
                                      {{"max_error_deg", d.max_final_roll_pitch_error_deg}}));
    rep.properties.push_back(property("yaw_settles_to_constant",
                                      std::abs(d.final_yaw_error_deg) > 1.0 && d.yaw_error_std_deg < 0.05,
                                      {{"mean_yaw_error_deg", d.final_yaw_error_deg},
                                       {"yaw_error_std_deg", d.yaw_error_std_deg}}));
    return rep;
}

VerifyReport verify_equilibria(const VerifyOptions& opts) {
    VerifyReport rep{"equilibria", {}};
    const ObserverGains k = ObserverGains::reference();
    for (Variant v : {Variant::kObserver1, Variant::kObserver2}) {
        const CensusResult c = equilibrium_census(k, v, 100000, opts.seed);
        const std::string tag = v == Variant::kObserver1 ? "1" : "2";
        rep.properties.push_back(property(
            "census_gamma_observer" + tag,
            c.field_norm_at_desired == 0.0 && c.field_norm_at_undesired == 0.0 && c.min_norm_elsewhere >= 1e-9,
            {{"field_norm_desired", c.field_norm_at_desired},
             {"field_norm_undesired", c.field_norm_at_undesired},
             {"min_norm_elsewhere", c.min_norm_elsewhere},
             {"states", c.states}}));
    }

    const MagneticReference m_I = MagneticReference::reference();
    for (int i = 0; i < 4; ++i) {
        const ProbeResult p = probe_equilibrium(k, m_I, Variant::kObserver1, i, 20, opts.seed + 101 * i, opts.dt);
        const bool ok = i == 0 ? (p.contained == p.trials && p.reconverged == p.trials)
                               : (p.escaped == p.trials && p.reconverged == p.trials);
        rep.properties.push_back(property("probe_equilibrium_" + std::to_string(i), ok,
                                          {{"trials", p.trials},
                                           {"escaped", p.escaped},
                                           {"reconverged", p.reconverged},
                                           {"contained", p.contained},
                                           {"max_escape_time", p.max_escape_time},
                                           {"max_final_distance", p.max_final_distance},
                                           {"max_excursion_ratio", p.max_excursion_ratio}}));
    }
    return rep;
}

VerifyReport run_suite(const std::string& suite, const VerifyOptions& opts) {
    if (opts.samples <= 0) throw ContractViolation("samples must be positive");
    if (!(opts.dt > 0.0)) throw ContractViolation("dt must be positive");
    if (suite == "poles") return verify_poles(opts);
    if (suite == "lyapunov") return verify_lyapunov(opts);
    if (suite == "autonomy") return verify_autonomy(opts);
    if (suite == "decoupling") return verify_decoupling(opts);
    if (suite == "equilibria") return verify_equilibria(opts);
    if (suite == "all") {
        VerifyReport all{"all", {}};
        for (const char* s : {"poles", "lyapunov", "autonomy", "decoupling", "equilibria"}) {
            VerifyReport r = run_suite(s, opts);
            for (auto& p : r.properties) {
                p.name = r.suite + "." + p.name;
                all.properties.push_back(std::move(p));
            }
        }
        return all;
    }
    throw ContractViolation("unknown suite '" + suite +
                            "' (expected lyapunov, autonomy, decoupling, equilibria, poles or all)");
}

}  // namespace velatt
