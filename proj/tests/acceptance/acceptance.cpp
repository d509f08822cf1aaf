// Acceptance criteria. Prints one PASS/FAIL line per criterion; exit status is
// non-zero if any selected criterion fails.
//
//   velatt_acceptance            all criteria
//   velatt_acceptance 3 7        selected criteria

#include "velatt/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace velatt;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string summary;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome c1_simulation1() {
    Outcome o{true, ""};
    for (ObserverKind k : {ObserverKind::kFull1, ObserverKind::kFull2}) {
        ScenarioConfig c = ScenarioConfig::reference_sim1();
        c.observers = {k};
        const auto t0 = std::chrono::steady_clock::now();
        const TraceSet t = run_scenario(c);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto& s = t.observers[0].samples;
        double worst_v = 0.0, worst_a = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (t.truth[i].t < 50.0 - 1e-9) continue;
            worst_v = std::max(worst_v, s[i].v_err_norm);
            worst_a = std::max(worst_a, s[i].attitude_error * kDeg);
        }
        const bool ok = s.back().v_err_norm < 0.01 && s.back().attitude_error * kDeg < 0.5 && worst_v < 0.01 &&
                        worst_a < 0.5 && secs < 10.0;
        o.pass = o.pass && ok;
        o.summary += to_string(k) + ": max|v~|[50,60]=" + fmt("%.3g", worst_v) +
                     " max_att_err[50,60]=" + fmt("%.3g", worst_a) + "deg runtime=" + fmt("%.2f", secs) + "s; ";
    }
    return o;
}

Outcome c2_simulation2() {
    const DecouplingResult d = decoupling_check(ScenarioConfig::reference_sim2(), 1e-3);
    const bool tilt = d.max_final_roll_pitch_error_deg < 0.5;
    const bool yaw = std::abs(d.final_yaw_error_deg) > 1.0 && d.yaw_error_std_deg < 0.05;
    const bool gamma = d.gamma_traces_identical && d.full_gamma_gap < 1e-3 && d.ratio >= 3.0;
    Outcome o;
    o.pass = tilt && yaw && gamma;
    o.summary = "roll/pitch=" + fmt("%.3g", d.max_final_roll_pitch_error_deg) + "deg" + (tilt ? "" : "(!)") +
                " yaw_mean=" + fmt("%.3g", d.final_yaw_error_deg) + "deg yaw_std=" +
                fmt("%.3g", d.yaw_error_std_deg) + "deg" + (yaw ? "" : "(!)") +
                " gamma_identical=" + (d.gamma_traces_identical ? "yes" : "no") +
                " gamma_hat_gap=" + fmt("%.3g", d.full_gamma_gap) + " ratio=" + fmt("%.3g", d.ratio);

    // Diagnostic only: the same bias applied to the field before rotation
    // into the body frame.
    ScenarioConfig inertial = ScenarioConfig::reference_sim2();
    inertial.sensors.mag_bias_frame = BiasFrame::kInertial;
    const DecouplingResult di = decoupling_check(inertial, 1e-3);
    o.summary += " [inertial-frame bias: yaw_mean=" + fmt("%.3g", di.final_yaw_error_deg) +
                 "deg yaw_std=" + fmt("%.3g", di.yaw_error_std_deg) + "deg]";
    return o;
}

Outcome c3_lyapunov() {
    const auto l0 = lyapunov_monotonicity(LyapunovCandidate::kL0, ObserverGains(1.2, 1.2, 0.1, 2.764),
                                          Variant::kObserver1, 100, 7, 1e-3, 30.0);
    const auto s0 = lyapunov_monotonicity(LyapunovCandidate::kS0, ObserverGains(1.2, 1.2, 1.0, 2.764),
                                          Variant::kObserver2, 100, 7, 1e-3, 30.0);
    return {l0.monotone == 100 && s0.monotone == 100,
            "L0 " + std::to_string(l0.monotone) + "/100 (worst rel. step " + fmt("%.2g", l0.worst_excess) +
                "), S0 " + std::to_string(s0.monotone) + "/100 (worst rel. step " + fmt("%.2g", s0.worst_excess) +
                ")"};
}

Outcome c4_identities() {
    const auto d = derivative_identities(ObserverGains(1.2, 1.2, 0.1, 2.764), 1000, 7);
    return {d.L0_rate <= 1e-10 && d.S0_rate <= 1e-10 && d.cross_rate <= 1e-10,
            "dL0/dt " + fmt("%.2g", d.L0_rate) + ", dS0/dt " + fmt("%.2g", d.S0_rate) + ", d(v x g)/dt " +
                fmt("%.2g", d.cross_rate)};
}

Outcome c5_census() {
    Outcome o{true, ""};
    for (Variant v : {Variant::kObserver1, Variant::kObserver2}) {
        const auto c = equilibrium_census(ObserverGains::reference(), v, 100000, 7);
        o.pass = o.pass && c.field_norm_at_desired == 0.0 && c.field_norm_at_undesired == 0.0 &&
                 c.min_norm_elsewhere >= 1e-9;
        o.summary += std::string(v == Variant::kObserver1 ? "obs1" : "obs2") + ": |f| at eq = " +
                     fmt("%g", c.field_norm_at_desired) + ", " + fmt("%g", c.field_norm_at_undesired) +
                     ", min elsewhere " + fmt("%.3g", c.min_norm_elsewhere) + "; ";
    }
    return o;
}

Outcome c6_poles() {
    const PoleReport p = linearized_poles(ObserverGains::reference(), MagneticReference::reference());
    const double err = std::max(std::abs(p.tilt_poles[0] + 1.2), std::abs(p.tilt_poles[1] + 1.2));
    return {err <= 1e-9 && p.decoupled_pole == -1.2 && p.yaw_pole_undesired > 0.0,
            "tilt poles -1.2 (err " + fmt("%.2g", err) + "), decoupled " + fmt("%g", p.decoupled_pole) +
                ", undesired yaw pole +" + fmt("%.4f", p.yaw_pole_undesired)};
}

Outcome c7_probes() {
    Outcome o{true, ""};
    const auto k = ObserverGains::reference();
    const auto m_I = MagneticReference::reference();
    for (int i = 0; i < 4; ++i) {
        const ProbeResult p = probe_equilibrium(k, m_I, Variant::kObserver1, i, 20, 7 + 101 * i, 1e-3);
        if (i == 0) {
            o.pass = o.pass && p.contained == 20;
            o.summary += "eq0 contained " + std::to_string(p.contained) + "/20 (max ratio " +
                         fmt("%.3g", p.max_excursion_ratio) + "); ";
        } else {
            o.pass = o.pass && p.escaped == 20 && p.reconverged == 20;
            o.summary += "eq" + std::to_string(i) + " escaped " + std::to_string(p.escaped) + "/20 (by " +
                         fmt("%.3g", p.max_escape_time) + "s) reconverged " + std::to_string(p.reconverged) +
                         "/20; ";
        }
    }
    return o;
}

Outcome c8_autonomy() {
    const AutonomyResult a = autonomy_check(1e-3);
    return {a.gap < 1e-4 && a.ratio >= 3.0,
            "gap " + fmt("%.3g", a.gap) + ", half-step gap " + fmt("%.3g", a.gap_half_step) + ", ratio " +
                fmt("%.3g", a.ratio)};
}

Outcome c9_decay() {
    const auto k = ObserverGains::reference();
    const double rate = delta_decay_rate(k, {Vec3(-5, 5, -5), Vec3(0.6, -0.3, 0.5).normalized()}, 1e-3, 1.0, 10.0);
    const double rel = std::abs(rate - k.k1v()) / k.k1v();
    return {rel <= 0.05, "fitted rate " + fmt("%.6g", rate) + " vs k1v 1.2 (rel. err " + fmt("%.2g", rel) + ")"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome c10_determinism() {
    ScenarioConfig c = ScenarioConfig::reference_sim2();
    c.scenario_id = "determinism";
    c.duration = 10.0;
    c.sensors.gyro_noise_std = 0.01;
    c.sensors.accel_noise_std = 0.05;
    c.sensors.mag_noise_std = 0.01;
    c.sensors.vel_noise_std = 0.05;
    c.sensors.seed = 2024;
    const fs::path base = fs::temp_directory_path() / "velatt_acceptance_determinism";
    fs::remove_all(base);
    const auto a = write_trace_files(run_scenario(c), base / "a");
    const auto b = write_trace_files(run_scenario(c), base / "b");
    bool same = a.size() == b.size();
    std::size_t bytes = 0;
    for (std::size_t i = 0; same && i < a.size(); ++i) {
        const std::string x = slurp(a[i]);
        same = x == slurp(b[i]);
        bytes += x.size();
    }
    fs::remove_all(base);
    return {same, std::to_string(a.size()) + " files, " + std::to_string(bytes) + " bytes compared"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"simulation 1 convergence", c1_simulation1},
        {"simulation 2 decoupling", c2_simulation2},
        {"Lyapunov monotonicity", c3_lyapunov},
        {"analytic derivative identities", c4_identities},
        {"equilibrium census", c5_census},
        {"pole verification", c6_poles},
        {"stability/instability probes", c7_probes},
        {"autonomy", c8_autonomy},
        {"equality-case delta decay", c9_decay},
        {"determinism", c10_determinism},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
    if (selected.empty()) {
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
    }
    int failures = 0;
    for (int n : selected) {
        if (n < 1 || n > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "no criterion %d\n", n);
            return 2;
        }
        const auto& [name, fn] = criteria[static_cast<std::size_t>(n - 1)];
        const Outcome o = fn();
        std::printf("criterion %2d %-32s %s  %s\n", n, name.c_str(), o.pass ? "PASS" : "FAIL", o.summary.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
