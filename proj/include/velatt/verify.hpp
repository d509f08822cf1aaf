#pragma once

// Property suites over the observers' error systems. Each metric function
// returns raw numbers; the suite wrappers compare them with fixed thresholds
// and build a machine-readable report.

#include "velatt/analysis.hpp"
#include "velatt/scenario.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace velatt {

struct VerifyOptions {
    int samples = 100;
    std::uint64_t seed = 7;
    double dt = 1e-3;
};

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::map<std::string, double> metrics;
    std::string detail;
};

struct VerifyReport {
    std::string suite;
    std::vector<PropertyResult> properties;

    bool passed() const;
    std::string to_json() const;
};

/// Uniform samples used by the sweeps. Built on the same portable Gaussian
/// stream as the sensor noise.
class ErrorSampler {
public:
    explicit ErrorSampler(std::uint64_t seed) : gauss_(seed) {}

    Vec3 unit_vector();
    /// Uniform in the ball of the given radius.
    Vec3 in_ball(double radius);
    /// Uniform on S^2 outside the cap of angular radius `cap` around `-e3`.
    Vec3 unit_vector_avoiding_south(double cap);
    double uniform01();
    double normal() { return gauss_.next(); }

private:
    GaussianStream gauss_;
};

// ---- Lyapunov ---------------------------------------------------------------

enum class LyapunovCandidate { kL0, kL1, kS0 };

struct MonotonicityResult {
    int trajectories = 0;
    int monotone = 0;
    double worst_excess = 0.0;  // max over steps of (L(t+dt) - L(t)) / (1 + L(t))
};

/// Random initial errors (|v_bar| <= 20, gamma_bar uniform on S^2 minus a
/// 1e-3 cap around -e3) integrated over `horizon` seconds; a trajectory is
/// monotone when every step satisfies L(t+dt) <= L(t) + 1e-8 (1 + L(t)).
MonotonicityResult lyapunov_monotonicity(LyapunovCandidate which, const ObserverGains& gains, Variant variant,
                                         int samples, std::uint64_t seed, double dt, double horizon);

struct DerivativeIdentityErrors {
    double L0_rate = 0.0;     // max |grad L0 . f1 - closed form|
    double S0_rate = 0.0;     // max |grad S0 . f2 - closed form|
    double cross_rate = 0.0;  // max |d/dt(v x g) - closed form| along f2
};

DerivativeIdentityErrors derivative_identities(const ObserverGains& gains, int samples, std::uint64_t seed);

/// Least-squares slope of -log|delta(t)| over [t_from, t_to] for the
/// Observer 1 gamma error system with k1r on the gain bound.
double delta_decay_rate(const ObserverGains& gains_at_bound, const GammaErrorState& e0, double dt, double t_from,
                        double t_to);

// ---- equilibria ---------------------------------------------------------------

struct CensusResult {
    double field_norm_at_desired = 0.0;
    double field_norm_at_undesired = 0.0;
    double min_norm_elsewhere = 0.0;
    int states = 0;
};

/// Random search for zeros of the gamma error field away from the 1e-3
/// neighbourhoods of its two equilibria.
CensusResult equilibrium_census(const ObserverGains& gains, Variant variant, int states, std::uint64_t seed);

struct ProbeResult {
    int equilibrium = 0;
    int trials = 0;
    int escaped = 0;       // distance from the equilibrium exceeded 0.1 within escape_window
    int reconverged = 0;   // distance to (0, I) below 0.01 at the horizon
    int contained = 0;     // (desired only) never beyond 10x the initial distance
    double max_escape_time = 0.0;
    double max_final_distance = 0.0;
    double max_excursion_ratio = 0.0;
};

/// Perturbations of norm `radius` in (v_bar, log R_bar) around equilibrium
/// `index`, integrated with the full error system.
ProbeResult probe_equilibrium(const ObserverGains& gains, const MagneticReference& m_I, Variant variant, int index,
                              int trials, std::uint64_t seed, double dt, double radius = 1e-3,
                              double escape_window = 20.0, double horizon = 120.0);

// ---- scenario-level checks ------------------------------------------------------

/// Sup over all samples of max(|v_bar_a - v_bar_b|, |R_bar_a - R_bar_b|_F)
/// for every full observer in both traces.
double invariant_error_gap(const TraceSet& a, const TraceSet& b);

/// Scenario pair used by the autonomy check: circular vs hover-with-spin, the
/// same inertial invariant errors, 10 s.
std::pair<ScenarioConfig, ScenarioConfig> autonomy_scenarios(double dt, double duration = 10.0);

struct AutonomyResult {
    double gap = 0.0;
    double gap_half_step = 0.0;
    double ratio = 0.0;
};

AutonomyResult autonomy_check(double dt, double duration = 10.0);

struct DecouplingResult {
    bool gamma_traces_identical = false;
    double full_gamma_gap = 0.0;            // max |gamma_hat_biased - gamma_hat_clean|
    double full_gamma_gap_half_step = 0.0;
    double ratio = 0.0;
    double max_final_roll_pitch_error_deg = 0.0;
    double final_yaw_error_deg = 0.0;       // mean over the last 10 s (worst observer)
    double yaw_error_std_deg = 0.0;         // std over the last 10 s (worst observer)
};

DecouplingResult decoupling_check(const ScenarioConfig& biased, double dt);

// ---- suites ---------------------------------------------------------------------

VerifyReport verify_poles(const VerifyOptions& opts);
VerifyReport verify_lyapunov(const VerifyOptions& opts);
VerifyReport verify_autonomy(const VerifyOptions& opts);
VerifyReport verify_decoupling(const VerifyOptions& opts);
VerifyReport verify_equilibria(const VerifyOptions& opts);

/// suite in {lyapunov, autonomy, decoupling, equilibria, poles, all}.
/// Throws ContractViolation for an unknown suite name.
VerifyReport run_suite(const std::string& suite, const VerifyOptions& opts);

}  // namespace velatt
