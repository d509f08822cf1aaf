#pragma once

// Invariant estimation errors, Lyapunov functions and equilibrium geometry.
//
// With truth (v, R) and estimate (v_hat, R_hat) the invariant errors are
//   v_bar = R (v - v_hat),   R_bar = R R_hat^T,   gamma_bar = R_bar e3,
// and their dynamics do not depend on the trajectory. Everything here works
// on those autonomous error systems.

#include "velatt/observers.hpp"
#include "velatt/simworld.hpp"
#include "velatt/so3.hpp"

#include <array>
#include <complex>
#include <functional>

namespace velatt {

/// Horizontal heading frame of the magnetic reference: R_alpha is the
/// rotation about e3 taking e1 onto pi_e3 m_I / |pi_e3 m_I|.
struct HeadingFrame {
    double alpha = 0.0;
    Rotation R_alpha;
    Vec3 m_bar = kE1;            // pi_e3 m_I / |pi_e3 m_I|
    double horizontal_norm = 0;  // |pi_e3 m_I|
};

HeadingFrame heading_frame(const MagneticReference& m_I);

struct ErrorState {
    Vec3 v_bar = Vec3::Zero();
    Rotation R_bar;
    Vec3 gamma_bar = kE3;
    Vec3 delta = Vec3::Zero();  // v_bar - (g / k1v)(e3 - gamma_bar)
    Vec3 eta = kE1;             // R_alpha^T R_bar R_alpha e1
    double attitude_error_angle = 0.0;
};

/// Builds every derived field from (v_bar, R_bar).
ErrorState make_error_state(const Vec3& v_bar, const Rotation& R_bar, const ObserverGains& gains,
                            const HeadingFrame& frame);

ErrorState invariant_errors(const TruthState& truth, const FullObserverState& est,
                            const ObserverGains& gains, const MagneticReference& m_I);

/// Errors of a gamma observer: (v_bar, gamma_bar = R gamma_hat).
struct GammaErrorState {
    Vec3 v_bar = Vec3::Zero();
    Vec3 gamma_bar = kE3;
};

GammaErrorState gamma_errors(const TruthState& truth, const GammaObserverState& est);

// Lyapunov candidates, all functions of (v_bar, gamma_bar).
double lyapunov_L0(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);
double lyapunov_L1(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);
double lyapunov_S0(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);

inline double lyapunov_L0(const ErrorState& e, const ObserverGains& k) { return lyapunov_L0(e.v_bar, e.gamma_bar, k); }
inline double lyapunov_L1(const ErrorState& e, const ObserverGains& k) { return lyapunov_L1(e.v_bar, e.gamma_bar, k); }
inline double lyapunov_S0(const ErrorState& e, const ObserverGains& k) { return lyapunov_S0(e.v_bar, e.gamma_bar, k); }

struct GammaErrorRate {
    Vec3 v_bar_dot = Vec3::Zero();
    Vec3 gamma_bar_dot = Vec3::Zero();
};

/// Autonomous right-hand side of the gamma-observer error system.
GammaErrorRate gamma_error_field(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains,
                                 Variant variant);

/// Partial derivatives of a scalar function of (v_bar, gamma_bar).
struct ErrorGradient {
    Vec3 d_v_bar = Vec3::Zero();
    Vec3 d_gamma_bar = Vec3::Zero();

    double along(const GammaErrorRate& f) const {
        return d_v_bar.dot(f.v_bar_dot) + d_gamma_bar.dot(f.gamma_bar_dot);
    }
};

ErrorGradient lyapunov_L0_gradient(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);
ErrorGradient lyapunov_S0_gradient(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);

/// -k1v |delta|^2 - (k2v - g k1r / k1v) |gamma_bar x v_bar|^2, the time
/// derivative of L0 along the Observer 1 field for unit gamma_bar.
double lyapunov_L0_rate_closed_form(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);

/// -(k1v + k2v) |v_bar x gamma_bar|^2, the derivative of S0 along the
/// Observer 2 field.
double lyapunov_S0_rate_closed_form(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);

/// d/dt (v_bar x gamma_bar) by the product rule along `variant`'s field.
Vec3 cross_product_rate(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains, Variant variant);

/// g e3 x gamma_bar - (k1v + k2v) v_bar x gamma_bar
Vec3 cross_product_rate_closed_form(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& gains);

struct FullErrorRate {
    Vec3 v_bar_dot = Vec3::Zero();
    Mat3 R_bar_dot = Mat3::Zero();
    Vec3 sigma_R_bar = Vec3::Zero();  // R_bar_dot = -skew(sigma_R_bar) R_bar
};

/// Autonomous right-hand side of the full (v_bar, R_bar) error system.
FullErrorRate full_error_field(const Vec3& v_bar, const Rotation& R_bar, const ObserverGains& gains,
                               const MagneticReference& m_I, Variant variant);

struct Equilibrium {
    Vec3 v_bar = Vec3::Zero();
    Rotation R_bar;
};

/// (0, I), (0, Ra diag(-1,-1,1) Ra^T), (2g/k1v e3, Ra diag(-1,1,-1) Ra^T),
/// (2g/k1v e3, Ra diag(1,-1,-1) Ra^T); only the first is stable.
struct EquilibriumSet {
    std::array<Equilibrium, 4> points;
    HeadingFrame frame;
};

EquilibriumSet equilibria(const ObserverGains& gains, const MagneticReference& m_I);

/// The two equilibria of the gamma error system: (0, e3) and (2g/k1v e3, -e3).
std::array<GammaErrorState, 2> gamma_equilibria(const ObserverGains& gains);

struct PoleReport {
    /// Roots of lambda^2 + (k1v + k2v) lambda + g k1r; each is a double pole
    /// of the 4-dimensional horizontal block.
    std::array<std::complex<double>, 2> tilt_poles;
    double discriminant = 0.0;
    int discriminant_sign = 0;
    bool double_root = false;  // discriminant within rounding of zero
    double decoupled_pole = 0.0;  // -k1v, vertical velocity channel
    /// Yaw gain k2r |pi_e3 m_I|^2 and the unsquared k2r |pi_e3 m_I|.
    double yaw_gain = 0.0;
    double yaw_gain_unsquared = 0.0;
    double yaw_pole_desired = 0.0;    // -yaw_gain
    double yaw_pole_undesired = 0.0;  // +yaw_gain
    bool satisfies_gain_bound = false;
};

PoleReport linearized_poles(const ObserverGains& gains, const MagneticReference& m_I);

/// Reduced heading dynamics near the desired attitude set:
/// eta_dot = -k_bar (e2 . eta) e3 x eta.
Vec3 eta_field(const Vec3& eta, double yaw_gain);

struct Classification {
    int label = 0;
    double distance = 0.0;
};

/// Nearest equilibrium in the metric |v_bar - v*| + angle(R_bar, R*).
Classification classify(const Vec3& v_bar, const Rotation& R_bar, const EquilibriumSet& eq);
inline Classification classify(const ErrorState& e, const EquilibriumSet& eq) {
    return classify(e.v_bar, e.R_bar, eq);
}

/// Nearest gamma equilibrium (label 0 or 1) in |v_bar - v*| + angle(gamma_bar, gamma*).
Classification classify_gamma(const GammaErrorState& e, const ObserverGains& gains);

double distance_to(const Vec3& v_bar, const Rotation& R_bar, const Equilibrium& eq);

/// Integrates the gamma error system with classical RK4 in R^6, projecting
/// gamma_bar back onto S^2 after every step. `observe` is called at t = 0 and
/// after every step; returning false stops the integration.
void integrate_gamma_error(GammaErrorState e0, const ObserverGains& gains, Variant variant, double dt,
                           double duration,
                           const std::function<bool(double, const GammaErrorState&)>& observe);

struct FullErrorState {
    Vec3 v_bar = Vec3::Zero();
    Rotation R_bar;
};

/// Integrates the full error system with RK4 on (v_bar, R_bar entries) and a
/// Newton polar projection after every step.
void integrate_full_error(FullErrorState e0, const ObserverGains& gains, const MagneticReference& m_I,
                          Variant variant, double dt, double duration,
                          const std::function<bool(double, const FullErrorState&)>& observe);

}  // namespace velatt
