#pragma once

// Velocity-aided attitude observers.
//
// Both observers copy the rigid-body model
//
//   dv/dt = v x w + a_B + g R^T e3,   dR/dt = R skew(w)
//
// and add innovation terms built from the velocity error v_meas - v_hat,
// the estimated gravity direction R_hat^T e3 and the magnetometer. The
// reduced ("gamma") observers drop the magnetometer entirely and estimate
// (v, R^T e3) on R^3 x S^2.

#include "velatt/so3.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace velatt {

enum class Variant : int {
    kObserver1 = 1,  // linear velocity innovation
    kObserver2 = 2,  // adds -k1r v~ x (v~ x gamma_hat) to sigma_v
};

Variant variant_from_int(int v);

inline constexpr double kDefaultGravity = 9.81;

/// Positive observer gains. The gain bound k1r <= k1v k2v / g is evaluated
/// once at construction; Observer 2 does not need it.
class ObserverGains {
public:
    ObserverGains(double k1v, double k2v, double k1r, double k2r, double g = kDefaultGravity);

    /// Gains with k1r placed exactly on the bound k1v k2v / g.
    static ObserverGains at_bound(double k1v, double k2v, double k2r, double g = kDefaultGravity);

    /// k1v = k2v = 1.2, k1r = 1.44 / g, k2r = 2.764.
    static ObserverGains reference();

    double k1v() const { return k1v_; }
    double k2v() const { return k2v_; }
    double k1r() const { return k1r_; }
    double k2r() const { return k2r_; }
    double g() const { return g_; }

    bool satisfies_gain_bound() const { return satisfies_bound_; }

    /// Same gains with a different k1r (the bound flag is recomputed).
    ObserverGains with_k1r(double k1r) const { return {k1v_, k2v_, k1r, k2r_, g_}; }

    friend bool operator==(const ObserverGains&, const ObserverGains&) = default;

private:
    double k1v_, k2v_, k1r_, k2r_, g_;
    bool satisfies_bound_;
};

struct GainReport {
    bool k1v_positive = false;
    bool k2v_positive = false;
    bool k1r_positive = false;
    bool k2r_positive = false;
    bool g_positive = false;
    bool valid = false;               // every gain and g strictly positive
    bool satisfies_gain_bound = false;
    double bound_margin = 0.0;        // k1v k2v / g - k1r; negative when violated
    double discriminant = 0.0;        // (k1v + k2v)^2 - 4 g k1r
    int discriminant_sign = 0;
};

/// Never throws; a non-positive gain yields `valid == false`.
GainReport validate_gains(double k1v, double k2v, double k1r, double k2r, double g = kDefaultGravity);
GainReport validate_gains(const ObserverGains& gains);

struct MeasurementFrame {
    double t = 0.0;
    Vec3 omega = Vec3::Zero();   // rad/s, body
    Vec3 a_B = Vec3::Zero();     // specific acceleration, m/s^2, body
    Vec3 m_B = Vec3::Zero();     // normalised magnetic field, body
    Vec3 v_meas = Vec3::Zero();  // m/s, body
};

/// Measurements at the start, midpoint and end of an integration step.
/// The RK stages read the sample matching their time; holding a single frame
/// over the step is the zero-order-hold special case.
struct MeasurementInterval {
    MeasurementFrame start, mid, end;

    static MeasurementInterval hold(const MeasurementFrame& m) { return {m, m, m}; }
};

struct FullObserverState {
    Vec3 v_hat = Vec3::Zero();
    Rotation R_hat;
};

struct GammaObserverState {
    Vec3 v_hat = Vec3::Zero();
    Vec3 gamma_hat = kE3;
};

struct Innovation {
    Vec3 sigma_v = Vec3::Zero();
    Vec3 sigma_R = Vec3::Zero();
};

/// Inertial magnetic field with the non-collinearity check against e3;
/// the vector is normalised on construction.
class MagneticReference {
public:
    explicit MagneticReference(const Vec3& m_I);
    static MagneticReference reference();  // [0.434, -0.0091, 0.9008]

    const Vec3& vector() const { return m_; }

private:
    Vec3 m_;
};

Innovation innovation(Variant variant, const FullObserverState& s, const MeasurementFrame& m,
                      const ObserverGains& gains, const MagneticReference& m_I);

inline Innovation innovation_obs1(const FullObserverState& s, const MeasurementFrame& m,
                                  const ObserverGains& gains, const MagneticReference& m_I) {
    return innovation(Variant::kObserver1, s, m, gains, m_I);
}
inline Innovation innovation_obs2(const FullObserverState& s, const MeasurementFrame& m,
                                  const ObserverGains& gains, const MagneticReference& m_I) {
    return innovation(Variant::kObserver2, s, m, gains, m_I);
}

/// Innovation of the reduced observers; m_B is never read.
Innovation innovation_gamma(Variant variant, const GammaObserverState& s, const MeasurementFrame& m,
                            const ObserverGains& gains);

/// One step of the full observer. The velocity follows classical RK4 with the
/// innovation recomputed at every stage; the attitude takes one exponential
/// step with the rotation rate of the midpoint stage,
/// R_hat <- R_hat exp(dt (omega + sigma_R)), so R_hat stays on SO(3). Stages
/// read the measurements at t, t + dt/2 and t + dt. Drift above 1e-10 is
/// repaired by polar projection.
/// Throws ContractViolation when dt <= 0.
FullObserverState step_full(const FullObserverState& s, const MeasurementInterval& m,
                            const ObserverGains& gains, const MagneticReference& m_I, double dt,
                            Variant variant);
inline FullObserverState step_full(const FullObserverState& s, const MeasurementFrame& m,
                                   const ObserverGains& gains, const MagneticReference& m_I,
                                   double dt, Variant variant) {
    return step_full(s, MeasurementInterval::hold(m), gains, m_I, dt, variant);
}

/// One step of a gamma observer; gamma_hat is moved by exact rotations and
/// renormalised, so |gamma_hat| = 1 to rounding.
GammaObserverState step_gamma(const GammaObserverState& s, const MeasurementInterval& m,
                              const ObserverGains& gains, double dt, Variant variant);
inline GammaObserverState step_gamma(const GammaObserverState& s, const MeasurementFrame& m,
                                     const ObserverGains& gains, double dt, Variant variant) {
    return step_gamma(s, MeasurementInterval::hold(m), gains, dt, variant);
}

/// (v_hat, R_hat^T e3)
GammaObserverState reduce_to_gamma(const FullObserverState& s);

/// Polar re-projection of R_hat. Scenario runners call this every
/// kReorthonormalizePeriod steps in addition to the per-step drift check.
FullObserverState reorthonormalized(const FullObserverState& s);
inline constexpr std::uint64_t kReorthonormalizePeriod = 100;

}  // namespace velatt
