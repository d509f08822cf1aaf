#include "velatt/observers.hpp"

#include <cmath>
#include <string>

namespace velatt {

namespace {

// Velocity innovation shared by all four observers.
Vec3 sigma_v(Variant variant, const Vec3& v_err, const Vec3& gamma_hat, const ObserverGains& k) {
    Vec3 s = k.k1v() * v_err - k.k2v() * gamma_hat.cross(gamma_hat.cross(v_err));
    if (variant == Variant::kObserver2) s -= k.k1r() * v_err.cross(v_err.cross(gamma_hat));
    return s;
}

Vec3 sigma_R_gamma(const Vec3& v_err, const Vec3& gamma_hat, const ObserverGains& k) {
    return k.k1r() * v_err.cross(gamma_hat);
}

Innovation full_innovation(Variant variant, const Vec3& v_hat, const Rotation& R_hat,
                           const MeasurementFrame& m, const ObserverGains& k, const Vec3& m_I) {
    const Vec3 v_err = m.v_meas - v_hat;
    const Vec3 gamma_hat = gravity_direction(R_hat);
    const Vec3 m_hat = R_hat.transpose() * m_I;
    Innovation out;
    out.sigma_v = sigma_v(variant, v_err, gamma_hat, k);
    out.sigma_R = sigma_R_gamma(v_err, gamma_hat, k) +
                  k.k2r() * m.m_B.cross(m_hat).dot(gamma_hat) * gamma_hat;
    return out;
}

Innovation reduced_innovation(Variant variant, const Vec3& v_hat, const Vec3& gamma_hat,
                              const MeasurementFrame& m, const ObserverGains& k) {
    const Vec3 v_err = m.v_meas - v_hat;
    return {sigma_v(variant, v_err, gamma_hat, k), sigma_R_gamma(v_err, gamma_hat, k)};
}

void require_positive_dt(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw ContractViolation("step size must be positive, got " + std::to_string(dt));
    }
}

// v_hat rate and body rotation rate at one RK stage.
struct StageRate {
    Vec3 v_dot;
    Vec3 w;
};

template <typename Innov>
StageRate stage_rate(const Vec3& v_hat, const Vec3& gamma_hat, const MeasurementFrame& m, double g,
                     Innov&& innov) {
    const Innovation s = innov(m);
    return {v_hat.cross(m.omega) + m.a_B + g * gamma_hat + s.sigma_v, m.omega + s.sigma_R};
}

}  // namespace

Variant variant_from_int(int v) {
    if (v == 1) return Variant::kObserver1;
    if (v == 2) return Variant::kObserver2;
    throw ContractViolation("observer variant must be 1 or 2, got " + std::to_string(v));
}

ObserverGains::ObserverGains(double k1v, double k2v, double k1r, double k2r, double g)
    : k1v_(k1v), k2v_(k2v), k1r_(k1r), k2r_(k2r), g_(g) {
    const GainReport r = validate_gains(k1v, k2v, k1r, k2r, g);
    if (!r.valid) throw ContractViolation("observer gains and g must be finite and strictly positive");
    satisfies_bound_ = r.satisfies_gain_bound;
}

ObserverGains ObserverGains::at_bound(double k1v, double k2v, double k2r, double g) {
    return {k1v, k2v, k1v * k2v / g, k2r, g};
}

ObserverGains ObserverGains::reference() { return at_bound(1.2, 1.2, 2.764); }

GainReport validate_gains(double k1v, double k2v, double k1r, double k2r, double g) {
    const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    GainReport r;
    r.k1v_positive = positive(k1v);
    r.k2v_positive = positive(k2v);
    r.k1r_positive = positive(k1r);
    r.k2r_positive = positive(k2r);
    r.g_positive = positive(g);
    r.valid = r.k1v_positive && r.k2v_positive && r.k1r_positive && r.k2r_positive && r.g_positive;
    if (!r.valid) return r;
    const double bound = k1v * k2v / g;
    r.satisfies_gain_bound = k1r <= bound;
    r.bound_margin = bound - k1r;
    r.discriminant = (k1v + k2v) * (k1v + k2v) - 4.0 * g * k1r;
    r.discriminant_sign = (r.discriminant > 0.0) - (r.discriminant < 0.0);
    return r;
}

GainReport validate_gains(const ObserverGains& k) {
    return validate_gains(k.k1v(), k.k2v(), k.k1r(), k.k2r(), k.g());
}

MagneticReference::MagneticReference(const Vec3& m_I) {
    if (!m_I.allFinite() || m_I.norm() == 0.0) {
        throw ContractViolation("magnetic reference must be finite and non-zero");
    }
    m_ = m_I.normalized();
    if (m_.cross(kE3).norm() < 1e-9) {
        throw ContractViolation("magnetic reference is collinear with gravity");
    }
}

MagneticReference MagneticReference::reference() { return MagneticReference(Vec3(0.434, -0.0091, 0.9008)); }

Innovation innovation(Variant variant, const FullObserverState& s, const MeasurementFrame& m,
                      const ObserverGains& gains, const MagneticReference& m_I) {
    return full_innovation(variant, s.v_hat, s.R_hat, m, gains, m_I.vector());
}

Innovation innovation_gamma(Variant variant, const GammaObserverState& s, const MeasurementFrame& m,
                            const ObserverGains& gains) {
    return reduced_innovation(variant, s.v_hat, s.gamma_hat, m, gains);
}

FullObserverState step_full(const FullObserverState& s, const MeasurementInterval& m,
                            const ObserverGains& gains, const MagneticReference& m_I, double dt,
                            Variant variant) {
    require_positive_dt(dt);
    const Vec3& mi = m_I.vector();
    const double g = gains.g();
    const double h = dt;

    const auto rate = [&](const Vec3& v, const Vec3& theta, const MeasurementFrame& frame) {
        const Rotation R = theta.isZero(0.0) ? s.R_hat : s.R_hat * exp_rotation(theta);
        return stage_rate(v, gravity_direction(R), frame, g, [&](const MeasurementFrame& mf) {
            return full_innovation(variant, v, R, mf, gains, mi);
        });
    };

    const StageRate k1 = rate(s.v_hat, Vec3::Zero(), m.start);
    const StageRate k2 = rate(s.v_hat + 0.5 * h * k1.v_dot, 0.5 * h * k1.w, m.mid);
    const StageRate k3 = rate(s.v_hat + 0.5 * h * k2.v_dot, 0.5 * h * k2.w, m.mid);
    const StageRate k4 = rate(s.v_hat + h * k3.v_dot, h * k3.w, m.end);

    FullObserverState out;
    out.v_hat = s.v_hat + (h / 6.0) * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
    // Rotation rate frozen at the midpoint stage.
    const Vec3 theta = h * k2.w;
    out.R_hat = s.R_hat * exp_rotation(theta);
    if (out.R_hat.defect() > 1e-10) out.R_hat = orthonormalize(out.R_hat.matrix());
    return out;
}

GammaObserverState step_gamma(const GammaObserverState& s, const MeasurementInterval& m,
                              const ObserverGains& gains, double dt, Variant variant) {
    require_positive_dt(dt);
    const double g = gains.g();
    const double h = dt;

    // gamma_hat(t) = exp(-theta) gamma_hat(0) when R_hat(t) = R_hat(0) exp(theta).
    const auto rate = [&](const Vec3& v, const Vec3& theta, const MeasurementFrame& frame) {
        const Vec3 gam = theta.isZero(0.0) ? s.gamma_hat : exp_rotation(-theta) * s.gamma_hat;
        return stage_rate(v, gam, frame, g, [&](const MeasurementFrame& mf) {
            return reduced_innovation(variant, v, gam, mf, gains);
        });
    };

    const StageRate k1 = rate(s.v_hat, Vec3::Zero(), m.start);
    const StageRate k2 = rate(s.v_hat + 0.5 * h * k1.v_dot, 0.5 * h * k1.w, m.mid);
    const StageRate k3 = rate(s.v_hat + 0.5 * h * k2.v_dot, 0.5 * h * k2.w, m.mid);
    const StageRate k4 = rate(s.v_hat + h * k3.v_dot, h * k3.w, m.end);

    GammaObserverState out;
    out.v_hat = s.v_hat + (h / 6.0) * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
    const Vec3 theta = h * k2.w;
    out.gamma_hat = (exp_rotation(-theta) * s.gamma_hat).normalized();
    return out;
}

GammaObserverState reduce_to_gamma(const FullObserverState& s) {
    return {s.v_hat, gravity_direction(s.R_hat)};
}

FullObserverState reorthonormalized(const FullObserverState& s) {
    return {s.v_hat, orthonormalize(s.R_hat.matrix())};
}

}  // namespace velatt
