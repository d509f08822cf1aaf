#include "velatt/analysis.hpp"

#include <cmath>
#include <limits>

namespace velatt {

namespace {

Vec3 delta_of(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    return v_bar - (k.g() / k.k1v()) * (kE3 - gamma_bar);
}

// v_bar_dot written as -k1v delta + ..., algebraically identical to
// g (e3 - gamma_bar) - sigma_v_bar but exact at both equilibria.
Vec3 v_bar_rate(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k, Variant variant) {
    Vec3 r = -k.k1v() * delta_of(v_bar, gamma_bar, k) + k.k2v() * gamma_bar.cross(gamma_bar.cross(v_bar));
    if (variant == Variant::kObserver2) r += k.k1r() * v_bar.cross(v_bar.cross(gamma_bar));
    return r;
}

void require_step(double dt, double duration) {
    if (!(dt > 0.0)) throw ContractViolation("dt must be positive");
    if (!(duration >= 0.0)) throw ContractViolation("duration must be non-negative");
}

long step_count(double duration, double dt) {
    return static_cast<long>(std::floor(duration / dt + 1e-9));
}

}  // namespace

HeadingFrame heading_frame(const MagneticReference& m_I) {
    const Vec3 horiz = project_orthogonal(kE3) * m_I.vector();
    HeadingFrame f;
    f.horizontal_norm = horiz.norm();
    f.m_bar = horiz / f.horizontal_norm;
    f.alpha = std::atan2(f.m_bar.y(), f.m_bar.x());
    Mat3 r;
    r << f.m_bar.x(), -f.m_bar.y(), 0.0,
         f.m_bar.y(), f.m_bar.x(), 0.0,
         0.0, 0.0, 1.0;
    f.R_alpha = Rotation::from_matrix(r);
    return f;
}

ErrorState make_error_state(const Vec3& v_bar, const Rotation& R_bar, const ObserverGains& gains,
                            const HeadingFrame& frame) {
    ErrorState e;
    e.v_bar = v_bar;
    e.R_bar = R_bar;
    e.gamma_bar = R_bar * kE3;
    e.delta = delta_of(v_bar, e.gamma_bar, gains);
    e.eta = frame.R_alpha.transpose() * (R_bar * (frame.R_alpha * kE1));
    e.attitude_error_angle = rotation_angle(R_bar);
    return e;
}

ErrorState invariant_errors(const TruthState& truth, const FullObserverState& est,
                            const ObserverGains& gains, const MagneticReference& m_I) {
    const Vec3 v_bar = truth.R * (truth.v - est.v_hat);
    const Rotation R_bar = truth.R * est.R_hat.transpose();
    return make_error_state(v_bar, R_bar, gains, heading_frame(m_I));
}

GammaErrorState gamma_errors(const TruthState& truth, const GammaObserverState& est) {
    return {truth.R * (truth.v - est.v_hat), truth.R * est.gamma_hat};
}

double lyapunov_L0(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    const Vec3 d = kE3 - gamma_bar;
    return 0.5 * v_bar.squaredNorm() + k.g() * k.k2v() / (2.0 * k.k1v() * k.k1r()) * d.squaredNorm() -
           (k.g() / k.k1v()) * v_bar.dot(d);
}

double lyapunov_L1(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    return 0.5 * delta_of(v_bar, gamma_bar, k).squaredNorm() +
           (2.0 * k.g() / k.k1r()) * (1.0 - kE3.dot(gamma_bar));
}

double lyapunov_S0(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    return 0.5 * v_bar.cross(gamma_bar).squaredNorm() + (k.g() / k.k1r()) * (1.0 - kE3.dot(gamma_bar));
}

GammaErrorRate gamma_error_field(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k,
                                 Variant variant) {
    return {v_bar_rate(v_bar, gamma_bar, k, variant), -k.k1r() * gamma_bar.cross(gamma_bar.cross(v_bar))};
}

ErrorGradient lyapunov_L0_gradient(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    const Vec3 d = kE3 - gamma_bar;
    const double c = k.g() / k.k1v();
    const double w = k.g() * k.k2v() / (k.k1v() * k.k1r());
    return {v_bar - c * d, -w * d + c * v_bar};
}

ErrorGradient lyapunov_S0_gradient(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    // d/dv (1/2|v x g|^2) = g x (v x g);  d/dg (1/2|v x g|^2) = (v x g) x v
    const Vec3 c = v_bar.cross(gamma_bar);
    return {gamma_bar.cross(c), c.cross(v_bar) - (k.g() / k.k1r()) * kE3};
}

double lyapunov_L0_rate_closed_form(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    return -k.k1v() * delta_of(v_bar, gamma_bar, k).squaredNorm() -
           (k.k2v() - k.g() * k.k1r() / k.k1v()) * gamma_bar.cross(v_bar).squaredNorm();
}

double lyapunov_S0_rate_closed_form(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    return -(k.k1v() + k.k2v()) * v_bar.cross(gamma_bar).squaredNorm();
}

Vec3 cross_product_rate(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k, Variant variant) {
    const GammaErrorRate f = gamma_error_field(v_bar, gamma_bar, k, variant);
    return f.v_bar_dot.cross(gamma_bar) + v_bar.cross(f.gamma_bar_dot);
}

Vec3 cross_product_rate_closed_form(const Vec3& v_bar, const Vec3& gamma_bar, const ObserverGains& k) {
    return k.g() * kE3.cross(gamma_bar) - (k.k1v() + k.k2v()) * v_bar.cross(gamma_bar);
}

FullErrorRate full_error_field(const Vec3& v_bar, const Rotation& R_bar, const ObserverGains& k,
                               const MagneticReference& m_I, Variant variant) {
    const Vec3 gamma_bar = R_bar * kE3;
    const Vec3& mi = m_I.vector();
    FullErrorRate r;
    r.v_bar_dot = v_bar_rate(v_bar, gamma_bar, k, variant);
    r.sigma_R_bar = k.k1r() * v_bar.cross(gamma_bar) +
                    k.k2r() * mi.cross(R_bar * mi).dot(gamma_bar) * gamma_bar;
    r.R_bar_dot = -skew(r.sigma_R_bar) * R_bar.matrix();
    return r;
}

EquilibriumSet equilibria(const ObserverGains& k, const MagneticReference& m_I) {
    EquilibriumSet set;
    set.frame = heading_frame(m_I);
    const Mat3& ra = set.frame.R_alpha.matrix();
    const auto conj = [&](double a, double b, double c) {
        const Mat3 d = Vec3(a, b, c).asDiagonal();
        return orthonormalize(ra * d * ra.transpose());
    };
    // 2 (g / k1v) rather than 2g / k1v: identical to the value the delta
    // form of the field cancels against.
    const Vec3 v_up = 2.0 * (k.g() / k.k1v()) * kE3;
    set.points[0] = {Vec3::Zero(), Rotation::identity()};
    set.points[1] = {Vec3::Zero(), conj(-1, -1, 1)};
    set.points[2] = {v_up, conj(-1, 1, -1)};
    set.points[3] = {v_up, conj(1, -1, -1)};
    return set;
}

std::array<GammaErrorState, 2> gamma_equilibria(const ObserverGains& k) {
    return {GammaErrorState{Vec3::Zero(), kE3}, GammaErrorState{2.0 * (k.g() / k.k1v()) * kE3, -kE3}};
}

PoleReport linearized_poles(const ObserverGains& k, const MagneticReference& m_I) {
    PoleReport p;
    const double b = k.k1v() + k.k2v();
    const double c = k.g() * k.k1r();
    p.discriminant = b * b - 4.0 * c;
    // A discriminant within a few ulps of b^2 is indistinguishable from zero:
    // the roots of a double root move by sqrt(rounding).
    p.double_root = std::abs(p.discriminant) <= 64.0 * std::numeric_limits<double>::epsilon() * b * b;
    if (p.double_root) p.discriminant = 0.0;
    p.discriminant_sign = (p.discriminant > 0.0) - (p.discriminant < 0.0);
    if (p.discriminant >= 0.0) {
        // Numerically stable pair: q = -(b + sqrt(D)) / 2, roots q and c / q.
        const double q = -0.5 * (b + std::sqrt(p.discriminant));
        p.tilt_poles = {std::complex<double>(q, 0.0), std::complex<double>(c / q, 0.0)};
    } else {
        const double im = 0.5 * std::sqrt(-p.discriminant);
        p.tilt_poles = {std::complex<double>(-0.5 * b, im), std::complex<double>(-0.5 * b, -im)};
    }
    p.decoupled_pole = -k.k1v();
    const double h = heading_frame(m_I).horizontal_norm;
    p.yaw_gain = k.k2r() * h * h;
    p.yaw_gain_unsquared = k.k2r() * h;
    p.yaw_pole_desired = -p.yaw_gain;
    p.yaw_pole_undesired = p.yaw_gain;
    p.satisfies_gain_bound = k.satisfies_gain_bound();
    return p;
}

Vec3 eta_field(const Vec3& eta, double yaw_gain) {
    return -yaw_gain * kE2.dot(eta) * kE3.cross(eta);
}

double distance_to(const Vec3& v_bar, const Rotation& R_bar, const Equilibrium& eq) {
    return (v_bar - eq.v_bar).norm() + rotation_distance(R_bar, eq.R_bar);
}

Classification classify(const Vec3& v_bar, const Rotation& R_bar, const EquilibriumSet& eq) {
    Classification c{0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i < 4; ++i) {
        const double d = distance_to(v_bar, R_bar, eq.points[i]);
        if (d < c.distance) c = {i, d};
    }
    return c;
}

Classification classify_gamma(const GammaErrorState& e, const ObserverGains& gains) {
    const auto eq = gamma_equilibria(gains);
    Classification c{0, std::numeric_limits<double>::infinity()};
    for (int i = 0; i < 2; ++i) {
        const Vec3& g = eq[i].gamma_bar;
        const double ang = std::atan2(e.gamma_bar.cross(g).norm(), e.gamma_bar.dot(g));
        const double d = (e.v_bar - eq[i].v_bar).norm() + ang;
        if (d < c.distance) c = {i, d};
    }
    return c;
}

void integrate_gamma_error(GammaErrorState e, const ObserverGains& k, Variant variant, double dt,
                           double duration,
                           const std::function<bool(double, const GammaErrorState&)>& observe) {
    require_step(dt, duration);
    const auto f = [&](const Vec3& v, const Vec3& g) { return gamma_error_field(v, g, k, variant); };
    const long n = step_count(duration, dt);
    if (!observe(0.0, e)) return;
    for (long i = 1; i <= n; ++i) {
        const GammaErrorRate k1 = f(e.v_bar, e.gamma_bar);
        const GammaErrorRate k2 = f(e.v_bar + 0.5 * dt * k1.v_bar_dot, e.gamma_bar + 0.5 * dt * k1.gamma_bar_dot);
        const GammaErrorRate k3 = f(e.v_bar + 0.5 * dt * k2.v_bar_dot, e.gamma_bar + 0.5 * dt * k2.gamma_bar_dot);
        const GammaErrorRate k4 = f(e.v_bar + dt * k3.v_bar_dot, e.gamma_bar + dt * k3.gamma_bar_dot);
        e.v_bar += (dt / 6.0) * (k1.v_bar_dot + 2.0 * k2.v_bar_dot + 2.0 * k3.v_bar_dot + k4.v_bar_dot);
        e.gamma_bar += (dt / 6.0) * (k1.gamma_bar_dot + 2.0 * k2.gamma_bar_dot + 2.0 * k3.gamma_bar_dot +
                                     k4.gamma_bar_dot);
        e.gamma_bar.normalize();
        if (!observe(static_cast<double>(i) * dt, e)) return;
    }
}

void integrate_full_error(FullErrorState e, const ObserverGains& k, const MagneticReference& m_I,
                          Variant variant, double dt, double duration,
                          const std::function<bool(double, const FullErrorState&)>& observe) {
    require_step(dt, duration);
    // Intermediate stages leave SO(3) slightly; the field is evaluated on the
    // raw matrix, which only needs R_bar e3 and R_bar m_I.
    const Vec3& mi = m_I.vector();
    const auto f = [&](const Vec3& v, const Mat3& R, Vec3& v_dot, Mat3& R_dot) {
        const Vec3 gamma_bar = R * kE3;
        v_dot = v_bar_rate(v, gamma_bar, k, variant);
        const Vec3 s = k.k1r() * v.cross(gamma_bar) + k.k2r() * mi.cross(R * mi).dot(gamma_bar) * gamma_bar;
        R_dot = -skew(s) * R;
    };
    const long n = step_count(duration, dt);
    if (!observe(0.0, e)) return;
    Vec3 v = e.v_bar;
    Mat3 R = e.R_bar.matrix();
    for (long i = 1; i <= n; ++i) {
        Vec3 a1, a2, a3, a4;
        Mat3 b1, b2, b3, b4;
        f(v, R, a1, b1);
        f(v + 0.5 * dt * a1, R + 0.5 * dt * b1, a2, b2);
        f(v + 0.5 * dt * a2, R + 0.5 * dt * b2, a3, b3);
        f(v + dt * a3, R + dt * b3, a4, b4);
        v += (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        R += (dt / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        // One Newton step of the polar iteration; the RK update leaves SO(3)
        // by O(dt^5) only, so this lands on it to rounding.
        R = 0.5 * (R + R.inverse().transpose());
        e.v_bar = v;
        e.R_bar = Rotation::from_matrix(R);
        if (!observe(static_cast<double>(i) * dt, e)) return;
    }
}

}  // namespace velatt
