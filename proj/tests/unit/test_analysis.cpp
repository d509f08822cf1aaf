#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "velatt/analysis.hpp"

#include <cmath>
#include <random>

using namespace velatt;

namespace {

struct Sampler {
    std::mt19937_64 rng{11};
    std::normal_distribution<double> n{0.0, 1.0};
    Vec3 vec(double s) { return s * Vec3(n(rng), n(rng), n(rng)); }
    Vec3 unit() { return vec(1.0).normalized(); }
};

// Error-rate oracle built from the observer and plant equations directly:
//   v_dot = v x w + a + g R^T e3,  v_hat_dot = v_hat x w + a + g gamma_hat + sigma_v,
//   R_dot = R skew(w), v_bar = R (v - v_hat).
GammaErrorRate chain_rule_rate(const TruthState& truth, const GammaObserverState& est, const ObserverGains& k,
                               Variant variant) {
    const Vec3 w = truth.omega;
    const Vec3 a = truth.R.transpose() * (truth.x_ddot - k.g() * kE3);
    const Vec3 v_err = truth.v - est.v_hat;
    const Vec3 gh = est.gamma_hat;
    Vec3 sigma_v = k.k1v() * v_err - k.k2v() * gh.cross(gh.cross(v_err));
    if (variant == Variant::kObserver2) sigma_v -= k.k1r() * v_err.cross(v_err.cross(gh));
    const Vec3 sigma_r = k.k1r() * v_err.cross(gh);
    const Vec3 v_dot = truth.v.cross(w) + a + k.g() * gravity_direction(truth.R);
    const Vec3 vh_dot = est.v_hat.cross(w) + a + k.g() * gh + sigma_v;
    const Vec3 gh_dot = gh.cross(w + sigma_r);
    const Mat3 R_dot = truth.R.matrix() * skew(w);
    return {R_dot * v_err + truth.R * (v_dot - vh_dot), R_dot * gh + truth.R * gh_dot};
}

}  // namespace

TEST_CASE("heading frame of the reference field") {
    const HeadingFrame f = heading_frame(MagneticReference::reference());
    const Vec3 m = Vec3(0.434, -0.0091, 0.9008).normalized();
    CHECK(f.horizontal_norm == doctest::Approx(std::hypot(m.x(), m.y())).epsilon(1e-14));
    CHECK(f.alpha == doctest::Approx(std::atan2(-0.0091, 0.434)).epsilon(1e-14));
    CHECK((f.R_alpha * kE1 - f.m_bar).norm() < 1e-15);
}

TEST_CASE("invariant errors vanish when the estimate equals the truth") {
    const auto k = ObserverGains::reference();
    const auto m_I = MagneticReference::reference();
    const TruthState t = truth_at(TrajectorySpec::circular(), 3.0);
    const ErrorState e = invariant_errors(t, {t.v, t.R}, k, m_I);
    CHECK(e.v_bar.norm() == 0.0);
    CHECK((e.R_bar.matrix() - Mat3::Identity()).norm() < 1e-15);
    CHECK(e.delta.norm() < 1e-15);
    CHECK((e.eta - kE1).norm() < 1e-15);
    CHECK(lyapunov_L0(e, k) == doctest::Approx(0.0));
    CHECK(lyapunov_L1(e, k) == doctest::Approx(0.0));
    CHECK(lyapunov_S0(e, k) == doctest::Approx(0.0));
}

TEST_CASE("gamma error field agrees with the chain rule on random trajectories") {
    Sampler s;
    const auto k = ObserverGains(1.2, 0.7, 0.3, 2.0);
    for (int i = 0; i < 200; ++i) {
        const TrajectorySpec spec = i % 2 ? TrajectorySpec::circular() : TrajectorySpec::hover_spin();
        const TruthState t = truth_at(spec, 0.37 * i);
        const GammaObserverState est{t.v + s.vec(3.0), s.unit()};
        const GammaErrorState e = gamma_errors(t, est);
        for (Variant v : {Variant::kObserver1, Variant::kObserver2}) {
            const GammaErrorRate f = gamma_error_field(e.v_bar, e.gamma_bar, k, v);
            const GammaErrorRate ref = chain_rule_rate(t, est, k, v);
            CHECK((f.v_bar_dot - ref.v_bar_dot).norm() < 1e-11 * (1.0 + ref.v_bar_dot.norm()));
            CHECK((f.gamma_bar_dot - ref.gamma_bar_dot).norm() < 1e-12 * (1.0 + ref.gamma_bar_dot.norm()));
        }
    }
}

TEST_CASE("Lyapunov gradients match central differences") {
    Sampler s;
    const auto k = ObserverGains(1.2, 1.2, 0.1, 2.764);
    const double h = 1e-6;
    for (int i = 0; i < 50; ++i) {
        const Vec3 v = s.vec(5.0), g = s.unit();
        const ErrorGradient dl = lyapunov_L0_gradient(v, g, k);
        const ErrorGradient ds = lyapunov_S0_gradient(v, g, k);
        for (int j = 0; j < 3; ++j) {
            const Vec3 e = Vec3::Unit(j);
            const double fv = (lyapunov_L0(v + h * e, g, k) - lyapunov_L0(v - h * e, g, k)) / (2 * h);
            const double fg = (lyapunov_L0(v, g + h * e, k) - lyapunov_L0(v, g - h * e, k)) / (2 * h);
            CHECK(dl.d_v_bar(j) == doctest::Approx(fv).epsilon(1e-6));
            CHECK(dl.d_gamma_bar(j) == doctest::Approx(fg).epsilon(1e-6));
            const double sv = (lyapunov_S0(v + h * e, g, k) - lyapunov_S0(v - h * e, g, k)) / (2 * h);
            const double sg = (lyapunov_S0(v, g + h * e, k) - lyapunov_S0(v, g - h * e, k)) / (2 * h);
            CHECK(ds.d_v_bar(j) == doctest::Approx(sv).epsilon(1e-6));
            CHECK(ds.d_gamma_bar(j) == doctest::Approx(sg).epsilon(1e-6));
        }
    }
}

TEST_CASE("closed-form rates equal gradient times field") {
    Sampler s;
    const auto k = ObserverGains(1.2, 1.2, 0.1, 2.764);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v = s.vec(4.0), g = s.unit();
        const double l0 = lyapunov_L0_gradient(v, g, k).along(gamma_error_field(v, g, k, Variant::kObserver1));
        CHECK(l0 == doctest::Approx(lyapunov_L0_rate_closed_form(v, g, k)).epsilon(1e-11));
        CHECK(lyapunov_L0_rate_closed_form(v, g, k) <= 0.0);
        const double s0 = lyapunov_S0_gradient(v, g, k).along(gamma_error_field(v, g, k, Variant::kObserver2));
        CHECK(s0 == doctest::Approx(lyapunov_S0_rate_closed_form(v, g, k)).epsilon(1e-11));
        CHECK((cross_product_rate(v, g, k, Variant::kObserver2) - cross_product_rate_closed_form(v, g, k)).norm() <
              1e-11 * (1.0 + v.squaredNorm()));
    }
}

TEST_CASE("gamma equilibria are exact zeros of the field") {
    const auto k = ObserverGains::reference();
    for (const auto& e : gamma_equilibria(k)) {
        for (Variant v : {Variant::kObserver1, Variant::kObserver2}) {
            const GammaErrorRate f = gamma_error_field(e.v_bar, e.gamma_bar, k, v);
            CHECK(f.v_bar_dot.norm() == 0.0);
            CHECK(f.gamma_bar_dot.norm() == 0.0);
        }
    }
}

TEST_CASE("the four full equilibria") {
    const auto k = ObserverGains::reference();
    const auto m_I = MagneticReference::reference();
    const EquilibriumSet set = equilibria(k, m_I);
    CHECK(set.points[2].v_bar.z() == doctest::Approx(2 * 9.81 / 1.2));
    for (int i = 0; i < 4; ++i) {
        const Equilibrium& p = set.points[i];
        for (Variant v : {Variant::kObserver1, Variant::kObserver2}) {
            const FullErrorRate f = full_error_field(p.v_bar, p.R_bar, k, m_I, v);
            CHECK(f.v_bar_dot.norm() < 1e-12);
            CHECK(f.R_bar_dot.norm() < 1e-12);
        }
        const Classification c = classify(p.v_bar, p.R_bar, set);
        CHECK(c.label == i);
        CHECK(c.distance < 1e-7);
    }
    // Undesired attitudes are half-turns.
    for (int i = 1; i < 4; ++i) CHECK(rotation_angle(set.points[i].R_bar) == doctest::Approx(M_PI));
}

TEST_CASE("classify by nearest equilibrium") {
    const auto k = ObserverGains::reference();
    const EquilibriumSet set = equilibria(k, MagneticReference::reference());
    const Classification c = classify(Vec3(1e-3, 0, 0), Rotation::identity(), set);
    CHECK(c.label == 0);
    CHECK(c.distance == doctest::Approx(1e-3));
    const GammaErrorState g{2 * 9.81 / 1.2 * kE3, -kE3};
    CHECK(classify_gamma(g, k).label == 1);
}

TEST_CASE("poles of the reference gains: double root at -1.2") {
    const PoleReport p = linearized_poles(ObserverGains::reference(), MagneticReference::reference());
    CHECK(p.double_root);
    CHECK(p.discriminant_sign == 0);
    CHECK(std::abs(p.tilt_poles[0] - std::complex<double>(-1.2, 0)) < 1e-9);
    CHECK(std::abs(p.tilt_poles[1] - std::complex<double>(-1.2, 0)) < 1e-9);
    CHECK(p.decoupled_pole == -1.2);
    const Vec3 m = Vec3(0.434, -0.0091, 0.9008).normalized();
    const double h2 = m.x() * m.x() + m.y() * m.y();
    CHECK(p.yaw_gain == doctest::Approx(2.764 * h2).epsilon(1e-14));
    CHECK(p.yaw_gain == doctest::Approx(0.5209).epsilon(1e-3));
    CHECK(p.yaw_gain_unsquared == doctest::Approx(2.764 * std::sqrt(h2)).epsilon(1e-14));
    CHECK(p.yaw_pole_undesired > 0.0);
    CHECK(p.yaw_pole_desired < 0.0);
}

TEST_CASE("poles: Vieta relations, complex pair and the k1r -> 0 limit") {
    const auto m_I = MagneticReference::reference();
    const PoleReport strict = linearized_poles(ObserverGains(1.2, 1.2, 0.1, 2.764), m_I);
    CHECK(strict.discriminant_sign == 1);
    CHECK((strict.tilt_poles[0] + strict.tilt_poles[1]).real() == doctest::Approx(-2.4));
    CHECK((strict.tilt_poles[0] * strict.tilt_poles[1]).real() == doctest::Approx(0.981));

    const PoleReport cplx = linearized_poles(ObserverGains(1, 1, 1, 1), m_I);
    CHECK(cplx.discriminant_sign == -1);
    CHECK_FALSE(cplx.satisfies_gain_bound);
    CHECK(cplx.tilt_poles[0].imag() == doctest::Approx(std::sqrt(4 * 9.81 - 4) / 2));
    CHECK(cplx.tilt_poles[0].real() == -1.0);

    const PoleReport limit = linearized_poles(ObserverGains(1.2, 1.2, 1e-12, 1), m_I);
    CHECK(limit.tilt_poles[0].real() == doctest::Approx(-2.4));
    CHECK(std::abs(limit.tilt_poles[1].real()) < 1e-11);
}

TEST_CASE("eta field") {
    CHECK(eta_field(kE1, 0.5).norm() == 0.0);
    CHECK(eta_field(-kE1, 0.5).norm() == 0.0);
    const Vec3 eta = Vec3(std::cos(0.1), std::sin(0.1), 0);
    CHECK(eta_field(eta, 0.5).dot(kE3.cross(eta)) < 0.0);  // turns back towards e1
}

TEST_CASE("integrators converge to the desired equilibrium") {
    const auto k = ObserverGains::reference();
    const auto m_I = MagneticReference::reference();
    GammaErrorState last;
    integrate_gamma_error({Vec3(-5, 5, -5), Vec3(0.3, 0.4, -0.5).normalized()}, k, Variant::kObserver1, 1e-2, 60,
                          [&](double, const GammaErrorState& e) {
                              last = e;
                              return true;
                          });
    CHECK(last.v_bar.norm() < 1e-6);
    CHECK((last.gamma_bar - kE3).norm() < 1e-6);

    FullErrorState full;
    int calls = 0;
    integrate_full_error({Vec3(-5, 5, -5), exp_rotation(Vec3(2.0, -1.0, 0.5))}, k, m_I, Variant::kObserver2, 1e-2,
                         80, [&](double, const FullErrorState& e) {
                             full = e;
                             ++calls;
                             return true;
                         });
    CHECK(calls == 8001);
    CHECK(full.v_bar.norm() < 1e-6);
    CHECK(rotation_angle(full.R_bar) < 1e-6);
}

TEST_CASE("integrators validate arguments and honour early stop") {
    const auto k = ObserverGains::reference();
    CHECK_THROWS_AS(integrate_gamma_error({}, k, Variant::kObserver1, 0.0, 1.0, [](double, const auto&) {
                        return true;
                    }),
                    ContractViolation);
    int calls = 0;
    integrate_gamma_error({}, k, Variant::kObserver1, 0.1, 10.0, [&](double, const GammaErrorState&) {
        return ++calls < 3;
    });
    CHECK(calls == 3);
}
