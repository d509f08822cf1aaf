#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "velatt/so3.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace velatt;
using std::numbers::pi;

namespace {

Vec3 random_vector(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

TEST_CASE("skew matches the cross product") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const Vec3 u = random_vector(rng, 3.0), w = random_vector(rng, 3.0);
        CHECK((skew(u) * w - u.cross(w)).norm() < 1e-14);
        CHECK((skew(u) + skew(u).transpose()).norm() == 0.0);
    }
}

TEST_CASE("exp_rotation: quarter turn about e3 takes e1 to e2") {
    const Rotation r = exp_rotation(Vec3(0, 0, pi / 2));
    CHECK((r * kE1 - kE2).norm() < 1e-15);
    CHECK((r * kE2 + kE1).norm() < 1e-15);
    CHECK((r * kE3 - kE3).norm() == 0.0);
}

TEST_CASE("exp_rotation stays on SO(3) and its angle is |u|") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        Vec3 u = random_vector(rng, 1.0).normalized() * (0.001 + 3.1 * i / 200.0);
        const Rotation r = exp_rotation(u);
        CHECK(r.defect() < 1e-14);
        CHECK(r.matrix().determinant() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rotation_angle(r) == doctest::Approx(u.norm()).epsilon(1e-12));
        CHECK((r * u - u).norm() < 1e-14);  // axis is fixed
    }
}

TEST_CASE("exp_rotation is continuous through the small-angle branch") {
    const Vec3 axis = Vec3(1, -2, 0.5).normalized();
    const Rotation a = exp_rotation(0.99e-12 * axis);
    const Rotation b = exp_rotation(1.01e-12 * axis);
    CHECK((a.matrix() - b.matrix()).norm() < 1e-13);
    CHECK((exp_rotation(Vec3::Zero()).matrix() - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("from_matrix enforces the SO(3) contract") {
    CHECK_NOTHROW(Rotation::from_matrix(Mat3::Identity()));
    Mat3 reflect = Mat3::Identity();
    reflect(2, 2) = -1.0;
    CHECK_THROWS_AS(Rotation::from_matrix(reflect), ContractViolation);
    Mat3 sheared = Mat3::Identity();
    sheared(0, 1) = 1e-6;
    CHECK_THROWS_AS(Rotation::from_matrix(sheared), ContractViolation);
    Mat3 tiny = exp_rotation(Vec3(0.3, 0.2, 0.1)).matrix();
    tiny(0, 0) += 1e-12;
    CHECK_NOTHROW(Rotation::from_matrix(tiny));
}

TEST_CASE("gravity_direction is the third row") {
    const Rotation r = rotation_from_euler(0.2, -0.4, 1.3);
    // ZYX: R^T e3 = [-sin(pitch), sin(roll) cos(pitch), cos(roll) cos(pitch)]
    const Vec3 expected(-std::sin(-0.4), std::sin(0.2) * std::cos(-0.4), std::cos(0.2) * std::cos(-0.4));
    CHECK((gravity_direction(r) - expected).norm() < 1e-15);
}

TEST_CASE("Euler angles round-trip away from gimbal lock") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ang(-pi + 1e-6, pi), pit(-1.5, 1.5);
    for (int i = 0; i < 500; ++i) {
        const double roll = ang(rng), pitch = pit(rng), yaw = ang(rng);
        const EulerAngles e = euler_from_rotation(rotation_from_euler(roll, pitch, yaw));
        CHECK_FALSE(e.gimbal_lock);
        CHECK(e.roll == doctest::Approx(roll).epsilon(1e-10));
        CHECK(e.pitch == doctest::Approx(pitch).epsilon(1e-10));
        CHECK(e.yaw == doctest::Approx(yaw).epsilon(1e-10));
    }
}

TEST_CASE("Euler angles of diag(-1, 1, -1) are (pi, 0, pi)") {
    Mat3 m = Mat3::Zero();
    m.diagonal() << -1.0, 1.0, -1.0;
    const EulerAngles e = euler_from_rotation(Rotation::from_matrix(m));
    CHECK(e.roll == pi);
    CHECK(e.pitch == 0.0);
    CHECK(e.yaw == pi);
    CHECK((rotation_from_euler(e).matrix() - m).norm() < 1e-15);
}

TEST_CASE("gimbal lock pins roll and keeps the rotation") {
    for (double pitch : {pi / 2, -pi / 2}) {
        const Rotation r = rotation_from_euler(0.7, pitch, -0.4);
        const EulerAngles e = euler_from_rotation(r);
        CHECK(e.gimbal_lock);
        CHECK(e.roll == 0.0);
        CHECK((rotation_from_euler(e).matrix() - r.matrix()).norm() < 1e-9);
    }
}

TEST_CASE("orthonormalize recovers the nearest rotation") {
    const Rotation r = exp_rotation(Vec3(0.4, -1.1, 0.9));
    Mat3 noisy = r.matrix();
    noisy(1, 2) += 1e-5;
    noisy(0, 0) -= 2e-5;
    const Rotation fixed = orthonormalize(noisy);
    CHECK(fixed.defect() < 1e-14);
    CHECK((fixed.matrix() - r.matrix()).norm() < 3e-5);
    CHECK((orthonormalize(r.matrix()).matrix() - r.matrix()).norm() < 1e-14);

    Mat3 reflect = Mat3::Identity();
    reflect(0, 0) = -1.0;
    CHECK_THROWS_AS(orthonormalize(reflect), std::domain_error);
    CHECK_THROWS_AS(orthonormalize(Mat3::Zero()), std::domain_error);
}

TEST_CASE("project_orthogonal") {
    const Vec3 x = Vec3(1, 2, 2) / 3.0;
    const Mat3 p = project_orthogonal(x);
    CHECK((p * x).norm() < 1e-15);
    CHECK((p * p - p).norm() < 1e-15);
    CHECK_THROWS_AS(project_orthogonal(Vec3(1, 1, 0)), ContractViolation);
}

TEST_CASE("rotation_angle and rotation_distance") {
    CHECK(rotation_angle(Rotation::identity()) == 0.0);
    Mat3 flip = Mat3::Zero();
    flip.diagonal() << -1.0, -1.0, 1.0;
    CHECK(rotation_angle(Rotation::from_matrix(flip)) == doctest::Approx(pi));
    const Rotation a = exp_rotation(Vec3(0.1, 0.2, 0.3));
    const Rotation b = a * exp_rotation(Vec3(0, 0.25, 0));
    CHECK(rotation_distance(a, b) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
    CHECK(wrap_angle(-pi) == pi);
    CHECK(wrap_angle(pi) == pi);
    CHECK(wrap_angle(3 * pi) == doctest::Approx(pi));
    CHECK(wrap_angle(0.5 + 4 * pi) == doctest::Approx(0.5));
    CHECK(wrap_angle(-0.5) == -0.5);
}

TEST_CASE("is_finite") {
    CHECK(is_finite(Vec3(1, 2, 3)));
    CHECK_FALSE(is_finite(Vec3(1, std::nan(""), 3)));
    CHECK_FALSE(is_finite(Vec3(1, 2, INFINITY)));
}
