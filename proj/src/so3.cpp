#include "velatt/so3.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace velatt {

namespace {

constexpr double kPi = std::numbers::pi;

// Below this angle the exponential uses I + skew(u); the next series term
// is O(|u|^2) and below double precision there.
constexpr double kSmallAngle = 1e-12;

constexpr double kGimbalLock = 1e-9;

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m) {
    if (!m.allFinite()) throw ContractViolation("rotation matrix has non-finite entries");
    const double d = (m.transpose() * m - Mat3::Identity()).norm();
    if (d > kTolerance) {
        throw ContractViolation("matrix is not orthonormal (defect " + std::to_string(d) + ")");
    }
    if (std::abs(m.determinant() - 1.0) > kTolerance) {
        throw ContractViolation("matrix determinant is not +1");
    }
    return Rotation(m, Unchecked{});
}

double Rotation::defect() const {
    return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 skew(const Vec3& u) {
    Mat3 s;
    s << 0.0, -u.z(), u.y(),
         u.z(), 0.0, -u.x(),
         -u.y(), u.x(), 0.0;
    return s;
}

Rotation exp_rotation(const Vec3& u) {
    const double angle = u.norm();
    const Mat3 k = skew(u);
    if (angle < kSmallAngle) return Rotation(Mat3::Identity() + k, Rotation::Unchecked{});
    const double a = std::sin(angle) / angle;
    const double b = (1.0 - std::cos(angle)) / (angle * angle);
    return Rotation(Mat3::Identity() + a * k + b * k * k, Rotation::Unchecked{});
}

Vec3 gravity_direction(const Rotation& r) {
    return r.matrix().row(2).transpose();
}

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

EulerAngles euler_from_rotation(const Rotation& r) {
    const Mat3& m = r.matrix();
    EulerAngles e;
    const double s = std::clamp(-m(2, 0), -1.0, 1.0);
    e.pitch = std::asin(s) + 0.0;
    const double c = std::sqrt(m(2, 1) * m(2, 1) + m(2, 2) * m(2, 2));
    if (c < kGimbalLock) {
        e.gimbal_lock = true;
        e.roll = 0.0;
        e.yaw = wrap_angle(std::atan2(-m(0, 1), m(1, 1)) + 0.0);
        return e;
    }
    // +0.0 folds -0 into +0 so that atan2(-0, -1) cannot yield -pi.
    e.roll = wrap_angle(std::atan2(m(2, 1) + 0.0, m(2, 2)));
    e.yaw = wrap_angle(std::atan2(m(1, 0) + 0.0, m(0, 0)));
    return e;
}

Rotation rotation_from_euler(double roll, double pitch, double yaw) {
    const double cr = std::cos(roll), sr = std::sin(roll);
    const double cp = std::cos(pitch), sp = std::sin(pitch);
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    Mat3 m;
    m << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
         -sp, cp * sr, cp * cr;
    return Rotation::from_matrix(m);
}

Mat3 project_orthogonal(const Vec3& x) {
    if (!x.allFinite() || std::abs(x.norm() - 1.0) > 1e-9) {
        throw ContractViolation("project_orthogonal requires a unit vector");
    }
    return Mat3::Identity() - x * x.transpose();
}

Rotation orthonormalize(const Mat3& m) {
    if (!m.allFinite()) throw std::domain_error("orthonormalize: non-finite matrix");
    if (m.determinant() <= 0.0) throw std::domain_error("orthonormalize: det <= 0");
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec3 sv = svd.singularValues();
    if (sv(2) <= 1e-12 * sv(0)) throw std::domain_error("orthonormalize: rank-deficient matrix");
    return Rotation(svd.matrixU() * svd.matrixV().transpose(), Rotation::Unchecked{});
}

double rotation_angle(const Rotation& r) {
    // atan2 form of arccos((tr R - 1) / 2); keeps full precision near 0 and pi.
    const Mat3& m = r.matrix();
    const Vec3 axis(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    const double c = std::clamp((m.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::atan2(0.5 * axis.norm(), c);
}

bool is_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace velatt
