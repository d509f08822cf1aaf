#pragma once

// Rotation-matrix algebra used throughout the observers and the simulator.
//
// Conventions: a Rotation maps body-frame coordinates to inertial (NED)
// coordinates, so the gravity direction seen from the body is R^T e3.
// Euler angles follow the ZYX (yaw-pitch-roll) aerospace sequence,
// R = Rz(yaw) * Ry(pitch) * Rx(roll).

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include <stdexcept>

namespace velatt {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline const Vec3 kE1 = Vec3::UnitX();
inline const Vec3 kE2 = Vec3::UnitY();
inline const Vec3 kE3 = Vec3::UnitZ();

/// Raised when a precondition of an exported operation is violated.
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Element of SO(3). The wrapped matrix always satisfies
/// |R^T R - I|_F <= kTolerance and |det R - 1| <= kTolerance.
class Rotation {
public:
    static constexpr double kTolerance = 1e-9;

    Rotation() : m_(Mat3::Identity()) {}

    static Rotation identity() { return Rotation(); }

    /// Validates `m` against the SO(3) tolerances; throws ContractViolation
    /// otherwise. Use orthonormalize() to repair a drifted matrix.
    static Rotation from_matrix(const Mat3& m);

    const Mat3& matrix() const { return m_; }
    Rotation transpose() const { return Rotation(m_.transpose(), Unchecked{}); }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }
    Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Unchecked{}); }

    double operator()(int r, int c) const { return m_(r, c); }

    /// Frobenius norm of R^T R - I.
    double defect() const;

private:
    struct Unchecked {};
    Rotation(const Mat3& m, Unchecked) : m_(m) {}

    friend Rotation exp_rotation(const Vec3& u);
    friend Rotation orthonormalize(const Mat3& m);

    Mat3 m_;
};

struct EulerAngles {
    double roll = 0.0;   // (-pi, pi]
    double pitch = 0.0;  // [-pi/2, pi/2]
    double yaw = 0.0;    // (-pi, pi]
    bool gimbal_lock = false;
};

/// skew(u) * w == u.cross(w)
Mat3 skew(const Vec3& u);

/// Rodrigues exponential of a rotation vector (radians).
Rotation exp_rotation(const Vec3& u);

/// R^T e3: the gravity direction expressed in the body frame.
Vec3 gravity_direction(const Rotation& r);

/// ZYX decomposition. When |cos(pitch)| < 1e-9 the roll is pinned to 0 and
/// `gimbal_lock` is set; the yaw then absorbs the remaining rotation.
EulerAngles euler_from_rotation(const Rotation& r);
Rotation rotation_from_euler(double roll, double pitch, double yaw);
inline Rotation rotation_from_euler(const EulerAngles& e) {
    return rotation_from_euler(e.roll, e.pitch, e.yaw);
}

/// I - x x^T for a unit vector x. Throws ContractViolation if |x| deviates
/// from 1 by more than 1e-9.
Mat3 project_orthogonal(const Vec3& x);

/// Polar factor of `m` (nearest rotation in the Frobenius norm).
/// Throws std::domain_error if det(m) <= 0 or m is rank-deficient.
Rotation orthonormalize(const Mat3& m);

/// Geodesic distance to the identity, arccos((tr R - 1) / 2) in [0, pi].
double rotation_angle(const Rotation& r);

/// Geodesic distance between two rotations.
inline double rotation_distance(const Rotation& a, const Rotation& b) {
    return rotation_angle(a.transpose() * b);
}

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

bool is_finite(const Vec3& v);

}  // namespace velatt
