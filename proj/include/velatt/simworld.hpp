#pragma once

// Analytic truth trajectories and synthetic sensors.
//
// Translation follows a horizontal circle flown at constant speed (or hover);
// attitude is R(t) = exp(theta(t)) with
//   theta(t) = [a1 sin(f1 t + p1), a2 sin(f2 t + p2), a3 sin(f3 t + p3) + yaw_rate t].
// Everything is closed form, so measurements can be synthesised at any time.

#include "velatt/observers.hpp"
#include "velatt/so3.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>

namespace velatt {

struct TruthState {
    double t = 0.0;
    Vec3 x = Vec3::Zero();      // inertial position, m
    Vec3 x_dot = Vec3::Zero();  // inertial velocity, m/s
    Vec3 x_ddot = Vec3::Zero(); // inertial acceleration, m/s^2
    Vec3 v = Vec3::Zero();      // body velocity R^T x_dot
    Rotation R;
    Vec3 omega = Vec3::Zero();  // body angular rate
};

enum class TrajectoryKind { kCircular, kHover, kCustom };

std::string to_string(TrajectoryKind k);
TrajectoryKind trajectory_kind_from_string(const std::string& s);

struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::kCircular;
    double alpha = 0.0;            // angular rate of the circle, rad/s
    double speed = 0.0;            // |x_dot| on the circle, m/s
    Vec3 attitude_amplitude = Vec3::Zero();  // rad
    Vec3 attitude_frequency = Vec3::Zero();  // rad/s
    Vec3 attitude_phase = Vec3::Zero();      // rad
    double yaw_rate = 0.0;         // secular growth of theta_z, rad/s

    /// Circle of radius 15 m with alpha = 2/sqrt(15) (|x_ddot| = 4 m/s^2)
    /// and the attitude profile [0.3 sin(0.5t), 0.25 sin(0.7t + 1), alpha t].
    static TrajectorySpec circular();
    /// x_dot = 0 and R = I for all t.
    static TrajectorySpec hover();
    /// Stationary position with a persistent rotation profile.
    static TrajectorySpec hover_spin();

    friend bool operator==(const TrajectorySpec&, const TrajectorySpec&) = default;
};

/// Closed-form truth at time t >= 0. Throws ContractViolation for t < 0.
TruthState truth_at(const TrajectorySpec& spec, double t);

enum class BiasFrame { kBody, kInertial };

std::string to_string(BiasFrame f);
BiasFrame bias_frame_from_string(const std::string& s);

struct SensorConfig {
    double gyro_noise_std = 0.0;
    double accel_noise_std = 0.0;
    double mag_noise_std = 0.0;
    double vel_noise_std = 0.0;
    Vec3 mag_bias = Vec3::Zero();
    /// kBody: m_B = R^T m_I + bias. kInertial: m_B = R^T (m_I + bias).
    BiasFrame mag_bias_frame = BiasFrame::kBody;
    std::uint64_t seed = 0;

    friend bool operator==(const SensorConfig&, const SensorConfig&) = default;
};

/// Identifier of the noise generator recorded in trace headers.
inline constexpr const char* kNoiseGeneratorId = "mt19937_64/box-muller/v1";

/// Gaussian sample stream with a fixed algorithm: std::mt19937_64 (bit-exact
/// by the standard) feeding a Box-Muller transform, so traces reproduce across
/// standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
    double next();

private:
    double uniform();
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Seeded sensor suite. Each channel owns an independent stream, so changing
/// one channel's configuration never perturbs another channel's noise.
class SensorModel {
public:
    SensorModel(const SensorConfig& cfg, const MagneticReference& m_I, double g = kDefaultGravity);

    MeasurementFrame measure(const TruthState& truth);

    const SensorConfig& config() const { return cfg_; }

private:
    Vec3 draw(GaussianStream& s, double std_dev);

    SensorConfig cfg_;
    Vec3 m_I_;
    double g_;
    std::array<GaussianStream, 4> streams_;
};

/// Noise-free measurement of `truth`: a_B = R^T (x_ddot - g e3), m_B = R^T m_I.
MeasurementFrame measure_ideal(const TruthState& truth, const MagneticReference& m_I,
                               double g = kDefaultGravity);

}  // namespace velatt
