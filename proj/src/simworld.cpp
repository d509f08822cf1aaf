#include "velatt/simworld.hpp"

#include <cmath>
#include <numbers>

namespace velatt {

namespace {

// d/dt exp(theta) = exp(theta) skew(Jr(theta) theta_dot)
Mat3 right_jacobian(const Vec3& theta) {
    const double phi = theta.norm();
    const Mat3 k = skew(theta);
    double a, b;
    if (phi < 1e-4) {
        const double p2 = phi * phi;
        a = 0.5 - p2 / 24.0;
        b = 1.0 / 6.0 - p2 / 120.0;
    } else {
        a = (1.0 - std::cos(phi)) / (phi * phi);
        b = (phi - std::sin(phi)) / (phi * phi * phi);
    }
    return Mat3::Identity() - a * k + b * k * k;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

GaussianStream channel_stream(std::uint64_t seed, std::uint64_t channel) {
    return GaussianStream(splitmix64(seed ^ splitmix64(channel + 1)));
}

}  // namespace

std::string to_string(TrajectoryKind k) {
    switch (k) {
        case TrajectoryKind::kCircular: return "circular";
        case TrajectoryKind::kHover: return "hover";
        case TrajectoryKind::kCustom: return "custom";
    }
    return "circular";
}

TrajectoryKind trajectory_kind_from_string(const std::string& s) {
    if (s == "circular") return TrajectoryKind::kCircular;
    if (s == "hover") return TrajectoryKind::kHover;
    if (s == "custom") return TrajectoryKind::kCustom;
    throw ContractViolation("unknown trajectory kind '" + s + "'");
}

std::string to_string(BiasFrame f) { return f == BiasFrame::kBody ? "body" : "inertial"; }

BiasFrame bias_frame_from_string(const std::string& s) {
    if (s == "body") return BiasFrame::kBody;
    if (s == "inertial") return BiasFrame::kInertial;
    throw ContractViolation("unknown magnetometer bias frame '" + s + "'");
}

TrajectorySpec TrajectorySpec::circular() {
    TrajectorySpec s;
    s.kind = TrajectoryKind::kCircular;
    s.alpha = 2.0 / std::sqrt(15.0);
    s.speed = 15.0 * s.alpha;
    s.attitude_amplitude = Vec3(0.3, 0.25, 0.0);
    s.attitude_frequency = Vec3(0.5, 0.7, 0.0);
    s.attitude_phase = Vec3(0.0, 1.0, 0.0);
    s.yaw_rate = s.alpha;
    return s;
}

TrajectorySpec TrajectorySpec::hover() {
    TrajectorySpec s;
    s.kind = TrajectoryKind::kHover;
    return s;
}

TrajectorySpec TrajectorySpec::hover_spin() {
    TrajectorySpec s;
    s.kind = TrajectoryKind::kHover;
    s.attitude_amplitude = Vec3(0.4, 0.3, 0.2);
    s.attitude_frequency = Vec3(0.9, 0.6, 0.4);
    s.attitude_phase = Vec3(0.5, 0.0, 1.0);
    s.yaw_rate = 0.3;
    return s;
}

TruthState truth_at(const TrajectorySpec& spec, double t) {
    if (!(t >= 0.0)) throw ContractViolation("truth_at requires t >= 0");
    TruthState s;
    s.t = t;

    if (spec.kind != TrajectoryKind::kHover && spec.speed != 0.0) {
        const double a = spec.alpha;
        if (a != 0.0) {
            const double c = std::cos(a * t), sn = std::sin(a * t);
            s.x = (spec.speed / a) * Vec3(c, sn, 0.0);
            s.x_dot = spec.speed * Vec3(-sn, c, 0.0);
            s.x_ddot = spec.speed * a * Vec3(-c, -sn, 0.0);
        } else {
            s.x = spec.speed * t * kE2;
            s.x_dot = spec.speed * kE2;
        }
    }

    Vec3 theta, theta_dot;
    for (int i = 0; i < 3; ++i) {
        const double arg = spec.attitude_frequency(i) * t + spec.attitude_phase(i);
        theta(i) = spec.attitude_amplitude(i) * std::sin(arg);
        theta_dot(i) = spec.attitude_amplitude(i) * spec.attitude_frequency(i) * std::cos(arg);
    }
    theta.z() += spec.yaw_rate * t;
    theta_dot.z() += spec.yaw_rate;

    s.R = exp_rotation(theta);
    s.omega = right_jacobian(theta) * theta_dot;
    s.v = s.R.transpose() * s.x_dot;
    return s;
}

double GaussianStream::uniform() {
    // 53 random bits mapped to (0, 1].
    return 1.0 - static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

SensorModel::SensorModel(const SensorConfig& cfg, const MagneticReference& m_I, double g)
    : cfg_(cfg),
      m_I_(m_I.vector()),
      g_(g),
      streams_{channel_stream(cfg.seed, 0), channel_stream(cfg.seed, 1), channel_stream(cfg.seed, 2),
               channel_stream(cfg.seed, 3)} {
    for (double sd : {cfg.gyro_noise_std, cfg.accel_noise_std, cfg.mag_noise_std, cfg.vel_noise_std}) {
        if (!(sd >= 0.0) || !std::isfinite(sd)) throw ContractViolation("noise std devs must be >= 0");
    }
    if (!cfg.mag_bias.allFinite()) throw ContractViolation("magnetometer bias must be finite");
}

Vec3 SensorModel::draw(GaussianStream& s, double std_dev) {
    if (std_dev == 0.0) return Vec3::Zero();
    const double x = s.next(), y = s.next(), z = s.next();
    return std_dev * Vec3(x, y, z);
}

MeasurementFrame measure_ideal(const TruthState& truth, const MagneticReference& m_I, double g) {
    MeasurementFrame m;
    m.t = truth.t;
    m.omega = truth.omega;
    m.a_B = truth.R.transpose() * (truth.x_ddot - g * kE3);
    m.m_B = truth.R.transpose() * m_I.vector();
    m.v_meas = truth.v;
    return m;
}

MeasurementFrame SensorModel::measure(const TruthState& truth) {
    MeasurementFrame m;
    m.t = truth.t;
    const Rotation Rt = truth.R.transpose();
    m.omega = truth.omega + draw(streams_[0], cfg_.gyro_noise_std);
    m.a_B = Rt * (truth.x_ddot - g_ * kE3) + draw(streams_[1], cfg_.accel_noise_std);
    if (cfg_.mag_bias_frame == BiasFrame::kBody) {
        m.m_B = Rt * m_I_ + cfg_.mag_bias;
    } else {
        m.m_B = Rt * (m_I_ + cfg_.mag_bias);
    }
    m.m_B += draw(streams_[2], cfg_.mag_noise_std);
    m.v_meas = truth.v + draw(streams_[3], cfg_.vel_noise_std);
    return m;
}

}  // namespace velatt
