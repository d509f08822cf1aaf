#pragma once

// Scenario configuration, the simulation runner and trace serialisation.

#include "velatt/analysis.hpp"
#include "velatt/observers.hpp"
#include "velatt/simworld.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace velatt {

inline constexpr const char* kSpecVersion = "1.0";

/// Invalid or incomplete scenario configuration; `field` is the JSON path of
/// the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// A run produced a non-finite value.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(double t, std::uint64_t step, const std::string& what)
        : std::runtime_error(what), t_(t), step_(step) {}
    double t() const { return t_; }
    std::uint64_t step() const { return step_; }

private:
    double t_;
    std::uint64_t step_;
};

enum class ObserverKind { kFull1, kFull2, kGamma1, kGamma2 };

std::string to_string(ObserverKind k);
ObserverKind observer_kind_from_string(const std::string& s);
Variant variant_of(ObserverKind k);
bool is_full(ObserverKind k);

/// Gains as written in a config; k1r absent means "exactly on the gain bound".
struct GainsConfig {
    double k1v = 1.2;
    double k2v = 1.2;
    std::optional<double> k1r;
    double k2r = 2.764;
    double g = kDefaultGravity;

    ObserverGains resolve() const;
    friend bool operator==(const GainsConfig&, const GainsConfig&) = default;
};

struct InitialErrorSpec {
    /// v - v_hat in the body frame, or v_bar = R (v - v_hat) when
    /// `velocity_is_inertial` is set.
    Vec3 velocity = Vec3::Zero();
    bool velocity_is_inertial = false;
    /// R_bar = R R_hat^T given either as a matrix or as ZYX Euler angles (deg).
    struct EulerDeg {
        Vec3 rpy = Vec3::Zero();
        friend bool operator==(const EulerDeg&, const EulerDeg&) = default;
    };
    std::variant<Mat3, EulerDeg> attitude = Mat3::Identity();

    Rotation R_bar() const;
    friend bool operator==(const InitialErrorSpec& a, const InitialErrorSpec& b);
};

struct ScenarioConfig {
    std::string spec_version = kSpecVersion;
    std::string scenario_id = "scenario";
    TrajectorySpec trajectory = TrajectorySpec::circular();
    SensorConfig sensors;
    GainsConfig gains;
    std::vector<ObserverKind> observers{ObserverKind::kFull1, ObserverKind::kFull2};
    double duration = 60.0;
    double dt = 1e-3;
    InitialErrorSpec initial_error;
    Vec3 m_I = Vec3(0.434, -0.0091, 0.9008);
    std::string output_dir = ".";
    std::uint64_t output_stride = 1;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

    /// Parameters of the first reference simulation: k1v = k2v = 1.2, k1r on
    /// the bound, k2r = 2.764, v~(0) = [-5, 5, -5], R_bar(0) = diag(-1, 1, -1),
    /// perfect sensors, 60 s at dt = 1e-3, all four observers.
    static ScenarioConfig reference_sim1();
    /// reference_sim1 plus a constant magnetometer bias [0.1, -0.05, 0.08].
    static ScenarioConfig reference_sim2();
};

/// Throws ConfigError naming the offending field.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ScenarioConfig& cfg);

std::uint64_t row_count(double duration, double dt);

struct TruthSample {
    double t = 0.0;
    Vec3 v = Vec3::Zero();
    Rotation R;
    EulerAngles euler;
};

struct ObserverSample {
    Vec3 v_hat = Vec3::Zero();
    Rotation R_hat;                // identity for gamma observers
    Vec3 gamma_hat = kE3;
    EulerAngles euler;             // yaw is NaN for gamma observers
    double v_err_norm = 0.0;       // |v - v_hat|
    double attitude_error = 0.0;   // geodesic angle of R_bar; tilt angle for gamma observers
    Vec3 v_bar = Vec3::Zero();
    Vec3 gamma_bar = kE3;
    double L0 = 0.0, L1 = 0.0, S0 = 0.0;
    int equilibrium = 0;
};

struct ObserverTrace {
    ObserverKind kind;
    std::vector<ObserverSample> samples;
};

struct TraceHeader {
    std::string spec_version = kSpecVersion;
    std::string generator_id = kNoiseGeneratorId;
    std::string build_tag;
    ScenarioConfig config;
};

struct TraceSet {
    TraceHeader header;
    std::vector<TruthSample> truth;
    std::vector<ObserverTrace> observers;

    const ObserverTrace& observer(ObserverKind k) const;
};

/// Build identifier compiled into the library.
std::string build_tag();

/// Runs every configured observer against the same synthetic measurements.
/// Each step feeds the RK stages samples at t, t + dt/2 and t + dt.
/// Throws NumericalFailure on the first non-finite estimate.
TraceSet run_scenario(const ScenarioConfig& cfg);

void write_truth_csv(const TraceSet& trace, std::ostream& out);
void write_observer_csv(const TraceSet& trace, const ObserverTrace& obs, std::ostream& out);
std::string header_json(const TraceHeader& header);
TraceHeader parse_header_json(const std::string& text);

/// Writes <id>_truth.csv, <id>_<observer>.csv and <id>_header.json into `dir`.
/// Returns the written paths.
std::vector<std::filesystem::path> write_trace_files(const TraceSet& trace, const std::filesystem::path& dir);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double x);

}  // namespace velatt
