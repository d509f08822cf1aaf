#include "velatt/scenario.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace velatt {

using nlohmann::json;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Typed accessors that report the JSON path of whatever is wrong.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    bool has(const char* key) const { return j_.contains(key); }

    std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    Reader object(const char* key) const {
        const json& v = at(key);
        if (!v.is_object()) throw ConfigError(field(key), "expected an object");
        return Reader(v, field(key));
    }

    double number(const char* key) const {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(field(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(field(key), "must be finite");
        return d;
    }

    double number_or(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::string string(const char* key) const {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(field(key), "expected a string");
        return v.get<std::string>();
    }

    std::uint64_t count(const char* key) const {
        const json& v = at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            throw ConfigError(field(key), "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    Vec3 vec3(const char* key) const {
        const json& v = at(key);
        if (!v.is_array() || v.size() != 3) throw ConfigError(field(key), "expected an array of 3 numbers");
        Vec3 out;
        for (int i = 0; i < 3; ++i) {
            if (!v[i].is_number()) throw ConfigError(field(key), "expected an array of 3 numbers");
            out(i) = v[i].get<double>();
            if (!std::isfinite(out(i))) throw ConfigError(field(key), "entries must be finite");
        }
        return out;
    }

    Vec3 vec3_or(const char* key, const Vec3& fallback) const { return has(key) ? vec3(key) : fallback; }

    Mat3 mat3(const char* key) const {
        const json& v = at(key);
        if (!v.is_array() || v.size() != 3) throw ConfigError(field(key), "expected a 3x3 array");
        Mat3 out;
        for (int r = 0; r < 3; ++r) {
            if (!v[r].is_array() || v[r].size() != 3) throw ConfigError(field(key), "expected a 3x3 array");
            for (int c = 0; c < 3; ++c) {
                if (!v[r][c].is_number()) throw ConfigError(field(key), "expected a 3x3 array of numbers");
                out(r, c) = v[r][c].get<double>();
            }
        }
        return out;
    }

    const json& raw(const char* key) const { return at(key); }

private:
    const json& at(const char* key) const {
        if (!j_.contains(key)) throw ConfigError(field(key), "missing required field");
        return j_.at(key);
    }

    const json& j_;
    std::string path_;
};

json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json to_json(const Mat3& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return rows;
}

TrajectorySpec parse_trajectory(const Reader& r) {
    const std::string kind_name = r.has("kind") ? r.string("kind") : "circular";
    TrajectorySpec t;
    try {
        const TrajectoryKind kind = trajectory_kind_from_string(kind_name);
        if (kind == TrajectoryKind::kCircular) t = TrajectorySpec::circular();
        if (kind == TrajectoryKind::kHover) t = TrajectorySpec::hover();
        t.kind = kind;
    } catch (const ContractViolation& e) {
        throw ConfigError(r.field("kind"), e.what());
    }
    t.alpha = r.number_or("alpha", t.alpha);
    t.speed = r.number_or("speed", t.speed);
    t.attitude_amplitude = r.vec3_or("attitude_amplitude", t.attitude_amplitude);
    t.attitude_frequency = r.vec3_or("attitude_frequency", t.attitude_frequency);
    t.attitude_phase = r.vec3_or("attitude_phase", t.attitude_phase);
    t.yaw_rate = r.number_or("yaw_rate", t.yaw_rate);
    return t;
}

json trajectory_json(const TrajectorySpec& t) {
    return {{"kind", to_string(t.kind)},
            {"alpha", t.alpha},
            {"speed", t.speed},
            {"attitude_amplitude", to_json(t.attitude_amplitude)},
            {"attitude_frequency", to_json(t.attitude_frequency)},
            {"attitude_phase", to_json(t.attitude_phase)},
            {"yaw_rate", t.yaw_rate}};
}

SensorConfig parse_sensors(const Reader& r) {
    SensorConfig s;
    const auto std_dev = [&](const char* key) {
        const double v = r.number_or(key, 0.0);
        if (v < 0.0) throw ConfigError(r.field(key), "must be >= 0");
        return v;
    };
    s.gyro_noise_std = std_dev("gyro_noise_std");
    s.accel_noise_std = std_dev("accel_noise_std");
    s.mag_noise_std = std_dev("mag_noise_std");
    s.vel_noise_std = std_dev("vel_noise_std");
    s.mag_bias = r.vec3_or("mag_bias", Vec3::Zero());
    if (r.has("mag_bias_frame")) {
        try {
            s.mag_bias_frame = bias_frame_from_string(r.string("mag_bias_frame"));
        } catch (const ContractViolation& e) {
            throw ConfigError(r.field("mag_bias_frame"), e.what());
        }
    }
    if (r.has("seed")) s.seed = r.count("seed");
    return s;
}

json sensors_json(const SensorConfig& s) {
    return {{"gyro_noise_std", s.gyro_noise_std},
            {"accel_noise_std", s.accel_noise_std},
            {"mag_noise_std", s.mag_noise_std},
            {"vel_noise_std", s.vel_noise_std},
            {"mag_bias", to_json(s.mag_bias)},
            {"mag_bias_frame", to_string(s.mag_bias_frame)},
            {"seed", s.seed}};
}

constexpr const char* kAtBound = "at_bound";

GainsConfig parse_gains(const Reader& r) {
    GainsConfig g;
    g.k1v = r.number("k1v");
    g.k2v = r.number("k2v");
    g.k2r = r.number("k2r");
    g.g = r.number_or("g", kDefaultGravity);
    if (!r.has("k1r")) throw ConfigError(r.field("k1r"), "missing required field (number or \"at_bound\")");
    const json& k1r = r.raw("k1r");
    if (k1r.is_string() && k1r.get<std::string>() == kAtBound) {
        g.k1r.reset();
    } else {
        g.k1r = r.number("k1r");
    }
    const GainReport rep = validate_gains(g.k1v, g.k2v, g.k1r.value_or(1.0), g.k2r, g.g);
    if (!rep.k1v_positive) throw ConfigError(r.field("k1v"), "must be > 0");
    if (!rep.k2v_positive) throw ConfigError(r.field("k2v"), "must be > 0");
    if (!rep.k1r_positive) throw ConfigError(r.field("k1r"), "must be > 0");
    if (!rep.k2r_positive) throw ConfigError(r.field("k2r"), "must be > 0");
    if (!rep.g_positive) throw ConfigError(r.field("g"), "must be > 0");
    return g;
}

json gains_json(const GainsConfig& g) {
    json j = {{"k1v", g.k1v}, {"k2v", g.k2v}, {"k2r", g.k2r}, {"g", g.g}};
    if (g.k1r) {
        j["k1r"] = *g.k1r;
    } else {
        j["k1r"] = kAtBound;
    }
    return j;
}

InitialErrorSpec parse_initial_error(const Reader& r) {
    InitialErrorSpec e;
    e.velocity = r.vec3_or("velocity", Vec3::Zero());
    if (r.has("velocity_frame")) {
        const std::string f = r.string("velocity_frame");
        if (f != "body" && f != "inertial") {
            throw ConfigError(r.field("velocity_frame"), "expected \"body\" or \"inertial\"");
        }
        e.velocity_is_inertial = f == "inertial";
    }
    if (r.has("R_bar") && r.has("R_bar_euler_deg")) {
        throw ConfigError(r.field("R_bar"), "give either R_bar or R_bar_euler_deg, not both");
    }
    if (r.has("R_bar")) {
        e.attitude = r.mat3("R_bar");
        try {
            (void)e.R_bar();
        } catch (const ContractViolation& ex) {
            throw ConfigError(r.field("R_bar"), ex.what());
        }
    } else if (r.has("R_bar_euler_deg")) {
        e.attitude = InitialErrorSpec::EulerDeg{r.vec3("R_bar_euler_deg")};
    }
    return e;
}

json initial_error_json(const InitialErrorSpec& e) {
    json j = {{"velocity", to_json(e.velocity)}, {"velocity_frame", e.velocity_is_inertial ? "inertial" : "body"}};
    if (const auto* m = std::get_if<Mat3>(&e.attitude)) {
        j["R_bar"] = to_json(*m);
    } else {
        j["R_bar_euler_deg"] = to_json(std::get<InitialErrorSpec::EulerDeg>(e.attitude).rpy);
    }
    return j;
}

ScenarioConfig config_from_json(const json& root) {
    if (!root.is_object()) throw ConfigError("$", "config must be a JSON object");
    const Reader r(root, "");
    ScenarioConfig c;
    c.spec_version = r.string("spec_version");
    if (c.spec_version != kSpecVersion) {
        throw ConfigError("spec_version", "unsupported version '" + c.spec_version + "' (expected " +
                                              kSpecVersion + ")");
    }
    if (r.has("scenario_id")) c.scenario_id = r.string("scenario_id");
    if (c.scenario_id.empty() || c.scenario_id.find_first_of("/\\") != std::string::npos) {
        throw ConfigError("scenario_id", "must be a non-empty name without path separators");
    }
    if (r.has("trajectory")) c.trajectory = parse_trajectory(r.object("trajectory"));
    if (r.has("sensors")) c.sensors = parse_sensors(r.object("sensors"));
    c.gains = parse_gains(r.object("gains"));
    if (r.has("observers")) {
        const json& obs = r.raw("observers");
        if (!obs.is_array() || obs.empty()) throw ConfigError("observers", "expected a non-empty array");
        c.observers.clear();
        std::set<ObserverKind> seen;
        for (const json& o : obs) {
            if (!o.is_string()) throw ConfigError("observers", "entries must be strings");
            try {
                const ObserverKind k = observer_kind_from_string(o.get<std::string>());
                if (!seen.insert(k).second) throw ConfigError("observers", "duplicate entry " + to_string(k));
                c.observers.push_back(k);
            } catch (const ContractViolation& e) {
                throw ConfigError("observers", e.what());
            }
        }
    }
    c.duration = r.number("duration");
    if (c.duration < 0.0) throw ConfigError("duration", "must be >= 0");
    c.dt = r.number("dt");
    if (!(c.dt > 0.0)) throw ConfigError("dt", "must be > 0");
    if (r.has("initial_error")) c.initial_error = parse_initial_error(r.object("initial_error"));
    c.m_I = r.vec3_or("m_I", c.m_I);
    try {
        (void)MagneticReference(c.m_I);
    } catch (const ContractViolation& e) {
        throw ConfigError("m_I", e.what());
    }
    if (r.has("output")) {
        const Reader out = r.object("output");
        if (out.has("dir")) c.output_dir = out.string("dir");
        if (out.has("stride")) c.output_stride = out.count("stride");
        if (c.output_stride == 0) throw ConfigError("output.stride", "must be >= 1");
    }
    return c;
}

json config_to_json(const ScenarioConfig& c) {
    json obs = json::array();
    for (ObserverKind k : c.observers) obs.push_back(to_string(k));
    return {{"spec_version", c.spec_version},
            {"scenario_id", c.scenario_id},
            {"trajectory", trajectory_json(c.trajectory)},
            {"sensors", sensors_json(c.sensors)},
            {"gains", gains_json(c.gains)},
            {"observers", obs},
            {"duration", c.duration},
            {"dt", c.dt},
            {"initial_error", initial_error_json(c.initial_error)},
            {"m_I", to_json(c.m_I)},
            {"output", {{"dir", c.output_dir}, {"stride", c.output_stride}}}};
}

void put(std::ostream& out, double x) { out << format_double(x); }

}  // namespace

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(root);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("$", "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) { return config_to_json(cfg).dump(2) + "\n"; }

std::string header_json(const TraceHeader& h) {
    json j = {{"spec_version", h.spec_version},
              {"generator_id", h.generator_id},
              {"build_tag", h.build_tag},
              {"rows", row_count(h.config.duration, h.config.dt)},
              {"config", config_to_json(h.config)}};
    return j.dump(2) + "\n";
}

TraceHeader parse_header_json(const std::string& text) {
    const json j = json::parse(text);
    TraceHeader h;
    h.spec_version = j.at("spec_version").get<std::string>();
    h.generator_id = j.at("generator_id").get<std::string>();
    h.build_tag = j.at("build_tag").get<std::string>();
    h.config = config_from_json(j.at("config"));
    return h;
}

void write_truth_csv(const TraceSet& trace, std::ostream& out) {
    out << "t,v1,v2,v3,roll_deg,pitch_deg,yaw_deg\n";
    for (const TruthSample& s : trace.truth) {
        put(out, s.t);
        for (int i = 0; i < 3; ++i) {
            out << ',';
            put(out, s.v(i));
        }
        for (double a : {s.euler.roll, s.euler.pitch, s.euler.yaw}) {
            out << ',';
            put(out, a * kRadToDeg);
        }
        out << '\n';
    }
}

void write_observer_csv(const TraceSet& trace, const ObserverTrace& obs, std::ostream& out) {
    out << "t,v_hat1,v_hat2,v_hat3,roll_hat_deg,pitch_hat_deg,yaw_hat_deg,v_err_norm,"
           "attitude_error_deg,L0,L1,S0,equilibrium\n";
    for (std::size_t i = 0; i < obs.samples.size(); ++i) {
        const ObserverSample& s = obs.samples[i];
        put(out, trace.truth[i].t);
        for (int k = 0; k < 3; ++k) {
            out << ',';
            put(out, s.v_hat(k));
        }
        out << ',';
        put(out, s.euler.roll * kRadToDeg);
        out << ',';
        put(out, s.euler.pitch * kRadToDeg);
        out << ',';
        // Gamma observers carry no heading: empty field.
        if (!std::isnan(s.euler.yaw)) put(out, s.euler.yaw * kRadToDeg);
        for (double x : {s.v_err_norm, s.attitude_error * kRadToDeg, s.L0, s.L1, s.S0}) {
            out << ',';
            put(out, x);
        }
        out << ',' << s.equilibrium << '\n';
    }
}

std::vector<std::filesystem::path> write_trace_files(const TraceSet& trace, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    const std::string id = trace.header.config.scenario_id;
    std::vector<std::filesystem::path> written;
    const auto open = [&](const std::string& name) {
        written.push_back(dir / name);
        std::ofstream f(written.back(), std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + written.back().string());
        return f;
    };
    {
        auto f = open(id + "_truth.csv");
        write_truth_csv(trace, f);
    }
    for (const ObserverTrace& o : trace.observers) {
        auto f = open(id + "_" + to_string(o.kind) + ".csv");
        write_observer_csv(trace, o, f);
    }
    {
        auto f = open(id + "_header.json");
        f << header_json(trace.header);
    }
    return written;
}

}  // namespace velatt
