// velatt: run observer scenarios, verify error-system properties, print poles.

#include "velatt/analysis.hpp"
#include "velatt/scenario.hpp"
#include "velatt/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <unistd.h>

namespace {

enum ExitCode { kOk = 0, kVerifyFailed = 1, kInvalidConfig = 2, kNumericalFailure = 3 };

bool use_color() {
    const char* no_color = std::getenv("NO_COLOR");
    if (no_color && *no_color) return false;
    return ::isatty(STDOUT_FILENO) != 0;
}

std::string paint(const std::string& s, const char* code) {
    if (!use_color()) return s;
    return std::string("\033[") + code + "m" + s + "\033[0m";
}

std::string verdict(bool ok) { return ok ? paint("PASS", "32") : paint("FAIL", "31"); }

std::vector<double> parse_list(const std::string& text, std::size_t n, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw velatt::ConfigError(what, "'" + item + "' is not a number");
        out.push_back(x);
    }
    if (out.size() != n) {
        throw velatt::ConfigError(what, "expected " + std::to_string(n) + " comma-separated values");
    }
    return out;
}

std::string complex_str(std::complex<double> z) {
    std::string s = velatt::format_double(z.real());
    if (z.imag() != 0.0) s += (z.imag() > 0 ? " + " : " - ") + velatt::format_double(std::abs(z.imag())) + "i";
    return s;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    velatt::ScenarioConfig cfg;
    try {
        cfg = velatt::load_config(config_path);
    } catch (const velatt::ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;

    velatt::TraceSet trace;
    try {
        trace = velatt::run_scenario(cfg);
    } catch (const velatt::NumericalFailure& e) {
        std::cerr << "numerical failure at step " << e.step() << " (t = " << velatt::format_double(e.t())
                  << " s): " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const velatt::ContractViolation& e) {
        std::cerr << "invalid config: " << e.what() << "\n";
        return kInvalidConfig;
    }

    const auto paths = velatt::write_trace_files(trace, cfg.output_dir);
    const auto& last = trace.truth.back();
    std::cout << "scenario " << cfg.scenario_id << ": " << trace.truth.size() << " rows, t_end = "
              << velatt::format_double(last.t) << " s\n";
    for (const auto& o : trace.observers) {
        const auto& s = o.samples.back();
        std::printf("  %-7s |v~| = %-12.4g attitude error = %.4g deg  equilibrium %d\n",
                    velatt::to_string(o.kind).c_str(), s.v_err_norm, s.attitude_error * 180.0 / std::numbers::pi,
                    s.equilibrium);
    }
    for (const auto& p : paths) std::cout << "  wrote " << p.string() << "\n";
    return kOk;
}

int cmd_verify(const std::string& suite, const velatt::VerifyOptions& opts, const std::string& report_path,
               bool json) {
    velatt::VerifyReport rep;
    try {
        rep = velatt::run_suite(suite, opts);
    } catch (const velatt::ContractViolation& e) {
        std::cerr << e.what() << "\n";
        return kInvalidConfig;
    } catch (const velatt::NumericalFailure& e) {
        std::cerr << "numerical failure at t = " << velatt::format_double(e.t()) << ": " << e.what() << "\n";
        return kNumericalFailure;
    }
    if (json) {
        std::cout << rep.to_json() << "\n";
    } else {
        for (const auto& p : rep.properties) {
            std::cout << verdict(p.passed) << "  " << p.name;
            const char* sep = "  (";
            for (const auto& [k, v] : p.metrics) {
                std::cout << sep << k << "=" << velatt::format_double(v);
                sep = ", ";
            }
            std::cout << (p.metrics.empty() ? "" : ")") << "\n";
        }
        std::cout << "suite " << rep.suite << ": " << verdict(rep.passed()) << "\n";
    }
    if (!report_path.empty()) {
        std::ofstream out(report_path);
        out << rep.to_json() << "\n";
        if (!out) {
            std::cerr << "cannot write report " << report_path << "\n";
            return kInvalidConfig;
        }
    }
    return rep.passed() ? kOk : kVerifyFailed;
}

int cmd_poles(const std::string& gains_text, const std::string& mi_text, double g) {
    try {
        std::vector<double> k{1.2, 1.2, 1.2 * 1.2 / g, 2.764};
        if (!gains_text.empty()) k = parse_list(gains_text, 4, "--gains");
        const auto rep = velatt::validate_gains(k[0], k[1], k[2], k[3], g);
        if (!rep.valid) {
            std::cerr << "--gains: all gains must be positive\n";
            return kInvalidConfig;
        }
        velatt::Vec3 mi = velatt::MagneticReference::reference().vector();
        if (!mi_text.empty()) {
            const auto v = parse_list(mi_text, 3, "--mi");
            mi = velatt::Vec3(v[0], v[1], v[2]);
        }
        const velatt::ObserverGains gains(k[0], k[1], k[2], k[3], g);
        const velatt::MagneticReference m_I(mi);
        const velatt::PoleReport p = velatt::linearized_poles(gains, m_I);

        std::cout << "gains      k1v=" << velatt::format_double(k[0]) << " k2v=" << velatt::format_double(k[1])
                  << " k1r=" << velatt::format_double(k[2]) << " k2r=" << velatt::format_double(k[3])
                  << " g=" << velatt::format_double(g) << "\n";
        std::cout << "P(lambda)  lambda^2 + " << velatt::format_double(k[0] + k[1]) << " lambda + "
                  << velatt::format_double(g * k[2]) << "\n";
        std::cout << "roots      " << complex_str(p.tilt_poles[0]) << ", " << complex_str(p.tilt_poles[1])
                  << (p.double_root ? "  (double)" : "") << "\n";
        std::cout << "discrim.   " << velatt::format_double(p.discriminant) << "  sign "
                  << (p.discriminant_sign > 0 ? "+" : p.discriminant_sign < 0 ? "-" : "0") << "\n";
        std::cout << "vertical   " << velatt::format_double(p.decoupled_pole) << "\n";
        std::cout << "yaw        -k2r|pi m_I|^2 = " << velatt::format_double(p.yaw_pole_desired)
                  << "   -k2r|pi m_I| = " << velatt::format_double(-p.yaw_gain_unsquared) << "\n";
        std::cout << "gain bound k1r <= k1v k2v / g: "
                  << (p.satisfies_gain_bound ? paint("satisfied", "32") : paint("violated", "33")) << " (margin "
                  << velatt::format_double(rep.bound_margin) << ")\n";
    } catch (const velatt::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kInvalidConfig;
    } catch (const velatt::ContractViolation& e) {
        std::cerr << e.what() << "\n";
        return kInvalidConfig;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Velocity-aided attitude observers: simulation and verification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", velatt::build_tag());

    std::string config_path, out_dir;
    auto* run = app.add_subcommand("run", "Run a scenario and write CSV traces");
    run->add_option("config", config_path, "Scenario JSON file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output.dir)");

    std::string suite, report_path;
    bool json = false;
    velatt::VerifyOptions opts;
    auto* verify = app.add_subcommand("verify", "Run a property suite");
    verify->add_option("suite", suite, "lyapunov, autonomy, decoupling, equilibria, poles or all")->required();
    verify->add_option("--samples", opts.samples, "Random initial errors per sweep")->capture_default_str();
    verify->add_option("--seed", opts.seed, "Sampler seed")->capture_default_str();
    verify->add_option("--dt", opts.dt, "Integration step (s)")->capture_default_str();
    verify->add_option("--report", report_path, "Write the JSON report to this file");
    verify->add_flag("--json", json, "Print the JSON report instead of the table");

    std::string gains_text, mi_text;
    double g = velatt::kDefaultGravity;
    auto* poles = app.add_subcommand("poles", "Print the linearised poles");
    poles->add_option("--gains", gains_text, "k1v,k2v,k1r,k2r");
    poles->add_option("--mi", mi_text, "Magnetic reference x,y,z");
    poles->add_option("--g", g, "Gravity (m/s^2)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidConfig;
    }

    if (*run) return cmd_run(config_path, out_dir);
    if (*verify) return cmd_verify(suite, opts, report_path, json);
    return cmd_poles(gains_text, mi_text, g);
}
