#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ckdv/coeffs.hpp"
#include "ckdv/dynamics.hpp"
#include "ckdv/experiments.hpp"
#include "ckdv/profiles.hpp"

namespace ckdv {

enum class Experiment { Simulate, Classify, Radius, AclScan, CommutatorScan, Picard, InequalityScan };

std::string_view to_string(Experiment e);
/// Accepts the CLI spelling (acl-scan, inequality-scan, ...).
Experiment parse_experiment(std::string_view name);

struct SystemSpec {
    /// majda-biello (uses a2), hirota-satsuma (uses a1, c12) or explicit (all six).
    std::string preset = "majda-biello";
    std::optional<double> a1, a2, c11, c12, c21, c22;
};

struct InitialSpec {
    /// A built-in profile name, or "file".
    std::string profile = "sech2";
    ProfileParams params;
    std::filesystem::path u_file, v_file;
};

struct SimulateSpec {
    double t_final = 1.0;
    std::size_t stride = 100;
    std::vector<double> gevrey_sigmas{0.0, 0.05, 0.1};
    bool estimate_radius = true;
};

struct RadiusSpec {
    double t_final = 50.0;
    RadiusDecayOptions options;
};

struct AclSpec {
    std::vector<double> sigmas;
};

struct CommutatorSpec {
    std::vector<double> sigmas;
};

struct PicardSpec {
    /// Empty: lifespan δ times 1, 2, 4, 8, 16, capped at 1.
    std::vector<double> deltas;
    PicardOptions options;
};

struct InequalitySpec {
    double xi_min = -50.0;
    double xi_max = 50.0;
    double xi_step = 0.5;
    std::vector<double> sigmas;
    std::vector<double> rhos;
};

struct RunConfig {
    Experiment experiment = Experiment::Simulate;
    std::filesystem::path output_dir = "runs";
    std::uint64_t seed = 0;
    int threads = 1;
    bool enforce_admissibility = false;

    SystemSpec system;
    std::size_t n_points = 1024;
    double length = 0.0;  // 0 until resolved; default 64π
    InitialSpec initial;
    StepperConfig stepper;
    /// True when stepper.dt was left to the lifespan rule.
    bool dt_auto = true;
    AnalysisParams analysis;
    LifespanParams life;

    SimulateSpec simulate;
    RadiusSpec radius;
    AclSpec acl;
    CommutatorSpec commutator;
    PicardSpec picard;
    InequalitySpec inequality;

    /// Where relative file paths were resolved from.
    std::filesystem::path base_dir;
};

using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines (optionally under `[section]` headers), applies
/// the overrides, fills defaults and validates. Throws ConfigError with the
/// offending line and key.
RunConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {},
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Every key with its resolved value, one per line, loadable by parse_config.
/// The canonical form leaves out output_dir and threads, which do not affect results.
std::string resolved_config_text(const RunConfig& cfg, bool canonical = false);

/// Hex FNV-1a 64 of the canonical resolved text.
std::string config_hash(const RunConfig& cfg);

SystemCoefficients build_coefficients(const SystemSpec& spec);
GridPtr build_grid(const RunConfig& cfg);
SpectralState build_initial_state(const RunConfig& cfg, const GridPtr& grid);

/// Comma-separated list of reals; each entry may carry a `pi` factor.
std::vector<double> parse_real_list(std::string_view text);
/// A real number; `64pi`, `64*pi` and `pi` are accepted.
double parse_real(std::string_view text);
/// Shortest round-trip decimal form.
std::string format_real(double x);

}  // namespace ckdv
