#pragma once

#include "thermistor/diagnostics.hpp"
#include "thermistor/optimal_control.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace thermistor::cli {

enum class Driver { Sweep, ProjectedGradient, SimulateOnly, ConstantBeta };

const char* to_string(Driver driver);

/// Everything one command needs. Produced by parse_config from a flat
/// `key = value` file; `#` starts a comment.
struct RunConfig {
    ModelParams params;
    SchemeMode mode = SchemeMode::ConsistentGalerkin;
    Driver driver = Driver::Sweep;
    double tol = 1e-6;
    int max_iter = 500;
    double relaxation = 0.5;
    double step = 0.5;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    std::optional<double> beta;  // control for simulate/verify, start value for optimize
    ConstantSlice constant_slice = ConstantSlice::FinalLevel;
};

/// Parses and validates; throws ConfigError listing every problem, one per line.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

SchemeMode parse_mode(std::string_view text);

/// Control used by simulate: `beta` if given, else the box minimum.
BoundaryControl simulation_control(const RunConfig& config);

/// Control used by verify: `beta` if given, else the box midpoint.
BoundaryControl verification_control(const RunConfig& config);

/// Starting control of the configured driver: `beta` if given, else m for the
/// sweep and constant drivers and M for projected gradient.
BoundaryControl starting_control(const RunConfig& config);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitSolverFailure = 3;

int cmd_simulate(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_optimize(const RunConfig& config, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_verify(const RunConfig& config,
               const std::filesystem::path& out_dir,
               std::ostream& log,
               const AssemblyHooks& hooks = {});

/// Full command-line entry point.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace thermistor::cli
