#pragma once

#include "ellipsoid_lab/construct.hpp"
#include "ellipsoid_lab/experiment.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ellipsoid_lab::cli {

/// Exit codes. Every command returns one of these.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< fit ran but did not succeed
inline constexpr int kExitUsage = 2;    ///< bad flags, bad config, unreadable/unwritable files

struct FitArgs {
    std::size_t d = 0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    FitMethod method = FitMethod::identity_perturbation;
    LeastNormObjective objective = LeastNormObjective::frobenius;
    OutputFormat format = OutputFormat::csv;
};

struct DiagnoseArgs {
    std::size_t d = 0;
    std::size_t m = 0;
    std::size_t seeds = 10;
    std::size_t n_u = 100;
    std::uint64_t master_seed = 0;
    OutputFormat format = OutputFormat::csv;
};

struct MomentsArgs {
    std::size_t d = 0;
    std::size_t m = 0;
    int t = 2;
    std::size_t trials = 200;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
};

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
int cmd_phase(const ExperimentConfig& cfg, int verbosity, std::ostream& out, std::ostream& err);
int cmd_diagnose(const DiagnoseArgs& args, std::ostream& out, std::ostream& err);
int cmd_moments(const MomentsArgs& args, std::ostream& out, std::ostream& err);
int cmd_plot(const std::string& summary_path, const std::string& image_path, std::ostream& out, std::ostream& err);

/// Phase flags (without the subcommand name) merged over the config file
/// they name. Throws UsageError / IoError like the phase command.
ExperimentConfig resolve_phase_config(const std::vector<std::string>& args);

/// Full command line entry point (argv[0] is the program name).
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace ellipsoid_lab::cli
