#pragma once

#include "vodsim/analytic.hpp"
#include "vodsim/caching.hpp"
#include "vodsim/config.hpp"
#include "vodsim/engine.hpp"
#include "vodsim/experiment.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vodsim::cli {

enum class Subcommand { Simulate, Experiment, Analyze };

struct CommandLine {
    Subcommand subcommand = Subcommand::Simulate;
    std::optional<std::string> config_path;
    std::vector<SchemeId> schemes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> reps;
    bool trace = false;
    std::optional<ExperimentKind> experiment;
    std::vector<double> sweep;
    std::optional<SweepVariable> sweep_variable;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFault = 1;
inline constexpr int kExitUsage = 2;

/// Arguments exclude the program name. Throws Error(Usage) whose message
/// is the diagnostic followed by the help text.
CommandLine parse_args(const std::vector<std::string>& args);

/// Experiment described by the command line over `base`.
ExperimentSpec build_experiment(const CommandLine& cmd, const SimConfig& base);

/// Capacity model for the catalog implied by a config.
CapacityReport analyze_config(const SimConfig& cfg);

std::string format_report(const MetricsReport& report);
std::string format_capacity_report(const CapacityReport& report);
std::string capacity_report_csv(const CapacityReport& report);

/// Full entry point; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace vodsim::cli
