#pragma once

#include "vodsim/caching.hpp"
#include "vodsim/config.hpp"
#include "vodsim/engine.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vodsim {

enum class ExperimentKind { DelayVsArrival, DelayVsLength, FailureVsArrival, Custom };
enum class SweepVariable { ArrivalRate, VideoLength };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
std::string_view to_string(SweepVariable var);
std::optional<SweepVariable> parse_sweep_variable(std::string_view name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::DelayVsArrival;
    SweepVariable sweep_variable = SweepVariable::ArrivalRate;
    std::vector<SchemeId> schemes;
    std::vector<double> sweep;
    int replications = 30;
    SimConfig base;
    std::string output_path;
};

/// Canonical sweep for each named experiment: arrival rates 2..10 step 2
/// for the arrival experiments, lengths 30/60/90 min for the length one,
/// every scheme, 30 replications.
ExperimentSpec default_experiment(ExperimentKind kind, const SimConfig& base);

/// Human-readable problems with the spec; empty means runnable.
std::vector<std::string> validate_experiment(const ExperimentSpec& spec);

/// Seed of one run. Each label is folded in separately, so the streams of
/// one scheme do not depend on which other schemes are in the sweep.
std::uint64_t derive_run_seed(std::uint64_t base_seed, SchemeId scheme, double sweep_value,
                              int replication);

/// Base config with the sweep variable set to `value`.
SimConfig config_for(const ExperimentSpec& spec, double value);

struct ExperimentRow {
    std::string experiment;
    SchemeId scheme = SchemeId::NoCache;
    double arrival_rate_per_min = 0.0;
    double video_length_min = 0.0;
    /// nullopt marks the aggregate row.
    std::optional<int> replication;
    std::uint64_t seed = 0;
    bool empty = false;
    double arrivals = 0.0;
    double mean_delay_ms = 0.0;
    double ci95_ms = 0.0;
    double failure_prob = 0.0;
    double on_time = 0.0;
    double attempts = 0.0;
    double failures = 0.0;
    std::array<double, kSourceKinds> outcome_counts{};
    std::vector<double> lps_grants;
    std::vector<double> lps_releases;
    std::vector<double> lps_outstanding;
};

ExperimentRow row_from_report(std::string_view experiment, const SimConfig& cfg,
                              const MetricsReport& report, std::optional<int> replication);

/// Mean of the non-empty replication rows; ci95 spans the replication means.
ExperimentRow aggregate_rows(const std::vector<ExperimentRow>& reps, std::uint64_t base_seed);

/// Runs every (scheme, value, replication) in that order and appends one
/// aggregate row after each (scheme, value) group. Throws
/// Error(ConfigInvalid) for an invalid spec or any invalid swept config.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

std::string csv_header();
std::string to_csv_line(const ExperimentRow& row);
std::string to_csv(const std::vector<ExperimentRow>& rows);

/// Runs the experiment and writes the CSV to spec.output_path.
/// Throws Error(Io) if the file cannot be written.
void write_experiment(const ExperimentSpec& spec);

} // namespace vodsim
