#include "vodsim/experiment.hpp"

#include "vodsim/errors.hpp"
#include "vodsim/random.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <fstream>

namespace vodsim {

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::DelayVsArrival: return "delay_vs_arrival";
    case ExperimentKind::DelayVsLength: return "delay_vs_length";
    case ExperimentKind::FailureVsArrival: return "failure_vs_arrival";
    case ExperimentKind::Custom: return "custom";
    }
    return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
    for (auto k : {ExperimentKind::DelayVsArrival, ExperimentKind::DelayVsLength,
                   ExperimentKind::FailureVsArrival, ExperimentKind::Custom}) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

std::string_view to_string(SweepVariable var) {
    return var == SweepVariable::ArrivalRate ? "arrival" : "length";
}

std::optional<SweepVariable> parse_sweep_variable(std::string_view name) {
    if (name == "arrival") return SweepVariable::ArrivalRate;
    if (name == "length") return SweepVariable::VideoLength;
    return std::nullopt;
}

ExperimentSpec default_experiment(ExperimentKind kind, const SimConfig& base) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.base = base;
    spec.schemes.assign(all_schemes().begin(), all_schemes().end());
    spec.replications = 30;
    if (kind == ExperimentKind::DelayVsLength) {
        spec.sweep_variable = SweepVariable::VideoLength;
        spec.sweep = {30.0, 60.0, 90.0};
    } else {
        spec.sweep_variable = SweepVariable::ArrivalRate;
        spec.sweep = {2.0, 4.0, 6.0, 8.0, 10.0};
    }
    return spec;
}

std::vector<std::string> validate_experiment(const ExperimentSpec& spec) {
    std::vector<std::string> problems;
    if (spec.replications < 1) problems.emplace_back("replications must be at least 1");
    if (spec.sweep.empty()) problems.emplace_back("sweep must not be empty");
    if (spec.schemes.empty()) problems.emplace_back("at least one scheme is required");
    const bool wants_length = spec.kind == ExperimentKind::DelayVsLength;
    const bool wants_arrival = spec.kind == ExperimentKind::DelayVsArrival ||
                               spec.kind == ExperimentKind::FailureVsArrival;
    if ((wants_length && spec.sweep_variable != SweepVariable::VideoLength) ||
        (wants_arrival && spec.sweep_variable != SweepVariable::ArrivalRate)) {
        problems.push_back(fmt::format("{} must sweep {}", to_string(spec.kind),
                                       wants_length ? "video length" : "arrival rate"));
    }
    for (double v : spec.sweep) {
        for (const auto& violation : validate_config(config_for(spec, v))) {
            problems.push_back(fmt::format("sweep value {}: {}: {}", v, violation.key,
                                           violation.message));
        }
    }
    return problems;
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, SchemeId scheme, double sweep_value,
                              int replication) {
    std::uint64_t s = mix_seed(base_seed, label_hash(to_string(scheme)));
    s = mix_seed(s, std::bit_cast<std::uint64_t>(sweep_value));
    return mix_seed(s, static_cast<std::uint64_t>(replication));
}

SimConfig config_for(const ExperimentSpec& spec, double value) {
    SimConfig cfg = spec.base;
    if (spec.sweep_variable == SweepVariable::ArrivalRate) {
        cfg.arrival_rate_per_min = value;
    } else {
        cfg.video_length_minutes = value;
    }
    return cfg;
}

ExperimentRow row_from_report(std::string_view experiment, const SimConfig& cfg,
                              const MetricsReport& report, std::optional<int> replication) {
    ExperimentRow row;
    row.experiment = std::string(experiment);
    row.scheme = report.scheme;
    row.arrival_rate_per_min = cfg.arrival_rate_per_min;
    row.video_length_min = cfg.video_length_minutes;
    row.replication = replication;
    row.seed = report.seed;
    row.empty = report.empty;
    row.arrivals = static_cast<double>(report.arrivals);
    row.mean_delay_ms = report.mean_startup_delay_ms;
    row.ci95_ms = report.ci95_ms;
    row.failure_prob = report.failure_probability;
    row.on_time = static_cast<double>(report.on_time);
    row.attempts = static_cast<double>(report.attempts);
    row.failures = static_cast<double>(report.failures);
    for (std::size_t i = 0; i < kSourceKinds; ++i) {
        row.outcome_counts[i] = static_cast<double>(report.outcome_counts[i]);
    }
    auto widen = [](const std::vector<std::uint64_t>& xs) {
        return std::vector<double>(xs.begin(), xs.end());
    };
    row.lps_grants = widen(report.lps_grants);
    row.lps_releases = widen(report.lps_releases);
    row.lps_outstanding = widen(report.lps_outstanding);
    return row;
}

ExperimentRow aggregate_rows(const std::vector<ExperimentRow>& reps, std::uint64_t base_seed) {
    ExperimentRow agg;
    if (reps.empty()) {
        agg.empty = true;
        return agg;
    }
    agg.experiment = reps.front().experiment;
    agg.scheme = reps.front().scheme;
    agg.arrival_rate_per_min = reps.front().arrival_rate_per_min;
    agg.video_length_min = reps.front().video_length_min;
    agg.replication = std::nullopt;
    agg.seed = base_seed;
    agg.lps_grants.assign(reps.front().lps_grants.size(), 0.0);
    agg.lps_releases.assign(reps.front().lps_releases.size(), 0.0);
    agg.lps_outstanding.assign(reps.front().lps_outstanding.size(), 0.0);

    std::size_t n = 0;
    for (const auto& r : reps) {
        if (r.empty) continue;
        ++n;
        agg.arrivals += r.arrivals;
        agg.mean_delay_ms += r.mean_delay_ms;
        agg.failure_prob += r.failure_prob;
        agg.on_time += r.on_time;
        agg.attempts += r.attempts;
        agg.failures += r.failures;
        for (std::size_t i = 0; i < kSourceKinds; ++i) agg.outcome_counts[i] += r.outcome_counts[i];
        for (std::size_t i = 0; i < agg.lps_grants.size(); ++i) {
            agg.lps_grants[i] += r.lps_grants[i];
            agg.lps_releases[i] += r.lps_releases[i];
            agg.lps_outstanding[i] += r.lps_outstanding[i];
        }
    }
    agg.empty = n == 0;
    if (agg.empty) return agg;

    const double dn = static_cast<double>(n);
    agg.arrivals /= dn;
    agg.mean_delay_ms /= dn;
    agg.failure_prob /= dn;
    agg.on_time /= dn;
    agg.attempts /= dn;
    agg.failures /= dn;
    for (auto& x : agg.outcome_counts) x /= dn;
    for (auto* v : {&agg.lps_grants, &agg.lps_releases, &agg.lps_outstanding}) {
        for (auto& x : *v) x /= dn;
    }
    if (n > 1) {
        double ss = 0.0;
        for (const auto& r : reps) {
            if (r.empty) continue;
            const double d = r.mean_delay_ms - agg.mean_delay_ms;
            ss += d * d;
        }
        agg.ci95_ms = 1.96 * std::sqrt(ss / (dn - 1.0) / dn);
    }
    return agg;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
    if (const auto problems = validate_experiment(spec); !problems.empty()) {
        std::string msg = "invalid experiment:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw Error(ErrorCode::ConfigInvalid, msg);
    }
    const auto name = to_string(spec.kind);
    std::vector<ExperimentRow> rows;
    for (SchemeId scheme : spec.schemes) {
        for (double value : spec.sweep) {
            std::vector<ExperimentRow> group;
            for (int rep = 1; rep <= spec.replications; ++rep) {
                SimConfig cfg = config_for(spec, value);
                cfg.seed = derive_run_seed(spec.base.seed, scheme, value, rep);
                group.push_back(row_from_report(name, cfg, run_simulation(cfg, scheme), rep));
            }
            ExperimentRow agg = aggregate_rows(group, spec.base.seed);
            rows.insert(rows.end(), group.begin(), group.end());
            rows.push_back(std::move(agg));
        }
    }
    return rows;
}

namespace {

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ';';
        out += fmt::format("{}", xs[i]);
    }
    return out;
}

} // namespace

std::string csv_header() {
    return "experiment,scheme,arrival_rate_per_min,video_length_min,replication,seed,arrivals,"
           "mean_delay_ms,ci95_ms,failure_prob,empty,on_time,attempts,failures,"
           "n_channel_slot,n_neighbor,n_relay,n_por,n_lps,lps_grants,lps_releases,"
           "lps_outstanding";
}

std::string to_csv_line(const ExperimentRow& row) {
    const std::string rep = row.replication ? fmt::format("{}", *row.replication) : "agg";
    // Empty runs leave the delay and failure columns blank.
    const std::string mean = row.empty ? "" : fmt::format("{}", row.mean_delay_ms);
    const std::string ci = row.empty ? "" : fmt::format("{}", row.ci95_ms);
    const std::string fail = row.empty ? "" : fmt::format("{}", row.failure_prob);
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                       row.experiment, to_string(row.scheme), row.arrival_rate_per_min,
                       row.video_length_min, rep, row.seed, row.arrivals, mean, ci, fail,
                       row.empty ? 1 : 0, row.on_time, row.attempts, row.failures,
                       row.outcome_counts[0], row.outcome_counts[1], row.outcome_counts[2],
                       row.outcome_counts[3], row.outcome_counts[4], join(row.lps_grants),
                       join(row.lps_releases), join(row.lps_outstanding));
}

std::string to_csv(const std::vector<ExperimentRow>& rows) {
    std::string out = csv_header();
    out += '\n';
    for (const auto& r : rows) {
        out += to_csv_line(r);
        out += '\n';
    }
    return out;
}

void write_experiment(const ExperimentSpec& spec) {
    const std::string csv = to_csv(run_experiment(spec));
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", spec.output_path));
    out << csv;
    if (!out) throw Error(ErrorCode::Io, fmt::format("write to '{}' failed", spec.output_path));
}

} // namespace vodsim
