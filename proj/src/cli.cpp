#include "vodsim/cli.hpp"

#include "vodsim/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

namespace vodsim::cli {

namespace {

std::string scheme_names() {
    std::string out;
    for (auto s : all_schemes()) {
        if (!out.empty()) out += ", ";
        out += to_string(s);
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct Options {
    std::string config;
    std::string scheme;
    std::string seed;
    std::string out;
    int reps = 0;
    bool trace = false;
    std::string name;
    std::string sweep;
    std::string sweep_var;
};

void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--config", o.config, "Configuration file (key = value lines)");
    sub.add_option("--seed", o.seed, "Base 64-bit seed, overrides the config");
    sub.add_option("--out", o.out, "Output path (CSV)");
}

[[noreturn]] void usage(const std::string& message, const CLI::App& app) {
    throw Error(ErrorCode::Usage, message + "\n\n" + app.help());
}

} // namespace

CommandLine parse_args(const std::vector<std::string>& args) {
    Options o;
    CLI::App app{"Staggered-broadcast VoD first-segment caching simulator", "vodsim"};
    app.require_subcommand(1, 1);

    auto* simulate = app.add_subcommand("simulate", "Run one simulation and print its report");
    add_common(*simulate, o);
    simulate->add_option("--scheme", o.scheme, "Caching scheme: " + scheme_names());
    simulate->add_flag("--trace", o.trace, "Write the event trace to standard error");

    auto* experiment = app.add_subcommand("experiment", "Run a replicated parameter sweep");
    add_common(*experiment, o);
    experiment->add_option("--scheme", o.scheme, "Comma-separated schemes (default: all)");
    experiment->add_option("--reps", o.reps, "Replications per point (default 30)");
    experiment->add_option("--name", o.name,
                           "delay_vs_arrival (default), delay_vs_length, failure_vs_arrival, "
                           "custom");
    experiment->add_option("--sweep", o.sweep, "Comma-separated sweep values");
    experiment->add_option("--sweep-var", o.sweep_var, "arrival or length (custom only)");
    experiment->add_flag("--trace", o.trace, "Accepted for symmetry; traces are not written");

    auto* analyze = app.add_subcommand("analyze", "Print the capacity model report");
    add_common(*analyze, o);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw Error(ErrorCode::Usage, app.help());
    } catch (const CLI::ParseError& e) {
        usage(e.what(), app);
    }

    CommandLine cmd;
    const CLI::App* active = nullptr;
    if (simulate->parsed()) {
        cmd.subcommand = Subcommand::Simulate;
        active = simulate;
    } else if (experiment->parsed()) {
        cmd.subcommand = Subcommand::Experiment;
        active = experiment;
    } else {
        cmd.subcommand = Subcommand::Analyze;
        active = analyze;
    }

    if (!o.config.empty()) cmd.config_path = o.config;
    if (!o.out.empty()) cmd.out = o.out;
    cmd.trace = o.trace;
    if (!o.seed.empty()) {
        std::uint64_t seed = 0;
        const auto* end = o.seed.data() + o.seed.size();
        auto [ptr, ec] = std::from_chars(o.seed.data(), end, seed);
        if (ec != std::errc{} || ptr != end) usage("--seed expects an unsigned 64-bit integer", *active);
        cmd.seed = seed;
    }
    if (!o.scheme.empty()) {
        const auto names = cmd.subcommand == Subcommand::Simulate
                               ? std::vector<std::string>{o.scheme}
                               : split_commas(o.scheme);
        for (const auto& n : names) {
            const auto s = parse_scheme(n);
            if (!s) usage(fmt::format("unknown scheme '{}'; valid schemes: {}", n, scheme_names()),
                          *active);
            cmd.schemes.push_back(*s);
        }
    }
    if (experiment->parsed()) {
        if (experiment->count("--reps") > 0) {
            if (o.reps < 1) usage("--reps must be at least 1", *active);
            cmd.reps = o.reps;
        }
        if (!o.name.empty()) {
            cmd.experiment = parse_experiment_kind(o.name);
            if (!cmd.experiment) usage(fmt::format("unknown experiment '{}'", o.name), *active);
        }
        if (!o.sweep.empty()) {
            for (const auto& item : split_commas(o.sweep)) {
                double v = 0.0;
                const auto* end = item.data() + item.size();
                auto [ptr, ec] = std::from_chars(item.data(), end, v);
                if (ec != std::errc{} || ptr != end) {
                    usage(fmt::format("bad sweep value '{}'", item), *active);
                }
                cmd.sweep.push_back(v);
            }
        }
        if (!o.sweep_var.empty()) {
            cmd.sweep_variable = parse_sweep_variable(o.sweep_var);
            if (!cmd.sweep_variable) usage("--sweep-var expects 'arrival' or 'length'", *active);
        }
        const auto kind = cmd.experiment.value_or(ExperimentKind::DelayVsArrival);
        if (kind == ExperimentKind::Custom && (cmd.sweep.empty() || !cmd.sweep_variable)) {
            usage("custom experiments need --sweep and --sweep-var", *active);
        }
        if (kind != ExperimentKind::Custom && cmd.sweep_variable) {
            usage("--sweep-var is only valid for custom experiments", *active);
        }
        if (!cmd.out) usage("experiment requires --out", *active);
    }
    return cmd;
}

ExperimentSpec build_experiment(const CommandLine& cmd, const SimConfig& base) {
    const auto kind = cmd.experiment.value_or(ExperimentKind::DelayVsArrival);
    ExperimentSpec spec = default_experiment(kind, base);
    if (kind == ExperimentKind::Custom) spec.sweep_variable = *cmd.sweep_variable;
    if (!cmd.schemes.empty()) spec.schemes = cmd.schemes;
    if (!cmd.sweep.empty()) spec.sweep = cmd.sweep;
    if (cmd.reps) spec.replications = *cmd.reps;
    if (cmd.out) spec.output_path = *cmd.out;
    return spec;
}

CapacityReport analyze_config(const SimConfig& cfg) {
    const auto videos = make_catalog(cfg);
    auto placement = place_cache(videos, cfg.cache_capacity_mbit * 1e6);
    placement = select_broadcast_videos(videos, std::move(placement),
                                        cfg.reserved_broadcast_mbps * 1e6, cfg.lps_channels);
    return broadcast_analysis(videos, placement, cfg.arrival_rate_per_min / 60.0,
                              cfg.bandwidth_mbps * 1e6, cfg.video_length_minutes,
                              cfg.lps_channels);
}

std::string format_report(const MetricsReport& r) {
    std::string out;
    auto line = [&out](std::string_view key, const auto& value) {
        out += fmt::format("{:<22} {}\n", key, value);
    };
    line("scheme", to_string(r.scheme));
    line("seed", r.seed);
    line("empty", r.empty ? "yes" : "no");
    line("arrivals", r.arrivals);
    line("on_time", r.on_time);
    line("mean_startup_delay_ms", r.mean_startup_delay_ms);
    line("ci95_ms", r.ci95_ms);
    line("attempts", r.attempts);
    line("failures", r.failures);
    line("failure_probability", r.failure_probability);
    for (std::size_t i = 0; i < kSourceKinds; ++i) {
        line(fmt::format("source.{}", to_string(static_cast<SourceKind>(i))), r.outcome_counts[i]);
    }
    for (std::size_t i = 0; i < r.lps_grants.size(); ++i) {
        line(fmt::format("lps{}.grants", i + 1), r.lps_grants[i]);
        line(fmt::format("lps{}.outstanding", i + 1), r.lps_outstanding[i]);
    }
    return out;
}

namespace {

std::vector<std::pair<std::string_view, std::string>> capacity_fields(const CapacityReport& r) {
    auto s = [](const auto& v) { return fmt::format("{}", v); };
    return {
        {"hit_ratio", s(r.hit_ratio)},
        {"lambda_dedicated", s(r.lambda_dedicated)},
        {"avg_stream_rate", s(r.avg_stream_rate)},
        {"supported_streams", s(r.supported_streams)},
        {"blocking_prob", s(r.blocking_prob)},
        {"overall_blocking", s(r.overall_blocking)},
        {"broadcast_bandwidth", s(r.broadcast_bandwidth)},
        {"lambda_broadcast", s(r.lambda_broadcast)},
        {"avg_broadcast_rate", s(r.avg_broadcast_rate)},
        {"dedicated_capacity", s(r.dedicated_capacity)},
        {"broadcast_blocking_prob", s(r.broadcast_blocking_prob)},
        {"broadcast_overall_blocking", s(r.broadcast_overall_blocking)},
        {"mean_service_minutes", s(r.mean_service_minutes)},
        {"degenerate", s(r.degenerate ? 1 : 0)},
        {"broadcast_degenerate", s(r.broadcast_degenerate ? 1 : 0)},
    };
}

} // namespace

std::string format_capacity_report(const CapacityReport& r) {
    std::string out;
    for (const auto& [k, v] : capacity_fields(r)) out += fmt::format("{:<28} {}\n", k, v);
    return out;
}

std::string capacity_report_csv(const CapacityReport& r) {
    std::string header;
    std::string values;
    for (const auto& [k, v] : capacity_fields(r)) {
        if (!header.empty()) {
            header += ',';
            values += ',';
        }
        header += k;
        values += v;
    }
    return header + "\n" + values + "\n";
}

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::Io, fmt::format("cannot write '{}'", path));
    f << text;
    if (!f) throw Error(ErrorCode::Io, fmt::format("write to '{}' failed", path));
}

SimConfig base_config(const CommandLine& cmd) {
    SimConfig cfg = cmd.config_path ? load_config(*cmd.config_path) : SimConfig{};
    if (cmd.seed) cfg.seed = *cmd.seed;
    return cfg;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CommandLine cmd;
    try {
        cmd = parse_args(args);
    } catch (const Error& e) {
        const bool help = std::find(args.begin(), args.end(), "--help") != args.end() ||
                          std::find(args.begin(), args.end(), "-h") != args.end();
        (help ? out : err) << e.what() << '\n';
        return help ? kExitOk : kExitUsage;
    }

    try {
        const SimConfig cfg = base_config(cmd);
        switch (cmd.subcommand) {
        case Subcommand::Simulate: {
            const SchemeId scheme = cmd.schemes.empty() ? SchemeId::ProxyCache : cmd.schemes.front();
            const auto report = run_simulation(cfg, scheme, cmd.trace ? &err : nullptr);
            out << format_report(report);
            if (cmd.out) {
                write_file(*cmd.out, csv_header() + "\n" +
                                         to_csv_line(row_from_report("simulate", cfg, report, 1)) +
                                         "\n");
            }
            break;
        }
        case Subcommand::Experiment: {
            const auto spec = build_experiment(cmd, cfg);
            write_experiment(spec);
            fmt::print(out, "wrote {}\n", spec.output_path);
            break;
        }
        case Subcommand::Analyze: {
            if (const auto violations = validate_config(cfg); !violations.empty()) {
                std::string msg = "invalid configuration:";
                for (const auto& v : violations) msg += fmt::format("\n  {}: {}", v.key, v.message);
                throw Error(ErrorCode::ConfigInvalid, msg);
            }
            const auto report = analyze_config(cfg);
            out << format_capacity_report(report);
            if (cmd.out) write_file(*cmd.out, capacity_report_csv(report));
            break;
        }
        }
    } catch (const Error& e) {
        fmt::print(err, "error ({}): {}\n", to_string(e.code()), e.what());
        return kExitFault;
    }
    return kExitOk;
}

} // namespace vodsim::cli
