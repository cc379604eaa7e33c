#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vodsim/cli.hpp"
#include "vodsim/errors.hpp"
#include "vodsim/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace vodsim;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "vodsim_test_cli";
    fs::create_directories(dir);
    return dir / name;
}

fs::path small_config_file() {
    const auto path = scratch("small.cfg");
    std::ofstream(path) << "horizon_minutes = 60\narrival_rate_per_min = 4\n";
    return path;
}

} // namespace

TEST_CASE("argument parsing") {
    const auto cmd = cli::parse_args(
        {"experiment", "--scheme", "all,dsc", "--reps", "3", "--seed", "9", "--out", "x.csv"});
    CHECK(cmd.subcommand == cli::Subcommand::Experiment);
    CHECK(cmd.schemes == std::vector<SchemeId>{SchemeId::AllCache, SchemeId::DscCache});
    CHECK(cmd.reps == 3);
    CHECK(cmd.seed == 9u);
    CHECK(cmd.out == std::string{"x.csv"});

    const auto sim = cli::parse_args({"simulate", "--trace"});
    CHECK(sim.subcommand == cli::Subcommand::Simulate);
    CHECK(sim.trace);

    const auto custom = cli::parse_args({"experiment", "--name", "custom", "--sweep", "30,90",
                                         "--sweep-var", "length", "--out", "y.csv"});
    CHECK(custom.experiment == ExperimentKind::Custom);
    CHECK(custom.sweep == std::vector<double>{30, 90});
    CHECK(custom.sweep_variable == SweepVariable::VideoLength);
}

TEST_CASE("usage errors") {
    auto usage = [](std::vector<std::string> args) {
        try {
            cli::parse_args(args);
        } catch (const Error& e) {
            return e.code() == ErrorCode::Usage;
        }
        return false;
    };
    CHECK(usage({}));
    CHECK(usage({"simulate", "--scheme", "lru"}));
    CHECK(usage({"experiment", "--name", "custom", "--out", "z.csv"}));
    CHECK(usage({"experiment"}));
    CHECK(usage({"bogus"}));

    const auto r = invoke({"simulate", "--scheme", "lru"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("nocache, all, random, dsc, por, proxy") != std::string::npos);

    const auto help = invoke({"--help"});
    CHECK(help.code == cli::kExitOk);
    CHECK(help.out.find("simulate") != std::string::npos);
}

TEST_CASE("simulate and analyze") {
    const auto cfg = small_config_file().string();
    const auto r = invoke({"simulate", "--config", cfg, "--scheme", "proxy", "--seed", "4"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("failure_probability    0\n") != std::string::npos);

    const auto csv = scratch("sim.csv");
    CHECK(invoke({"simulate", "--config", cfg, "--out", csv.string()}).code == cli::kExitOk);
    const auto text = slurp(csv);
    CHECK(text.rfind(csv_header() + "\n", 0) == 0);

    const auto a = invoke({"analyze", "--config", cfg});
    CHECK(a.code == cli::kExitOk);
    CHECK(a.out.find("hit_ratio") != std::string::npos);
}

TEST_CASE("faults exit with status 1") {
    const auto bad = scratch("bad.cfg");
    std::ofstream(bad) << "channels = 7\n";
    auto r = invoke({"simulate", "--config", bad.string()});
    CHECK(r.code == cli::kExitFault);
    CHECK(r.err.find("ConfigInvalid") != std::string::npos);

    r = invoke({"simulate", "--config", scratch("missing.cfg").string()});
    CHECK(r.code == cli::kExitFault);

    const auto unknown = scratch("unknown.cfg");
    std::ofstream(unknown) << "turbo = 1\n";
    CHECK(invoke({"analyze", "--config", unknown.string()}).code == cli::kExitFault);
}

TEST_CASE("experiment csv layout and determinism") {
    const auto cfg = small_config_file().string();
    const auto a = scratch("a.csv"), b = scratch("b.csv");
    const std::vector<std::string> common = {"experiment", "--config", cfg, "--scheme",
                                             "nocache,all", "--reps", "2", "--sweep", "2,4"};
    auto args = common;
    args.insert(args.end(), {"--out", a.string()});
    REQUIRE(invoke(args).code == cli::kExitOk);
    args = common;
    args.insert(args.end(), {"--out", b.string()});
    REQUIRE(invoke(args).code == cli::kExitOk);

    const auto text = slurp(a);
    CHECK(text == slurp(b));

    std::istringstream lines(text);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 1 + 2 * 2 * 3);
    CHECK(rows[0] == csv_header());
    CHECK(rows[1].rfind("delay_vs_arrival,nocache,2,60,1,", 0) == 0);
    CHECK(rows[3].rfind("delay_vs_arrival,nocache,2,60,agg,", 0) == 0);
    CHECK(rows[12].rfind("delay_vs_arrival,all,4,60,agg,", 0) == 0);
}

TEST_CASE("experiment seeds") {
    CHECK(derive_run_seed(1, SchemeId::AllCache, 6, 1) == derive_run_seed(1, SchemeId::AllCache, 6, 1));
    CHECK(derive_run_seed(1, SchemeId::AllCache, 6, 1) != derive_run_seed(1, SchemeId::AllCache, 6, 2));
    CHECK(derive_run_seed(1, SchemeId::AllCache, 6, 1) != derive_run_seed(1, SchemeId::DscCache, 6, 1));
    CHECK(derive_run_seed(1, SchemeId::AllCache, 6, 1) != derive_run_seed(1, SchemeId::AllCache, 8, 1));
    CHECK(derive_run_seed(1, SchemeId::AllCache, 6, 1) != derive_run_seed(2, SchemeId::AllCache, 6, 1));
}
