#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vodsim/engine.hpp"
#include "vodsim/errors.hpp"

#include <chrono>
#include <sstream>

using namespace vodsim;
using namespace std::chrono_literals;

namespace {

SimConfig small_config(double horizon = 200) {
    SimConfig cfg;
    cfg.horizon_minutes = horizon;
    cfg.seed = 17;
    return cfg;
}

void check_same(const MetricsReport& a, const MetricsReport& b) {
    CHECK(a.arrivals == b.arrivals);
    CHECK(a.on_time == b.on_time);
    CHECK(a.mean_startup_delay_ms == b.mean_startup_delay_ms);
    CHECK(a.ci95_ms == b.ci95_ms);
    CHECK(a.attempts == b.attempts);
    CHECK(a.failures == b.failures);
    CHECK(a.outcome_counts == b.outcome_counts);
    CHECK(a.lps_grants == b.lps_grants);
    CHECK(a.lps_releases == b.lps_releases);
}

} // namespace

TEST_CASE("arrival classification") {
    VideoSpec v;
    v.id = VideoId{1};
    v.length_minutes = 60;
    v.qualities = {{1, 1.5e6, 1, 1.0}};
    const auto plan = build_plan(v, 5, 0ms);
    CHECK(classify_arrival(plan, 0ms) == ArrivalClass{OnTime{1}});
    CHECK(classify_arrival(plan, 5min) == ArrivalClass{Late{1, 5min}});
    CHECK(classify_arrival(plan, 12min) == ArrivalClass{OnTime{2}});
    CHECK(classify_arrival(plan, 25min) == ArrivalClass{Late{3, 1min}});
}

TEST_CASE("invalid configs are rejected up front") {
    auto cfg = small_config();
    cfg.channels = 7;
    try {
        Simulation sim(cfg, SchemeId::NoCache);
        FAIL("expected ConfigInvalid");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
    }
}

TEST_CASE("world snapshots") {
    Simulation sim(small_config(), SchemeId::AllCache);
    CHECK(sim.snapshot_world().present_clients() == 0);
    REQUIRE(sim.step());
    CHECK(sim.snapshot_world().present_clients() == 1);

    const auto a = sim.snapshot_world();
    const auto b = sim.snapshot_world();
    CHECK(a.now == b.now);
    CHECK(a.present_clients() == b.present_clients());
    CHECK(a.plans.size() == b.plans.size());
}

TEST_CASE("every scheme runs to completion with conservation") {
    for (auto scheme : all_schemes()) {
        CAPTURE(to_string(scheme));
        Simulation sim(small_config(120), scheme);
        std::uint64_t steps = 0;
        while (sim.step()) {
            const auto c = sim.census();
            REQUIRE(c.arrivals == c.in_flight + c.completed + c.departed);
            if (++steps % 97 == 0) {
                // Uploaders serving a fetch stay flagged until it completes.
                for (const auto& rec : sim.clients()) {
                    if (rec.state != ClientState::FetchingFirst || !rec.outcome) continue;
                    if (const auto* n = std::get_if<source::Neighbor>(&rec.outcome->source)) {
                        REQUIRE(sim.clients()[to_int(n->holder) - 1].uploading);
                    }
                    if (const auto* r = std::get_if<source::Relay>(&rec.outcome->source)) {
                        REQUIRE(sim.clients()[to_int(r->holder) - 1].uploading);
                        REQUIRE(sim.clients()[to_int(r->via) - 1].uploading);
                    }
                }
            }
        }
        const auto c = sim.census();
        CHECK(c.arrivals > 0);
        CHECK(c.departed == c.arrivals);
        for (const auto& rec : sim.clients()) {
            REQUIRE(rec.playback_start.has_value());
            REQUIRE(rec.state == ClientState::Done);
            REQUIRE_FALSE(rec.uploading);
        }
        const auto r = sim.report();
        for (std::size_t i = 0; i < r.lps_grants.size(); ++i) {
            CHECK(r.lps_outstanding[i] == r.lps_grants[i] - r.lps_releases[i]);
            CHECK(r.lps_outstanding[i] == sim.lps_table().entries()[i].request_count());
        }
    }
}

TEST_CASE("identical inputs give identical runs") {
    for (auto scheme : all_schemes()) {
        std::ostringstream t1, t2;
        const auto a = run_simulation(small_config(), scheme, &t1);
        const auto b = run_simulation(small_config(), scheme, &t2);
        check_same(a, b);
        CHECK(t1.str() == t2.str());
        CHECK_FALSE(t1.str().empty());
    }
    auto other = small_config();
    other.seed = 18;
    CHECK(run_simulation(other, SchemeId::NoCache).mean_startup_delay_ms !=
          run_simulation(small_config(), SchemeId::NoCache).mean_startup_delay_ms);
}

TEST_CASE("no cache converges to half a segment") {
    auto cfg = small_config(2000);
    const auto r = run_simulation(cfg, SchemeId::NoCache);
    CHECK(r.arrivals >= 10000);
    CHECK(r.mean_startup_delay_ms == doctest::Approx(360000).epsilon(0.02));
    CHECK(r.attempts == 0);
}

TEST_CASE("proxy cache never fails with ample capacity") {
    for (double lambda : {2.0, 10.0}) {
        auto cfg = small_config(300);
        cfg.arrival_rate_per_min = lambda;
        const auto r = run_simulation(cfg, SchemeId::ProxyCache);
        CHECK(r.attempts > 0);
        CHECK(r.failures == 0);
        CHECK(r.failure_probability == 0.0);
    }
}

TEST_CASE("tiny proxy capacity forces abandonment") {
    auto cfg = small_config(300);
    cfg.lps_capacity = 1;
    cfg.num_lps = 1;
    cfg.arrival_rate_per_min = 10;
    cfg.proxy_rate_mbps = 1.5;
    const auto r = run_simulation(cfg, SchemeId::ProxyCache);
    CHECK(r.failures > 0);
    CHECK(r.failure_probability > 0.0);
}

TEST_CASE("warmup equal to horizon gives an empty report") {
    auto cfg = small_config(50);
    cfg.warmup_minutes = 50;
    const auto r = run_simulation(cfg, SchemeId::AllCache);
    CHECK(r.empty);
    CHECK(r.arrivals == 0);
    CHECK(r.mean_startup_delay_ms == 0.0);
}
