#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vodsim/errors.hpp"
#include "vodsim/random.hpp"
#include "vodsim/sb_scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>
#include <utility>
#include <vector>

using namespace vodsim;
using namespace std::chrono_literals;

namespace {

VideoSpec video_of(double minutes) {
    VideoSpec v;
    v.id = VideoId{3};
    v.length_minutes = minutes;
    v.consumption_rate = 1.5;
    v.popularity = 1.0;
    v.qualities = {{1, 1.5e6, 1.5e6 * minutes * 60, 1.0}};
    return v;
}

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return ErrorCode::Usage;
}

// Explicit timetable: every (start, channel) of segment 1 up to `until`.
std::vector<std::pair<Millis, int>> enumerate_starts(const BroadcastPlan& plan, Millis until) {
    std::vector<std::pair<Millis, int>> out;
    for (int ch = 1; ch <= plan.channels; ++ch) {
        for (Millis s = plan.epoch + (ch - 1) * plan.segment_duration; s <= until;
             s += plan.cycle) {
            out.emplace_back(s, ch);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("segment duration") {
    CHECK(segment_duration(60, 5) == Millis{720000});
    CHECK(segment_duration(30, 5) == 6min);
    CHECK(code_of([] { segment_duration(60, 7); }) == ErrorCode::NonDivisible);
    CHECK(code_of([] { segment_duration(60, 0); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("channel budget") {
    CHECK(max_channels(45, 1.5, 5) == 6);
    CHECK(max_channels(54, 1.5, 5) == 7);
    CHECK(max_channels(1.5, 1.5, 1) == 1);
    CHECK(max_channels(1.0, 1.5, 1) == 0);
    // Property: the largest K satisfying rate*K*N <= b.
    for (double b = 1; b < 80; b += 0.7) {
        for (int n = 1; n <= 6; ++n) {
            const int k = max_channels(b, 1.5, n);
            CHECK(1.5 * k * n <= b);
            CHECK(1.5 * (k + 1) * n > b);
        }
    }
}

TEST_CASE("plan layout") {
    const auto plan = build_plan(video_of(60), 5, 0ms);
    CHECK(plan.segment_duration == 12min);
    CHECK(plan.cycle == 60min);
    CHECK(plan.channel_offsets ==
          std::vector<Millis>{0min, 12min, 24min, 36min, 48min});

    const auto starts = enumerate_starts(plan, 60min);
    REQUIRE(starts.size() == 6);
    CHECK(starts[5] == std::pair<Millis, int>{60min, 1});

    const auto single = build_plan(video_of(30), 1, 0ms);
    CHECK(single.cycle == 30min);
    CHECK(next_first_segment_start(single, 1min).wait == 29min);

    const auto shifted = build_plan(video_of(60), 5, 5min);
    CHECK(next_first_segment_start(shifted, 5min).wait == 0ms);
    CHECK(code_of([&] { next_first_segment_start(shifted, 4min); }) == ErrorCode::BeforeStart);
}

TEST_CASE("next segment-1 start") {
    const auto plan = build_plan(video_of(60), 5, 0ms);
    auto at = [&](Millis t) {
        const auto s = next_first_segment_start(plan, t);
        return std::pair<int, Millis>{s.channel, s.wait};
    };
    CHECK(at(0ms) == std::pair<int, Millis>{1, 0ms});
    CHECK(at(5min) == std::pair<int, Millis>{2, 7min});
    CHECK(at(12min) == std::pair<int, Millis>{2, 0ms});
    CHECK(at(59min) == std::pair<int, Millis>{1, 1min});
}

TEST_CASE("next start agrees with the enumerated timetable") {
    RandomSource rng(11);
    const std::tuple<double, int, Millis> cases[] = {
        {60.0, 5, 0ms}, {90.0, 6, 3min}, {30.0, 1, 0ms}, {45.0, 9, 17ms}};
    for (const auto& [minutes, k, epoch] : cases) {
        const auto plan = build_plan(video_of(minutes), k, epoch);
        const Millis until = epoch + 3 * plan.cycle;
        const auto starts = enumerate_starts(plan, until + plan.cycle);
        for (int i = 0; i < 2000; ++i) {
            const auto offset = rng.uniform(0.0, static_cast<double>(3 * plan.cycle.count()));
            const Millis t = epoch + Millis{static_cast<Millis::rep>(offset)};
            const auto it = std::lower_bound(starts.begin(), starts.end(),
                                             std::pair<Millis, int>{t, 0});
            REQUIRE(it != starts.end());
            const auto got = next_first_segment_start(plan, t);
            CHECK(got.wait == it->first - t);
            CHECK(got.channel == it->second);
            CHECK(got.wait < plan.segment_duration);
        }
    }
}

TEST_CASE("current segment") {
    const auto plan = build_plan(video_of(60), 5, 0ms);
    CHECK(current_segment(plan, 1, 13min) == 2);
    CHECK(current_segment(plan, 2, 13min) == 1);
    CHECK(current_segment(plan, 1, 0ms) == 1);
    CHECK(current_segment(plan, 1, 60min) == 1);
    CHECK(current_segment(plan, 5, 48min + 11min) == 1);
    CHECK(code_of([&] { current_segment(plan, 3, 10min); }) == ErrorCode::BeforeStart);

    // Property: at any instant after warm start each segment is on exactly one channel.
    for (Millis t = 48min; t < 200min; t += 7min + 13ms) {
        std::vector<int> seen(6, 0);
        for (int ch = 1; ch <= 5; ++ch) ++seen.at(static_cast<std::size_t>(current_segment(plan, ch, t)));
        for (std::size_t s = 1; s <= 5; ++s) CHECK(seen[s] == 1);
        CHECK(current_segment(plan, channel_in_first_segment(plan, t), t) == 1);
    }
}
