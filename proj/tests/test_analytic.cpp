#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"

#include "vodsim/analytic.hpp"
#include "vodsim/random.hpp"

#include <cmath>

using namespace vodsim;

namespace {

// Single-quality catalog with the given popularities, rates in Mbit/s and
// sizes in bits.
std::vector<VideoSpec> catalog(std::vector<double> pops, std::vector<double> rates_mbps,
                               std::vector<double> sizes) {
    std::vector<VideoSpec> out;
    for (std::size_t k = 0; k < pops.size(); ++k) {
        VideoSpec v;
        v.id = VideoId{static_cast<std::uint32_t>(k + 1)};
        v.length_minutes = 60;
        v.consumption_rate = rates_mbps[k];
        v.popularity = pops[k];
        v.qualities = {{1, rates_mbps[k] * 1e6, sizes[k], 1.0}};
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<VideoSpec> abc() { return catalog({0.5, 0.3, 0.2}, {1.5, 1.5, 1.5}, {10, 10, 10}); }

PlacementMap first_cached(const std::vector<VideoSpec>& videos) {
    auto m = PlacementMap::empty_for(videos);
    m.cached[0][0] = true;
    return m;
}

} // namespace

TEST_CASE("greedy placement") {
    const auto v = abc();
    auto m = place_cache(v, 20);
    CHECK(m.cached == std::vector<std::vector<bool>>{{true}, {true}, {false}});
    CHECK(place_cache(v, 0) == PlacementMap::empty_for(v));
    m = place_cache(v, 1000);
    CHECK(m.cached == std::vector<std::vector<bool>>{{true}, {true}, {true}});

    // Skip-and-continue: the heavy large item does not fit, smaller ones do.
    const auto mixed = catalog({0.5, 0.3, 0.2}, {1.5, 1.5, 1.5}, {30, 10, 10});
    m = place_cache(mixed, 20);
    CHECK(m.cached == std::vector<std::vector<bool>>{{false}, {true}, {true}});

    // Equal weights go to the smaller id.
    const auto tied = catalog({0.5, 0.5}, {1.5, 1.5}, {10, 10});
    m = place_cache(tied, 10);
    CHECK(m.cached == std::vector<std::vector<bool>>{{true}, {false}});
}

TEST_CASE("placement matches exhaustive search on equal sizes") {
    RandomSource rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const int videos = 1 + static_cast<int>(rng.next_u64() % 5);
        const int qualities = 1 + static_cast<int>(rng.next_u64() % 2);
        const auto v = oracle::equal_size_catalog(rng, videos, qualities, 10.0);
        const double capacity = 10.0 * static_cast<double>(rng.next_u64() % 12);
        const auto m = place_cache(v, capacity);
        const auto best = oracle::best_subset(v, capacity);
        CHECK(hit_ratio(v, m) == doctest::Approx(best.value).epsilon(1e-12));
        if (best.optimal_masks == 1) CHECK(oracle::mask_of(m) == best.mask);
    }
}

TEST_CASE("hit ratio") {
    const auto v = abc();
    auto m = PlacementMap::empty_for(v);
    CHECK(hit_ratio(v, m) == 0.0);
    CHECK(hit_ratio(v, first_cached(v)) == doctest::Approx(0.5));
    CHECK(hit_ratio(v, place_cache(v, 1e9)) == doctest::Approx(1.0));
}

TEST_CASE("erlang b") {
    CHECK(erlang_b(3.0, 0) == 1.0);
    CHECK(erlang_b(1.0, 1) == doctest::Approx(0.5));
    CHECK(erlang_b(1.0, 2) == doctest::Approx(0.2));
    for (double a : {0.01, 0.5, 1.0, 7.5, 30.0, 99.0, 250.0}) {
        for (long n = 0; n <= 100; ++n) {
            const double r = erlang_b(a, n);
            const double d = oracle::erlang_b_direct(a, n);
            REQUIRE(std::abs(r - d) <= 1e-12 * d);
            if (n > 0) REQUIRE(r <= erlang_b(a, n - 1));
        }
    }
}

TEST_CASE("dedicated streams") {
    const auto v = abc();
    SUBCASE("everything cached is degenerate") {
        const auto r = dedicated_stream_analysis(v, place_cache(v, 1e9), 1.0, 54e6, 60);
        CHECK(r.degenerate);
        CHECK(r.lambda_dedicated == 0.0);
        CHECK(r.overall_blocking == 0.0);
    }
    SUBCASE("single uncached video") {
        const auto one = catalog({1.0}, {1.5}, {10});
        const auto r = dedicated_stream_analysis(one, PlacementMap::empty_for(one), 0.1, 54e6, 60);
        CHECK(r.lambda_dedicated == doctest::Approx(0.1));
        CHECK(r.avg_stream_rate == doctest::Approx(1.5e6));
        CHECK(r.supported_streams == 36);
        CHECK(r.blocking_prob == doctest::Approx(oracle::erlang_b_direct(360.0, 36)));
        CHECK(r.overall_blocking == doctest::Approx(r.blocking_prob));
    }
    SUBCASE("first of three cached") {
        const auto r = dedicated_stream_analysis(v, first_cached(v), 1.0, 54e6, 60);
        CHECK(r.lambda_dedicated == doctest::Approx(0.5));
        // (lambda / lambda_s) * (0.3 + 0.2) * 1.5e6
        CHECK(r.avg_stream_rate == doctest::Approx(1.5e6));
        CHECK(r.overall_blocking == doctest::Approx(0.5 * r.blocking_prob));
    }
}

TEST_CASE("broadcast selection") {
    const auto two = catalog({0.4, 0.6}, {1, 2}, {10, 10});
    const auto empty = PlacementMap::empty_for(two);

    auto m = select_broadcast_videos(two, empty, 4.5e6, 2);
    CHECK(m.broadcast == std::vector<std::vector<bool>>{{false}, {true}});
    CHECK(broadcast_bandwidth(two, m, 2) == doctest::Approx(4e6));

    m = select_broadcast_videos(two, empty, 0, 2);
    CHECK(m.broadcast == std::vector<std::vector<bool>>{{false}, {false}});

    m = select_broadcast_videos(two, empty, 6e6, 2);
    CHECK(m.broadcast == std::vector<std::vector<bool>>{{true}, {true}});

    // Cached items are never broadcast.
    auto cached = empty;
    cached.cached[1][0] = true;
    m = select_broadcast_videos(two, cached, 100e6, 2);
    CHECK(m.broadcast == std::vector<std::vector<bool>>{{true}, {false}});
}

TEST_CASE("broadcast analysis") {
    const auto v = abc();
    SUBCASE("full coverage leaves no dedicated traffic") {
        auto m = select_broadcast_videos(v, first_cached(v), 1e12, 5);
        const auto r = broadcast_analysis(v, m, 1.0, 54e6, 60, 5);
        CHECK(r.broadcast_degenerate);
        CHECK(r.lambda_broadcast == 0.0);
    }
    SUBCASE("no broadcast reduces to the dedicated model") {
        auto m = first_cached(v);
        const auto r = broadcast_analysis(v, m, 1.0, 54e6, 60, 5);
        const auto d = dedicated_stream_analysis(v, m, 1.0, 54e6, 60);
        CHECK(r.lambda_broadcast == d.lambda_dedicated);
        CHECK(r.avg_broadcast_rate == d.avg_stream_rate);
        CHECK(r.dedicated_capacity == d.supported_streams);
        CHECK(r.broadcast_blocking_prob == d.blocking_prob);
        CHECK(r.broadcast_overall_blocking == d.overall_blocking);
    }
    SUBCASE("cached, broadcast and neither") {
        auto m = first_cached(v);
        m.broadcast[1][0] = true;
        const auto r = broadcast_analysis(v, m, 1.0, 54e6, 60, 5);
        CHECK(r.lambda_broadcast == doctest::Approx(0.2));
        CHECK(r.broadcast_bandwidth == doctest::Approx(7.5e6));
        CHECK(r.avg_broadcast_rate == doctest::Approx(1.5e6));
        CHECK(r.dedicated_capacity == 31);  // floor(46.5 / 1.5)
        CHECK(r.broadcast_blocking_prob == doctest::Approx(oracle::erlang_b_direct(720.0, 31)));
    }
}
