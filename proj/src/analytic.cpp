#include "vodsim/analytic.hpp"

#include <algorithm>
#include <cmath>

namespace vodsim {

namespace {

struct Item {
    std::size_t video;
    std::size_t quality;
    double weight;
    VideoId id;
    int q_index;
};

// Items in greedy order: heaviest first, then (video id, quality index).
std::vector<Item> stack_order(const std::vector<VideoSpec>& videos) {
    std::vector<Item> items;
    for (std::size_t k = 0; k < videos.size(); ++k) {
        for (std::size_t q = 0; q < videos[k].qualities.size(); ++q) {
            items.push_back({k, q, item_weight(videos[k], q), videos[k].id,
                             videos[k].qualities[q].q_index});
        }
    }
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.id != b.id) return a.id < b.id;
        return a.q_index < b.q_index;
    });
    return items;
}

// Shared tail of both analyses: stream count, Erlang-B, overall blocking.
struct Blocking {
    long streams = 0;
    double blocking = 0.0;
    double overall = 0.0;
};

Blocking blocking_for(double lambda, double lambda_stream, double avg_rate, double bandwidth,
                      double mean_service_minutes) {
    Blocking out;
    out.streams = avg_rate > 0.0 ? static_cast<long>(std::floor(std::max(0.0, bandwidth) / avg_rate))
                                 : 0;
    const double offered = lambda_stream * mean_service_minutes * 60.0;
    out.blocking = erlang_b(offered, out.streams);
    out.overall = lambda > 0.0 ? lambda_stream * out.blocking / lambda : 0.0;
    return out;
}

constexpr double kDegenerateMiss = 1e-12;

} // namespace

PlacementMap PlacementMap::empty_for(const std::vector<VideoSpec>& videos) {
    PlacementMap m;
    for (const auto& v : videos) {
        m.cached.emplace_back(v.qualities.size(), false);
        m.broadcast.emplace_back(v.qualities.size(), false);
    }
    return m;
}

double item_weight(const VideoSpec& video, std::size_t quality) {
    return video.popularity * video.qualities[quality].request_prob;
}

PlacementMap place_cache(const std::vector<VideoSpec>& videos, double cache_capacity_bits) {
    PlacementMap map = PlacementMap::empty_for(videos);
    double remaining = cache_capacity_bits;
    for (const auto& item : stack_order(videos)) {
        const double size = videos[item.video].qualities[item.quality].size;
        if (size <= remaining) {
            map.cached[item.video][item.quality] = true;
            remaining -= size;
        }
    }
    return map;
}

double hit_ratio(const std::vector<VideoSpec>& videos, const PlacementMap& placement) {
    double hits = 0.0;
    for (std::size_t k = 0; k < videos.size(); ++k) {
        for (std::size_t q = 0; q < videos[k].qualities.size(); ++q) {
            if (placement.is_cached(k, q)) hits += item_weight(videos[k], q);
        }
    }
    return hits;
}

double erlang_b(double offered_load, long servers) {
    double b = 1.0;
    for (long n = 1; n <= servers; ++n) {
        b = offered_load * b / (static_cast<double>(n) + offered_load * b);
    }
    return b;
}

CapacityReport dedicated_stream_analysis(const std::vector<VideoSpec>& videos,
                                         const PlacementMap& placement, double lambda_per_sec,
                                         double bandwidth_bits, double mean_service_minutes) {
    CapacityReport r;
    r.mean_service_minutes = mean_service_minutes;
    r.hit_ratio = hit_ratio(videos, placement);

    const double miss = 1.0 - r.hit_ratio;
    if (miss <= kDegenerateMiss || lambda_per_sec <= 0.0) {
        r.degenerate = true;
        return r;
    }
    r.lambda_dedicated = lambda_per_sec * miss;

    double weighted_rate = 0.0;
    for (std::size_t k = 0; k < videos.size(); ++k) {
        for (std::size_t q = 0; q < videos[k].qualities.size(); ++q) {
            if (!placement.is_cached(k, q)) {
                weighted_rate += item_weight(videos[k], q) * videos[k].qualities[q].stream_rate;
            }
        }
    }
    r.avg_stream_rate = lambda_per_sec / r.lambda_dedicated * weighted_rate;

    const auto b = blocking_for(lambda_per_sec, r.lambda_dedicated, r.avg_stream_rate,
                                bandwidth_bits, mean_service_minutes);
    r.supported_streams = b.streams;
    r.blocking_prob = b.blocking;
    r.overall_blocking = b.overall;
    return r;
}

double broadcast_bandwidth(const std::vector<VideoSpec>& videos, const PlacementMap& placement,
                           int lps_channels) {
    double total = 0.0;
    for (std::size_t k = 0; k < videos.size(); ++k) {
        for (std::size_t q = 0; q < videos[k].qualities.size(); ++q) {
            if (!placement.is_cached(k, q) && placement.is_broadcast(k, q)) {
                total += videos[k].qualities[q].stream_rate * lps_channels;
            }
        }
    }
    return total;
}

PlacementMap select_broadcast_videos(const std::vector<VideoSpec>& videos, PlacementMap placement,
                                     double reserved_broadcast_bits, int lps_channels) {
    placement.broadcast.clear();
    for (const auto& v : videos) placement.broadcast.emplace_back(v.qualities.size(), false);

    double used = 0.0;
    for (const auto& item : stack_order(videos)) {
        if (placement.is_cached(item.video, item.quality)) continue;
        const double need = videos[item.video].qualities[item.quality].stream_rate * lps_channels;
        if (used + need <= reserved_broadcast_bits) {
            placement.broadcast[item.video][item.quality] = true;
            used += need;
        }
    }
    return placement;
}

CapacityReport broadcast_analysis(const std::vector<VideoSpec>& videos,
                                  const PlacementMap& placement, double lambda_per_sec,
                                  double bandwidth_bits, double mean_service_minutes,
                                  int lps_channels) {
    CapacityReport r = dedicated_stream_analysis(videos, placement, lambda_per_sec, bandwidth_bits,
                                                 mean_service_minutes);
    r.broadcast_bandwidth = broadcast_bandwidth(videos, placement, lps_channels);

    double broadcast_hits = 0.0;
    double weighted_rate = 0.0;
    for (std::size_t k = 0; k < videos.size(); ++k) {
        for (std::size_t q = 0; q < videos[k].qualities.size(); ++q) {
            if (placement.is_cached(k, q)) continue;
            const double w = item_weight(videos[k], q);
            if (placement.is_broadcast(k, q)) {
                broadcast_hits += w;
            } else {
                weighted_rate += w * videos[k].qualities[q].stream_rate;
            }
        }
    }
    const double miss = 1.0 - r.hit_ratio - broadcast_hits;
    if (miss <= kDegenerateMiss || lambda_per_sec <= 0.0) {
        r.broadcast_degenerate = true;
        return r;
    }
    r.lambda_broadcast = lambda_per_sec * miss;
    r.avg_broadcast_rate = lambda_per_sec / r.lambda_broadcast * weighted_rate;

    const auto b = blocking_for(lambda_per_sec, r.lambda_broadcast, r.avg_broadcast_rate,
                                bandwidth_bits - r.broadcast_bandwidth, mean_service_minutes);
    r.dedicated_capacity = b.streams;
    r.broadcast_blocking_prob = b.blocking;
    r.broadcast_overall_blocking = b.overall;
    return r;
}

} // namespace vodsim
