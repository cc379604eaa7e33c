#pragma once

#include "vodsim/domain.hpp"

#include <vector>

namespace vodsim {

/// Cache (MF) and broadcast (X) flags per (video, quality). Entries are
/// aligned with the video list and each video's quality list.
struct PlacementMap {
    std::vector<std::vector<bool>> cached;
    std::vector<std::vector<bool>> broadcast;

    /// All-false map shaped like `videos`.
    static PlacementMap empty_for(const std::vector<VideoSpec>& videos);

    bool is_cached(std::size_t video, std::size_t quality) const {
        return cached[video][quality];
    }
    bool is_broadcast(std::size_t video, std::size_t quality) const {
        return !broadcast.empty() && broadcast[video][quality];
    }

    friend bool operator==(const PlacementMap&, const PlacementMap&) = default;
};

struct CapacityReport {
    double hit_ratio = 0.0;
    double lambda_dedicated = 0.0;     // requests/s that miss the cache
    double avg_stream_rate = 0.0;      // bits/s
    long supported_streams = 0;
    double blocking_prob = 0.0;
    double overall_blocking = 0.0;

    double broadcast_bandwidth = 0.0;  // bits/s
    double lambda_broadcast = 0.0;     // requests/s left for dedicated streams
    double avg_broadcast_rate = 0.0;   // bits/s
    long dedicated_capacity = 0;
    double broadcast_blocking_prob = 0.0;
    double broadcast_overall_blocking = 0.0;

    double mean_service_minutes = 0.0;
    /// Set when no request reaches the dedicated streams; rates and blocking
    /// are reported as zero.
    bool degenerate = false;
    bool broadcast_degenerate = false;
};

/// Popularity weight of one (video, quality) item.
double item_weight(const VideoSpec& video, std::size_t quality);

/// Greedy forwarder cache fill: items by descending weight (ties by video
/// id, then quality index), each taken if it still fits, otherwise skipped.
PlacementMap place_cache(const std::vector<VideoSpec>& videos, double cache_capacity_bits);

double hit_ratio(const std::vector<VideoSpec>& videos, const PlacementMap& placement);

/// Erlang-B loss probability for offered load `offered_load` (erlangs) on
/// `servers` servers, by the standard recurrence.
double erlang_b(double offered_load, long servers);

CapacityReport dedicated_stream_analysis(const std::vector<VideoSpec>& videos,
                                         const PlacementMap& placement, double lambda_per_sec,
                                         double bandwidth_bits, double mean_service_minutes);

/// Marks non-cached items for broadcast in descending weight while the
/// broadcast bandwidth (rate * lps_channels per item) fits `reserved`.
PlacementMap select_broadcast_videos(const std::vector<VideoSpec>& videos, PlacementMap placement,
                                     double reserved_broadcast_bits, int lps_channels);

/// Broadcast bandwidth consumed by the X flags.
double broadcast_bandwidth(const std::vector<VideoSpec>& videos, const PlacementMap& placement,
                           int lps_channels);

CapacityReport broadcast_analysis(const std::vector<VideoSpec>& videos,
                                  const PlacementMap& placement, double lambda_per_sec,
                                  double bandwidth_bits, double mean_service_minutes,
                                  int lps_channels);

} // namespace vodsim
