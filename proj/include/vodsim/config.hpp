#pragma once

#include "vodsim/domain.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vodsim {

/// One service area's simulation parameters. Minute- and megabit-denominated
/// fields are user-facing; the engine converts them to milliseconds and bits
/// once when a run is constructed.
struct SimConfig {
    double bandwidth_mbps = 54.0;
    int channels = 5;
    double video_length_minutes = 60.0;
    double consumption_rate_mbps = 1.5;
    double arrival_rate_per_min = 6.0;
    int num_videos = 5;
    int num_lps = 2;
    int lps_capacity = 20;
    double lf_radius_m = 100.0;
    double client_range_m = 30.0;
    double msg_latency_ms = 20.0;
    double random_cache_prob = 0.5;
    std::uint64_t seed = 1;
    double horizon_minutes = 2000.0;
    /// Unset means 10% of the horizon.
    std::optional<double> warmup_minutes;

    /// Rate at which a stationary cache (LPS or forwarder RAM pool) pushes
    /// the missed first-segment prefix to a late client.
    double proxy_rate_mbps = 54.0;
    /// Rate at which a mobile neighbour streams the prefix. Defaults to the
    /// playback rate.
    double peer_rate_mbps = 1.5;
    /// Video popularity follows Zipf(s) over video ids 1..num_videos.
    double zipf_exponent = 1.0;

    // Capacity-model inputs (used by `analyze`).
    double cache_capacity_mbit = 10800.0;
    double reserved_broadcast_mbps = 7.5;
    int lps_channels = 5;
    std::vector<double> quality_rates_mbps{1.5};
    std::vector<double> quality_probs{1.0};

    double effective_warmup_minutes() const {
        return warmup_minutes.value_or(0.1 * horizon_minutes);
    }
};

struct Violation {
    std::string key;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every violated constraint, in a fixed order. Empty means valid.
std::vector<Violation> validate_config(const SimConfig& cfg);

/// Parses `key = value` lines. `#` starts a comment. Keys are SimConfig
/// field names; lists are comma-separated. Throws Error(ConfigParse) on
/// unknown keys or malformed values. Does not validate.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_string(const std::string& text);
SimConfig load_config(const std::string& path);

/// Serializes back to the same text format, one key per line.
std::string dump_config(const SimConfig& cfg);

/// Zipf popularities for `count` videos, normalized to sum to one.
std::vector<double> zipf_popularity(int count, double exponent);

/// The video catalog implied by a configuration: ids 1..num_videos with
/// Zipf popularity and the configured quality ladder.
std::vector<VideoSpec> make_catalog(const SimConfig& cfg);

/// Converts minutes to integral milliseconds. Returns nullopt if the value
/// is not a whole number of milliseconds.
std::optional<Millis> minutes_to_ms(double minutes);

} // namespace vodsim
