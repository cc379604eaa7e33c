#include "vodsim/config.hpp"

#include "vodsim/errors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string_view>

namespace vodsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void parse_fail(int line, std::string_view key, std::string_view value) {
    throw Error(ErrorCode::ConfigParse,
                fmt::format("line {}: invalid value '{}' for key '{}'", line, value, key));
}

template <typename T>
T parse_number(int line, std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) parse_fail(line, key, value);
    return out;
}

std::vector<double> parse_list(int line, std::string_view key, std::string_view value) {
    std::vector<double> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        const auto item = trim(value.substr(0, comma));
        if (item.empty()) parse_fail(line, key, value);
        out.push_back(parse_number<double>(line, key, item));
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    if (out.empty()) parse_fail(line, key, value);
    return out;
}

using Setter = std::function<void(SimConfig&, int, std::string_view, std::string_view)>;

template <typename T>
Setter number_field(T SimConfig::*member) {
    return [member](SimConfig& c, int line, std::string_view k, std::string_view v) {
        c.*member = parse_number<T>(line, k, v);
    };
}

Setter list_field(std::vector<double> SimConfig::*member) {
    return [member](SimConfig& c, int line, std::string_view k, std::string_view v) {
        c.*member = parse_list(line, k, v);
    };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"bandwidth_mbps", number_field(&SimConfig::bandwidth_mbps)},
        {"channels", number_field(&SimConfig::channels)},
        {"video_length_minutes", number_field(&SimConfig::video_length_minutes)},
        {"consumption_rate_mbps", number_field(&SimConfig::consumption_rate_mbps)},
        {"arrival_rate_per_min", number_field(&SimConfig::arrival_rate_per_min)},
        {"num_videos", number_field(&SimConfig::num_videos)},
        {"num_lps", number_field(&SimConfig::num_lps)},
        {"lps_capacity", number_field(&SimConfig::lps_capacity)},
        {"lf_radius_m", number_field(&SimConfig::lf_radius_m)},
        {"client_range_m", number_field(&SimConfig::client_range_m)},
        {"msg_latency_ms", number_field(&SimConfig::msg_latency_ms)},
        {"random_cache_prob", number_field(&SimConfig::random_cache_prob)},
        {"seed", number_field(&SimConfig::seed)},
        {"horizon_minutes", number_field(&SimConfig::horizon_minutes)},
        {"warmup_minutes",
         [](SimConfig& c, int line, std::string_view k, std::string_view v) {
             c.warmup_minutes = parse_number<double>(line, k, v);
         }},
        {"proxy_rate_mbps", number_field(&SimConfig::proxy_rate_mbps)},
        {"peer_rate_mbps", number_field(&SimConfig::peer_rate_mbps)},
        {"zipf_exponent", number_field(&SimConfig::zipf_exponent)},
        {"cache_capacity_mbit", number_field(&SimConfig::cache_capacity_mbit)},
        {"reserved_broadcast_mbps", number_field(&SimConfig::reserved_broadcast_mbps)},
        {"lps_channels", number_field(&SimConfig::lps_channels)},
        {"quality_rates_mbps", list_field(&SimConfig::quality_rates_mbps)},
        {"quality_probs", list_field(&SimConfig::quality_probs)},
    };
    return table;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += fmt::format("{}", xs[i]);
    }
    return out;
}

} // namespace

std::optional<Millis> minutes_to_ms(double minutes) {
    if (!std::isfinite(minutes)) return std::nullopt;
    const double ms = minutes * 60000.0;
    const double rounded = std::round(ms);
    if (std::abs(ms - rounded) > 1e-6) return std::nullopt;
    return Millis{static_cast<Millis::rep>(rounded)};
}

std::vector<Violation> validate_config(const SimConfig& cfg) {
    std::vector<Violation> out;
    auto require = [&out](bool ok, std::string key, std::string message) {
        if (!ok) out.push_back({std::move(key), std::move(message)});
    };

    require(cfg.bandwidth_mbps > 0.0, "bandwidth_mbps", "bandwidth must be positive");
    require(cfg.channels >= 1, "channels", "channels must be at least 1");
    require(cfg.video_length_minutes > 0.0, "video_length_minutes",
            "video length must be positive");
    require(cfg.consumption_rate_mbps > 0.0, "consumption_rate_mbps",
            "consumption rate must be positive");
    require(cfg.arrival_rate_per_min > 0.0, "arrival_rate_per_min",
            "arrival rate must be positive");
    require(cfg.num_videos >= 1, "num_videos", "num_videos must be at least 1");
    require(cfg.num_lps >= 1, "num_lps", "num_lps must be at least 1");
    require(cfg.lps_capacity >= 1, "lps_capacity", "lps_capacity must be at least 1");
    require(cfg.lf_radius_m > 0.0, "lf_radius_m", "service-area radius must be positive");
    require(cfg.client_range_m > 0.0, "client_range_m", "client range must be positive");
    require(cfg.msg_latency_ms >= 0.0 && std::isfinite(cfg.msg_latency_ms), "msg_latency_ms",
            "message latency must be non-negative");
    require(std::floor(cfg.msg_latency_ms) == cfg.msg_latency_ms, "msg_latency_ms",
            "message latency must be a whole number of milliseconds");
    require(cfg.random_cache_prob >= 0.0 && cfg.random_cache_prob <= 1.0, "random_cache_prob",
            "random_cache_prob must lie in [0,1]");
    require(cfg.horizon_minutes > 0.0, "horizon_minutes", "horizon must be positive");
    const double warmup = cfg.effective_warmup_minutes();
    require(warmup >= 0.0 && warmup <= cfg.horizon_minutes, "warmup_minutes",
            "warmup must lie in [0, horizon]");
    // Prefix transfers must keep up with playback.
    require(cfg.proxy_rate_mbps >= cfg.consumption_rate_mbps, "proxy_rate_mbps",
            "proxy rate must be at least the consumption rate");
    require(cfg.peer_rate_mbps >= cfg.consumption_rate_mbps, "peer_rate_mbps",
            "peer rate must be at least the consumption rate");
    require(cfg.zipf_exponent >= 0.0, "zipf_exponent", "zipf exponent must be non-negative");
    require(cfg.cache_capacity_mbit >= 0.0, "cache_capacity_mbit",
            "cache capacity must be non-negative");
    require(cfg.reserved_broadcast_mbps >= 0.0, "reserved_broadcast_mbps",
            "reserved broadcast bandwidth must be non-negative");
    require(cfg.lps_channels >= 1, "lps_channels", "lps_channels must be at least 1");

    // Broadcast feasibility: every video's K channels must fit in the link.
    if (cfg.bandwidth_mbps > 0.0 && cfg.channels >= 1 && cfg.num_videos >= 1) {
        const double needed = cfg.consumption_rate_mbps * cfg.channels * cfg.num_videos;
        require(needed <= cfg.bandwidth_mbps, "broadcast_capacity",
                fmt::format("consumption_rate * channels * num_videos = {} exceeds bandwidth {}",
                            needed, cfg.bandwidth_mbps));
    }

    const auto length_ms = minutes_to_ms(cfg.video_length_minutes);
    require(length_ms.has_value(), "video_length_minutes",
            "video length must be a whole number of milliseconds");
    if (length_ms && cfg.channels >= 1 && cfg.video_length_minutes > 0.0) {
        require(length_ms->count() % cfg.channels == 0, "channels",
                "video length in ms must be divisible by the channel count");
    }

    require(!cfg.quality_rates_mbps.empty() &&
                cfg.quality_rates_mbps.size() == cfg.quality_probs.size(),
            "quality_probs", "quality_rates_mbps and quality_probs must have equal length");
    bool rates_ok = true;
    for (double r : cfg.quality_rates_mbps) rates_ok = rates_ok && r > 0.0;
    require(rates_ok, "quality_rates_mbps", "quality rates must be positive");
    double prob_sum = 0.0;
    bool probs_ok = true;
    for (double p : cfg.quality_probs) {
        probs_ok = probs_ok && p >= 0.0 && p <= 1.0;
        prob_sum += p;
    }
    require(probs_ok && std::abs(prob_sum - 1.0) <= 1e-9, "quality_probs",
            "quality probabilities must lie in [0,1] and sum to 1");
    return out;
}

SimConfig parse_config(std::istream& in) {
    SimConfig cfg;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ConfigParse,
                        fmt::format("line {}: expected 'key = value'", line_no));
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw Error(ErrorCode::ConfigParse,
                        fmt::format("line {}: unknown key '{}'", line_no, key));
        }
        if (value.empty()) parse_fail(line_no, key, value);
        it->second(cfg, line_no, key, value);
    }
    return cfg;
}

SimConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open config file '{}'", path));
    return parse_config(in);
}

std::string dump_config(const SimConfig& cfg) {
    std::string out;
    auto put = [&out](std::string_view key, const auto& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    put("bandwidth_mbps", cfg.bandwidth_mbps);
    put("channels", cfg.channels);
    put("video_length_minutes", cfg.video_length_minutes);
    put("consumption_rate_mbps", cfg.consumption_rate_mbps);
    put("arrival_rate_per_min", cfg.arrival_rate_per_min);
    put("num_videos", cfg.num_videos);
    put("num_lps", cfg.num_lps);
    put("lps_capacity", cfg.lps_capacity);
    put("lf_radius_m", cfg.lf_radius_m);
    put("client_range_m", cfg.client_range_m);
    put("msg_latency_ms", cfg.msg_latency_ms);
    put("random_cache_prob", cfg.random_cache_prob);
    put("seed", cfg.seed);
    put("horizon_minutes", cfg.horizon_minutes);
    if (cfg.warmup_minutes) put("warmup_minutes", *cfg.warmup_minutes);
    put("proxy_rate_mbps", cfg.proxy_rate_mbps);
    put("peer_rate_mbps", cfg.peer_rate_mbps);
    put("zipf_exponent", cfg.zipf_exponent);
    put("cache_capacity_mbit", cfg.cache_capacity_mbit);
    put("reserved_broadcast_mbps", cfg.reserved_broadcast_mbps);
    put("lps_channels", cfg.lps_channels);
    put("quality_rates_mbps", join(cfg.quality_rates_mbps));
    put("quality_probs", join(cfg.quality_probs));
    return out;
}

std::vector<double> zipf_popularity(int count, double exponent) {
    std::vector<double> w;
    if (count <= 0) return w;
    w.reserve(static_cast<std::size_t>(count));
    double total = 0.0;
    for (int k = 1; k <= count; ++k) {
        w.push_back(1.0 / std::pow(static_cast<double>(k), exponent));
        total += w.back();
    }
    for (double& x : w) x /= total;
    return w;
}

std::vector<VideoSpec> make_catalog(const SimConfig& cfg) {
    const auto popularity = zipf_popularity(cfg.num_videos, cfg.zipf_exponent);
    const double seconds = cfg.video_length_minutes * 60.0;
    std::vector<VideoSpec> videos;
    for (int k = 0; k < cfg.num_videos; ++k) {
        VideoSpec v;
        v.id = VideoId{static_cast<std::uint32_t>(k + 1)};
        v.length_minutes = cfg.video_length_minutes;
        v.consumption_rate = cfg.consumption_rate_mbps;
        v.popularity = popularity[static_cast<std::size_t>(k)];
        for (std::size_t q = 0; q < cfg.quality_rates_mbps.size(); ++q) {
            const double rate = cfg.quality_rates_mbps[q] * 1e6;
            const double prob = q < cfg.quality_probs.size() ? cfg.quality_probs[q] : 0.0;
            v.qualities.push_back({static_cast<int>(q + 1), rate, rate * seconds, prob});
        }
        videos.push_back(std::move(v));
    }
    return videos;
}

} // namespace vodsim
