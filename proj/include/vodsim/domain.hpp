#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

namespace vodsim {

/// Simulation clock unit. All event times are integral milliseconds since
/// the start of the run.
using Millis = std::chrono::milliseconds;

enum class VideoId : std::uint32_t {};
enum class ClientId : std::uint32_t {};
enum class LpsId : std::uint32_t {};

constexpr std::uint32_t to_int(VideoId v) noexcept { return static_cast<std::uint32_t>(v); }
constexpr std::uint32_t to_int(ClientId c) noexcept { return static_cast<std::uint32_t>(c); }
constexpr std::uint32_t to_int(LpsId l) noexcept { return static_cast<std::uint32_t>(l); }

struct Position {
    double x = 0.0;
    double y = 0.0;
};

constexpr double distance_squared(Position a, Position b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

struct QualityLevel {
    int q_index = 1;            // 1-based
    double stream_rate = 0.0;   // bits/second
    double size = 0.0;          // bits
    double request_prob = 0.0;
};

struct VideoSpec {
    VideoId id{};
    double length_minutes = 0.0;
    double consumption_rate = 0.0;  // Mbit/s
    double popularity = 0.0;        // probability the video is requested
    std::vector<QualityLevel> qualities;
};

/// Returns true when the video satisfies its structural invariants:
/// unique quality indices, positive rates and sizes, request
/// probabilities in [0,1] summing to one.
bool is_well_formed(const VideoSpec& video);

} // namespace vodsim
