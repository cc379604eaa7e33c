#pragma once

#include "vodsim/domain.hpp"

#include <vector>

namespace vodsim {

/// Staggered broadcast timetable for one video. Channel i (1-based) starts
/// segment 1 at epoch + (i-1)*D + m*K*D for every m >= 0 and then plays
/// segments 2..K back to back.
struct BroadcastPlan {
    VideoId video_id{};
    int channels = 0;
    Millis segment_duration{0};
    Millis epoch{0};
    std::vector<Millis> channel_offsets;
    Millis cycle{0};
};

struct SlotStart {
    int channel = 0;  // 1-based
    Millis wait{0};
};

/// V/K in milliseconds; throws Error(NonDivisible) when V ms is not an exact
/// multiple of K.
Millis segment_duration(double video_length_minutes, int channels);

/// Largest K with rate * K * num_videos <= bandwidth (0 if none).
int max_channels(double bandwidth_mbps, double transmission_rate_mbps, int num_videos);

BroadcastPlan build_plan(const VideoSpec& video, int channels, Millis epoch);

/// Next segment-1 start at or after t. wait is in [0, D).
SlotStart next_first_segment_start(const BroadcastPlan& plan, Millis t);

/// Segment (1..K) that `channel` is broadcasting at t; throws
/// Error(BeforeStart) if the channel has not started yet.
int current_segment(const BroadcastPlan& plan, int channel, Millis t);

/// Channel whose segment-1 broadcast contains t (the slot that began within
/// the last D ms).
int channel_in_first_segment(const BroadcastPlan& plan, Millis t);

} // namespace vodsim
