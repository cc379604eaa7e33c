#include "vodsim/sb_scheduler.hpp"

#include "vodsim/config.hpp"
#include "vodsim/errors.hpp"

#include <fmt/format.h>

#include <cmath>

namespace vodsim {

namespace {

void require_started(const BroadcastPlan& plan, Millis t) {
    if (t < plan.epoch) {
        throw Error(ErrorCode::BeforeStart,
                    fmt::format("t = {} ms precedes plan epoch {} ms", t.count(),
                                plan.epoch.count()));
    }
}

} // namespace

Millis segment_duration(double video_length_minutes, int channels) {
    if (channels < 1) {
        throw Error(ErrorCode::ConfigInvalid, "channel count must be at least 1");
    }
    const auto length = minutes_to_ms(video_length_minutes);
    if (!length || length->count() <= 0) {
        throw Error(ErrorCode::NonDivisible,
                    fmt::format("video length {} min is not a positive whole number of ms",
                                video_length_minutes));
    }
    if (length->count() % channels != 0) {
        throw Error(ErrorCode::NonDivisible,
                    fmt::format("{} ms is not divisible into {} segments", length->count(),
                                channels));
    }
    return *length / channels;
}

int max_channels(double bandwidth_mbps, double transmission_rate_mbps, int num_videos) {
    const double per_channel = transmission_rate_mbps * num_videos;
    if (per_channel <= 0.0 || bandwidth_mbps <= 0.0) return 0;
    auto k = static_cast<int>(std::floor(bandwidth_mbps / per_channel));
    // The quotient can land one ulp on the wrong side of an integer.
    while (transmission_rate_mbps * (k + 1) * num_videos <= bandwidth_mbps) ++k;
    while (k > 0 && transmission_rate_mbps * k * num_videos > bandwidth_mbps) --k;
    return k;
}

BroadcastPlan build_plan(const VideoSpec& video, int channels, Millis epoch) {
    BroadcastPlan plan;
    plan.video_id = video.id;
    plan.channels = channels;
    plan.segment_duration = segment_duration(video.length_minutes, channels);
    plan.epoch = epoch;
    plan.channel_offsets.reserve(static_cast<std::size_t>(channels));
    for (int i = 0; i < channels; ++i) plan.channel_offsets.push_back(i * plan.segment_duration);
    plan.cycle = channels * plan.segment_duration;
    return plan;
}

SlotStart next_first_segment_start(const BroadcastPlan& plan, Millis t) {
    require_started(plan, t);
    const Millis d = plan.segment_duration;
    const Millis wait = (d - (t - plan.epoch) % d) % d;
    const auto slot_index = (t + wait - plan.epoch) / d;
    return {static_cast<int>(slot_index % plan.channels) + 1, wait};
}

int current_segment(const BroadcastPlan& plan, int channel, Millis t) {
    if (channel < 1 || channel > plan.channels) {
        throw Error(ErrorCode::BeforeStart, fmt::format("no channel {}", channel));
    }
    const Millis start = plan.epoch + plan.channel_offsets[static_cast<std::size_t>(channel - 1)];
    if (t < start) {
        throw Error(ErrorCode::BeforeStart,
                    fmt::format("channel {} starts at {} ms, asked at {} ms", channel,
                                start.count(), t.count()));
    }
    return 1 + static_cast<int>(((t - start) % plan.cycle) / plan.segment_duration);
}

int channel_in_first_segment(const BroadcastPlan& plan, Millis t) {
    require_started(plan, t);
    const auto slot_index = (t - plan.epoch) / plan.segment_duration;
    return static_cast<int>(slot_index % plan.channels) + 1;
}

} // namespace vodsim
