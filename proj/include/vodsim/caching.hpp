#pragma once

#include "vodsim/balancer.hpp"
#include "vodsim/domain.hpp"
#include "vodsim/random.hpp"
#include "vodsim/sb_scheduler.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace vodsim {

enum class SchemeId { NoCache, AllCache, RandomCache, DscCache, PoRCache, ProxyCache };

/// CLI names: nocache, all, random, dsc, por, proxy.
std::string_view to_string(SchemeId scheme);
std::optional<SchemeId> parse_scheme(std::string_view name);
std::span<const SchemeId> all_schemes();

// ---------------------------------------------------------------------------
// Acquisition outcomes

namespace source {
struct ChannelSlot {
    int channel = 0;
    friend bool operator==(const ChannelSlot&, const ChannelSlot&) = default;
};
struct Neighbor {
    ClientId holder{};
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};
struct Relay {
    ClientId via{};
    ClientId holder{};
    friend bool operator==(const Relay&, const Relay&) = default;
};
struct PoR {
    friend bool operator==(const PoR&, const PoR&) = default;
};
struct Lps {
    LpsId lps{};
    friend bool operator==(const Lps&, const Lps&) = default;
};
} // namespace source

using Source = std::variant<source::ChannelSlot, source::Neighbor, source::Relay, source::PoR,
                            source::Lps>;

/// Index of the alternative in Source; used for outcome histograms.
enum class SourceKind { ChannelSlot = 0, Neighbor, Relay, PoR, Lps };
inline constexpr std::size_t kSourceKinds = 5;
SourceKind kind_of(const Source& s);
std::string_view to_string(SourceKind kind);

struct AcquisitionOutcome {
    Source source = source::ChannelSlot{};
    Millis startup_delay{0};
    /// A cache attempt was made and the client fell back to the next slot.
    bool failed = false;
    /// Control/first-packet hops charged into startup_delay.
    int hops = 0;
    /// Time spent queued at the RAM pool or proxy.
    Millis queue_wait{0};

    friend bool operator==(const AcquisitionOutcome&, const AcquisitionOutcome&) = default;
};

// ---------------------------------------------------------------------------
// World state offered to a strategy

struct PeerState {
    ClientId id{};
    Position position;
    VideoId video{};
    bool holder = false;     // holds segment 1 of `video`
    bool uploading = false;  // currently serving segment 1 to someone

    friend bool operator==(const PeerState&, const PeerState&) = default;
};

/// Present clients bucketed on a uniform grid so range queries touch only
/// nearby cells.
class PeerIndex {
public:
    explicit PeerIndex(double cell_size);

    void insert(const PeerState& peer);
    void erase(ClientId id);
    void set_holder(ClientId id, bool holder);
    void set_uploading(ClientId id, bool uploading);

    const PeerState* find(ClientId id) const;
    std::size_t size() const noexcept { return peers_.size(); }

    /// Calls fn(const PeerState&) for every peer within `radius` of p
    /// (inclusive). Visit order is unspecified.
    template <typename F>
    void for_each_within(Position p, double radius, F&& fn) const {
        const double r2 = radius * radius;
        const auto [x0, y0] = cell_of({p.x - radius, p.y - radius});
        const auto [x1, y1] = cell_of({p.x + radius, p.y + radius});
        for (auto cx = x0; cx <= x1; ++cx) {
            for (auto cy = y0; cy <= y1; ++cy) {
                const auto it = cells_.find(key(cx, cy));
                if (it == cells_.end()) continue;
                for (ClientId id : it->second) {
                    const PeerState& peer = peers_.at(id);
                    if (distance_squared(peer.position, p) <= r2) fn(peer);
                }
            }
        }
    }

    template <typename F>
    void for_each(F&& fn) const {
        for (const auto& [id, peer] : peers_) fn(peer);
    }

private:
    std::pair<std::int64_t, std::int64_t> cell_of(Position p) const;
    static std::int64_t key(std::int64_t cx, std::int64_t cy) noexcept;

    double cell_size_;
    std::unordered_map<ClientId, PeerState> peers_;
    std::unordered_map<std::int64_t, std::vector<ClientId>> cells_;
};

/// A FIFO bank of identical servers with deterministic service times.
/// Tracking each server's release time is enough to project the grant time
/// of the next arrival exactly.
class SlotPool {
public:
    explicit SlotPool(int capacity);

    int capacity() const noexcept { return static_cast<int>(free_at_.size()); }
    /// Earliest instant >= now at which a server is free.
    Millis projected_grant(Millis now) const;
    /// Occupies the earliest-free server until `until`.
    void reserve(Millis now, Millis until);
    /// Servers occupied at instant t.
    int busy_at(Millis t) const;

private:
    std::vector<Millis> free_at_;
};

struct CachingParams {
    double client_range_m = 30.0;
    Millis msg_latency{20};
    double random_cache_prob = 0.5;
};

/// Read-only snapshot handed to a strategy. Every pointer/span refers to
/// engine state that is not mutated during the call.
struct WorldView {
    Millis now{0};
    const PeerIndex* peers = nullptr;
    const LpsTable* lps_table = nullptr;
    /// Aligned with lps_table->entries().
    std::span<const SlotPool> lps_pools;
    const SlotPool* por_pool = nullptr;
    std::span<const BroadcastPlan> plans;
    CachingParams params;

    /// Throws Error(UnknownVideo).
    const BroadcastPlan& plan_for(VideoId video) const;
    std::size_t present_clients() const { return peers ? peers->size() : 0; }
};

struct ClientRequest {
    ClientId id{};
    Position position;
    Millis arrival{0};
};

/// Decides where a late client gets segment 1 and how long it waits for
/// first playable data. Pure given the world; never mutates it.
AcquisitionOutcome acquire_first_segment(SchemeId scheme, const ClientRequest& client,
                                         VideoId video, const WorldView& world);

/// Whether a client that just started playback keeps segment 1 for others.
/// Only RandomCache consumes randomness.
bool on_playback_started(SchemeId scheme, const ClientRequest& client, VideoId video,
                         const WorldView& world, RandomSource& rng);

/// Nearest free holder of `video` within range of `around`, excluding
/// `self`. Ties on distance go to the smaller id.
std::optional<ClientId> nearest_free_holder(const PeerIndex& peers, Position around,
                                            double range, VideoId video, ClientId self);

} // namespace vodsim
