#include "vodsim/caching.hpp"

#include "vodsim/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace vodsim {

namespace {

constexpr std::array kSchemes = {SchemeId::NoCache,  SchemeId::AllCache, SchemeId::RandomCache,
                                 SchemeId::DscCache, SchemeId::PoRCache, SchemeId::ProxyCache};

// Hop counts charged per outcome. A probe and a first packet each cost one
// message latency.
constexpr int kNeighborHops = 2;      // probe, first packet
constexpr int kRelayHops = 3;         // probe, relay probe, first packet
constexpr int kPoolHops = 2;          // request to forwarder pool, first packet
constexpr int kProxyHops = 3;         // ask forwarder, request proxy, first packet
constexpr int kNeighborFailHops = 1;  // one unanswered probe
constexpr int kRelayFailHops = 2;     // direct probe and relay probe

std::optional<ClientId> nearest_holder_excluding(const PeerIndex& peers, Position around,
                                                 double range, VideoId video, ClientId a,
                                                 ClientId b) {
    std::optional<ClientId> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    peers.for_each_within(around, range, [&](const PeerState& p) {
        if (p.id == a || p.id == b || p.video != video || !p.holder || p.uploading) return;
        const double d2 = distance_squared(p.position, around);
        if (d2 < best_d2 || (d2 == best_d2 && p.id < *best)) {
            best_d2 = d2;
            best = p.id;
        }
    });
    return best;
}

AcquisitionOutcome fall_back(const WorldView& world, const BroadcastPlan& plan, int hops) {
    const auto slot = next_first_segment_start(plan, world.now);
    AcquisitionOutcome out;
    out.source = source::ChannelSlot{slot.channel};
    out.startup_delay = slot.wait + hops * world.params.msg_latency;
    out.failed = true;
    out.hops = hops;
    return out;
}

AcquisitionOutcome from_neighbour(const ClientRequest& client, VideoId video,
                                  const WorldView& world, const BroadcastPlan& plan,
                                  bool allow_relay) {
    const double range = world.params.client_range_m;
    const Millis hop = world.params.msg_latency;
    const PeerIndex& peers = *world.peers;

    if (auto holder = nearest_holder_excluding(peers, client.position, range, video, client.id,
                                               client.id)) {
        return {source::Neighbor{*holder}, kNeighborHops * hop, false, kNeighborHops, Millis{0}};
    }
    if (!allow_relay) return fall_back(world, plan, kNeighborFailHops);

    struct Candidate {
        double d2;
        ClientId id;
        Position pos;
    };
    std::vector<Candidate> relays;
    peers.for_each_within(client.position, range, [&](const PeerState& p) {
        if (p.id == client.id || p.uploading) return;
        relays.push_back({distance_squared(p.position, client.position), p.id, p.position});
    });
    std::sort(relays.begin(), relays.end(), [](const Candidate& a, const Candidate& b) {
        return a.d2 != b.d2 ? a.d2 < b.d2 : a.id < b.id;
    });
    for (const auto& z : relays) {
        if (auto holder = nearest_holder_excluding(peers, z.pos, range, video, client.id, z.id)) {
            return {source::Relay{z.id, *holder}, kRelayHops * hop, false, kRelayHops, Millis{0}};
        }
    }
    return fall_back(world, plan, kRelayFailHops);
}

AcquisitionOutcome from_pool(const WorldView& world, const BroadcastPlan& plan,
                             const SlotPool& pool, Source granted, int hops) {
    const auto slot = next_first_segment_start(plan, world.now);
    const Millis queue_wait = pool.projected_grant(world.now) - world.now;
    if (queue_wait > slot.wait) return fall_back(world, plan, hops);
    AcquisitionOutcome out;
    out.source = granted;
    out.startup_delay = hops * world.params.msg_latency + queue_wait;
    out.hops = hops;
    out.queue_wait = queue_wait;
    return out;
}

} // namespace

std::string_view to_string(SchemeId scheme) {
    switch (scheme) {
    case SchemeId::NoCache: return "nocache";
    case SchemeId::AllCache: return "all";
    case SchemeId::RandomCache: return "random";
    case SchemeId::DscCache: return "dsc";
    case SchemeId::PoRCache: return "por";
    case SchemeId::ProxyCache: return "proxy";
    }
    return "unknown";
}

std::optional<SchemeId> parse_scheme(std::string_view name) {
    for (auto s : kSchemes) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

std::span<const SchemeId> all_schemes() { return kSchemes; }

SourceKind kind_of(const Source& s) { return static_cast<SourceKind>(s.index()); }

std::string_view to_string(SourceKind kind) {
    switch (kind) {
    case SourceKind::ChannelSlot: return "channel_slot";
    case SourceKind::Neighbor: return "neighbor";
    case SourceKind::Relay: return "relay";
    case SourceKind::PoR: return "por";
    case SourceKind::Lps: return "lps";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

PeerIndex::PeerIndex(double cell_size) : cell_size_(cell_size > 0.0 ? cell_size : 1.0) {}

std::pair<std::int64_t, std::int64_t> PeerIndex::cell_of(Position p) const {
    return {static_cast<std::int64_t>(std::floor(p.x / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.y / cell_size_))};
}

std::int64_t PeerIndex::key(std::int64_t cx, std::int64_t cy) noexcept {
    return (cx << 32) ^ (cy & 0xFFFFFFFF);
}

void PeerIndex::insert(const PeerState& peer) {
    if (!peers_.emplace(peer.id, peer).second) {
        throw Error(ErrorCode::SimulationFault,
                    fmt::format("client {} already present", to_int(peer.id)));
    }
    const auto [cx, cy] = cell_of(peer.position);
    cells_[key(cx, cy)].push_back(peer.id);
}

void PeerIndex::erase(ClientId id) {
    const auto it = peers_.find(id);
    if (it == peers_.end()) return;
    const auto [cx, cy] = cell_of(it->second.position);
    auto& bucket = cells_[key(cx, cy)];
    std::erase(bucket, id);
    if (bucket.empty()) cells_.erase(key(cx, cy));
    peers_.erase(it);
}

void PeerIndex::set_holder(ClientId id, bool holder) {
    if (auto it = peers_.find(id); it != peers_.end()) it->second.holder = holder;
}

void PeerIndex::set_uploading(ClientId id, bool uploading) {
    if (auto it = peers_.find(id); it != peers_.end()) it->second.uploading = uploading;
}

const PeerState* PeerIndex::find(ClientId id) const {
    const auto it = peers_.find(id);
    return it == peers_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------

SlotPool::SlotPool(int capacity) : free_at_(static_cast<std::size_t>(std::max(capacity, 0))) {}

Millis SlotPool::projected_grant(Millis now) const {
    if (free_at_.empty()) return Millis::max();
    return std::max(now, *std::min_element(free_at_.begin(), free_at_.end()));
}

void SlotPool::reserve(Millis now, Millis until) {
    if (free_at_.empty()) throw Error(ErrorCode::SimulationFault, "reserve on empty pool");
    auto it = std::min_element(free_at_.begin(), free_at_.end());
    if (until < std::max(now, *it)) {
        throw Error(ErrorCode::SimulationFault, "pool reservation ends before its grant");
    }
    *it = until;
}

int SlotPool::busy_at(Millis t) const {
    return static_cast<int>(
        std::count_if(free_at_.begin(), free_at_.end(), [t](Millis f) { return f > t; }));
}

// ---------------------------------------------------------------------------

const BroadcastPlan& WorldView::plan_for(VideoId video) const {
    for (const auto& p : plans) {
        if (p.video_id == video) return p;
    }
    throw Error(ErrorCode::UnknownVideo, fmt::format("no broadcast plan for video {}", to_int(video)));
}

std::optional<ClientId> nearest_free_holder(const PeerIndex& peers, Position around, double range,
                                            VideoId video, ClientId self) {
    return nearest_holder_excluding(peers, around, range, video, self, self);
}

AcquisitionOutcome acquire_first_segment(SchemeId scheme, const ClientRequest& client,
                                         VideoId video, const WorldView& world) {
    const BroadcastPlan& plan = world.plan_for(video);
    const auto slot = next_first_segment_start(plan, world.now);
    if (scheme == SchemeId::NoCache || slot.wait == Millis{0}) {
        return {source::ChannelSlot{slot.channel}, slot.wait, false, 0, Millis{0}};
    }

    switch (scheme) {
    case SchemeId::AllCache:
    case SchemeId::RandomCache:
        if (world.peers == nullptr) return fall_back(world, plan, kNeighborFailHops);
        return from_neighbour(client, video, world, plan, false);
    case SchemeId::DscCache:
        if (world.peers == nullptr) return fall_back(world, plan, kRelayFailHops);
        return from_neighbour(client, video, world, plan, true);
    case SchemeId::PoRCache:
        if (world.por_pool == nullptr) {
            throw Error(ErrorCode::SimulationFault, "RAM pool missing from world view");
        }
        return from_pool(world, plan, *world.por_pool, source::PoR{}, kPoolHops);
    case SchemeId::ProxyCache: {
        if (world.lps_table == nullptr || world.lps_pools.size() != world.lps_table->size()) {
            throw Error(ErrorCode::SimulationFault, "proxy table missing from world view");
        }
        const LpsId lps = world.lps_table->assign_lps();
        const auto entries = world.lps_table->entries();
        const auto idx = static_cast<std::size_t>(
            std::find_if(entries.begin(), entries.end(),
                         [lps](const LpsEntry& e) { return e.id == lps; }) -
            entries.begin());
        return from_pool(world, plan, world.lps_pools[idx], source::Lps{lps}, kProxyHops);
    }
    case SchemeId::NoCache:
        break;
    }
    return {source::ChannelSlot{slot.channel}, slot.wait, false, 0, Millis{0}};
}

bool on_playback_started(SchemeId scheme, const ClientRequest&, VideoId,
                         const WorldView& world, RandomSource& rng) {
    switch (scheme) {
    case SchemeId::AllCache:
    case SchemeId::DscCache:
        return true;
    case SchemeId::RandomCache:
        return rng.bernoulli(world.params.random_cache_prob);
    case SchemeId::NoCache:
    case SchemeId::PoRCache:
    case SchemeId::ProxyCache:
        return false;
    }
    return false;
}

} // namespace vodsim
