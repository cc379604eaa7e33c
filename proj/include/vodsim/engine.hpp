#pragma once

#include "vodsim/balancer.hpp"
#include "vodsim/caching.hpp"
#include "vodsim/config.hpp"
#include "vodsim/domain.hpp"
#include "vodsim/random.hpp"
#include "vodsim/sb_scheduler.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <variant>
#include <vector>

namespace vodsim {

// ---------------------------------------------------------------------------
// Arrival classification

struct OnTime {
    int channel = 0;
    friend bool operator==(const OnTime&, const OnTime&) = default;
};
struct Late {
    int channel = 0;   // channel currently broadcasting segment 1
    Millis missed{0};  // portion of segment 1 already broadcast
    friend bool operator==(const Late&, const Late&) = default;
};
using ArrivalClass = std::variant<OnTime, Late>;

ArrivalClass classify_arrival(const BroadcastPlan& plan, Millis t);

// ---------------------------------------------------------------------------

enum class ClientState { Requesting, AwaitingSlot, FetchingFirst, Playing, Done };
std::string_view to_string(ClientState s);

struct ClientRecord {
    ClientId id{};
    Millis arrival{0};
    Position position;
    VideoId video{};
    ClientState state = ClientState::Requesting;
    int channel = 0;
    Millis missed{0};

    double initial_buffer_capacity = 0.0;   // bits, one first segment
    double prefetch_buffer_capacity = 0.0;  // bits, the missed broadcast portion
    double initial_buffer_fill = 0.0;
    double prefetch_buffer_fill = 0.0;

    bool holder = false;
    bool uploading = false;
    bool departure_pending = false;
    bool departed = false;

    std::optional<AcquisitionOutcome> outcome;
    std::optional<Millis> playback_start;
};

enum class EventKind { Arrival, SlotStart, FetchComplete, QueueGrant, PlaybackEnd, Departure };
std::string_view to_string(EventKind k);

struct Event {
    Millis time{0};
    std::uint64_t sequence = 0;
    EventKind kind = EventKind::Arrival;
    ClientId client{};
};

struct MetricsReport {
    SchemeId scheme = SchemeId::NoCache;
    std::uint64_t seed = 0;
    /// No post-warmup arrivals; means below are zero and meaningless.
    bool empty = true;
    std::uint64_t arrivals = 0;
    std::uint64_t on_time = 0;
    double mean_startup_delay_ms = 0.0;
    double ci95_ms = 0.0;
    std::uint64_t attempts = 0;  // cache-assisted acquisition attempts
    std::uint64_t failures = 0;
    double failure_probability = 0.0;
    std::array<std::uint64_t, kSourceKinds> outcome_counts{};
    /// Indexed like the proxy table. Grants and releases cover every client,
    /// warmup included, so grants - releases equals the table's counts.
    std::vector<std::uint64_t> lps_grants;
    std::vector<std::uint64_t> lps_releases;
    std::vector<std::uint64_t> lps_outstanding;
};

struct Census {
    std::uint64_t arrivals = 0;
    std::uint64_t in_flight = 0;
    std::uint64_t completed = 0;  // playback ended, still present
    std::uint64_t departed = 0;
};

/// One single-threaded run over a total (time, sequence) event order.
/// Arrivals are generated on [0, horizon); the run then drains every
/// outstanding event so all admitted clients finish.
class Simulation {
public:
    /// Throws Error(ConfigInvalid) listing every violation.
    Simulation(const SimConfig& cfg, SchemeId scheme, std::ostream* trace = nullptr);

    /// Processes one event. Returns false when nothing is left.
    bool step();
    MetricsReport run();

    Millis now() const noexcept { return now_; }
    WorldView snapshot_world() const;
    MetricsReport report() const;
    Census census() const;

    const std::vector<ClientRecord>& clients() const noexcept { return clients_; }
    const LpsTable& lps_table() const noexcept { return lps_table_; }
    const std::vector<BroadcastPlan>& plans() const noexcept { return plans_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.sequence > b.sequence;
        }
    };

    void schedule(Millis t, EventKind kind, ClientId client);
    void schedule_next_arrival();

    void on_arrival();
    void on_slot_start(ClientRecord& c);
    void on_queue_grant(ClientRecord& c);
    void on_fetch_complete(ClientRecord& c);
    void on_playback_end(ClientRecord& c);
    void on_departure(ClientRecord& c);

    void apply_outcome(ClientRecord& c, const AcquisitionOutcome& out);
    void start_playback(ClientRecord& c);
    void set_uploading(ClientId id, bool uploading);
    void finish_upload(ClientId id);
    bool counted(const ClientRecord& c) const noexcept { return c.arrival >= warmup_; }
    std::size_t lps_index(LpsId id) const;
    ClientRequest request_of(const ClientRecord& c) const;
    Millis fetch_duration(Millis missed, SourceKind from) const;
    [[noreturn]] void fault(const std::string& what) const;

    SimConfig cfg_;
    SchemeId scheme_;
    std::ostream* trace_;

    Millis horizon_{0};
    Millis warmup_{0};
    Millis video_length_{0};
    Millis msg_latency_{0};
    double bits_per_ms_ = 0.0;

    std::vector<BroadcastPlan> plans_;
    std::vector<double> popularity_;
    CachingParams params_;

    RandomSource arrival_rng_;
    RandomSource video_rng_;
    RandomSource position_rng_;
    RandomSource caching_rng_;
    double next_arrival_ms_ = 0.0;

    std::priority_queue<Event, std::vector<Event>, Later> events_;
    std::uint64_t next_sequence_ = 0;
    Millis now_{0};

    std::vector<ClientRecord> clients_;
    PeerIndex peers_;
    LpsTable lps_table_;
    std::vector<SlotPool> lps_pools_;
    SlotPool por_pool_;

    // Uploaders serving each fetching client, cleared at FetchComplete.
    std::vector<std::vector<ClientId>> uploaders_;

    // Metrics (post-warmup clients only).
    std::uint64_t arrivals_ = 0;
    std::uint64_t on_time_ = 0;
    std::uint64_t attempts_ = 0;
    std::uint64_t failures_ = 0;
    std::uint64_t delays_recorded_ = 0;
    double delay_sum_ = 0.0;
    double delay_sum_sq_ = 0.0;
    std::array<std::uint64_t, kSourceKinds> outcome_counts_{};
    std::vector<std::uint64_t> lps_grants_;
    std::vector<std::uint64_t> lps_releases_;
};

MetricsReport run_simulation(const SimConfig& cfg, SchemeId scheme,
                             std::ostream* trace = nullptr);

} // namespace vodsim
