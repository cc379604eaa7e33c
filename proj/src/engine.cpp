#include "vodsim/engine.hpp"

#include "vodsim/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace vodsim {

namespace {

Millis minutes_rounded(double minutes) {
    return Millis{static_cast<Millis::rep>(std::llround(minutes * 60000.0))};
}

constexpr std::size_t idx(ClientId id) { return to_int(id) - 1; }

} // namespace

ArrivalClass classify_arrival(const BroadcastPlan& plan, Millis t) {
    if (t < plan.epoch) {
        throw Error(ErrorCode::BeforeStart, "arrival precedes the broadcast epoch");
    }
    const Millis missed = (t - plan.epoch) % plan.segment_duration;
    const int channel = channel_in_first_segment(plan, t);
    if (missed == Millis{0}) return OnTime{channel};
    return Late{channel, missed};
}

std::string_view to_string(ClientState s) {
    switch (s) {
    case ClientState::Requesting: return "Requesting";
    case ClientState::AwaitingSlot: return "AwaitingSlot";
    case ClientState::FetchingFirst: return "FetchingFirst";
    case ClientState::Playing: return "Playing";
    case ClientState::Done: return "Done";
    }
    return "Unknown";
}

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::Arrival: return "Arrival";
    case EventKind::SlotStart: return "SlotStart";
    case EventKind::FetchComplete: return "FetchComplete";
    case EventKind::QueueGrant: return "QueueGrant";
    case EventKind::PlaybackEnd: return "PlaybackEnd";
    case EventKind::Departure: return "Departure";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------

namespace {

const SimConfig& checked(const SimConfig& cfg) {
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& v : violations) msg += fmt::format("\n  {}: {}", v.key, v.message);
        throw Error(ErrorCode::ConfigInvalid, msg);
    }
    return cfg;
}

} // namespace

Simulation::Simulation(const SimConfig& cfg, SchemeId scheme, std::ostream* trace)
    : cfg_(checked(cfg)),
      scheme_(scheme),
      trace_(trace),
      arrival_rng_(RandomSource(cfg.seed).substream("arrivals")),
      video_rng_(RandomSource(cfg.seed).substream("videos")),
      position_rng_(RandomSource(cfg.seed).substream("positions")),
      caching_rng_(RandomSource(cfg.seed).substream("caching")),
      peers_(cfg.client_range_m),
      lps_table_(LpsTable::with_proxies(cfg.num_lps)),
      por_pool_(cfg.lps_capacity) {
    horizon_ = minutes_rounded(cfg_.horizon_minutes);
    warmup_ = minutes_rounded(cfg_.effective_warmup_minutes());
    video_length_ = *minutes_to_ms(cfg_.video_length_minutes);
    msg_latency_ = Millis{static_cast<Millis::rep>(cfg_.msg_latency_ms)};
    bits_per_ms_ = cfg_.consumption_rate_mbps * 1e3;

    for (const auto& video : make_catalog(cfg_)) {
        plans_.push_back(build_plan(video, cfg_.channels, Millis{0}));
        popularity_.push_back(video.popularity);
    }
    params_ = {cfg_.client_range_m, msg_latency_, cfg_.random_cache_prob};
    lps_pools_.assign(static_cast<std::size_t>(cfg_.num_lps), SlotPool(cfg_.lps_capacity));
    lps_grants_.assign(lps_pools_.size(), 0);
    lps_releases_.assign(lps_pools_.size(), 0);

    schedule_next_arrival();
}

void Simulation::fault(const std::string& what) const {
    throw Error(ErrorCode::SimulationFault, fmt::format("t = {} ms: {}", now_.count(), what));
}

void Simulation::schedule(Millis t, EventKind kind, ClientId client) {
    if (t < now_) fault(fmt::format("{} scheduled in the past at {} ms", to_string(kind), t.count()));
    events_.push({t, next_sequence_++, kind, client});
}

void Simulation::schedule_next_arrival() {
    next_arrival_ms_ += arrival_rng_.exponential(cfg_.arrival_rate_per_min / 60000.0);
    const Millis t{static_cast<Millis::rep>(std::floor(next_arrival_ms_))};
    if (t >= horizon_) return;
    schedule(t, EventKind::Arrival, ClientId{static_cast<std::uint32_t>(clients_.size() + 1)});
}

bool Simulation::step() {
    if (events_.empty()) return false;
    const Event ev = events_.top();
    events_.pop();
    now_ = ev.time;
    if (trace_ != nullptr) {
        fmt::print(*trace_, "{} {} {} C{}\n", ev.time.count(), ev.sequence, to_string(ev.kind),
                   to_int(ev.client));
    }
    if (ev.kind == EventKind::Arrival) {
        on_arrival();
        return true;
    }
    ClientRecord& c = clients_.at(idx(ev.client));
    switch (ev.kind) {
    case EventKind::SlotStart: on_slot_start(c); break;
    case EventKind::QueueGrant: on_queue_grant(c); break;
    case EventKind::FetchComplete: on_fetch_complete(c); break;
    case EventKind::PlaybackEnd: on_playback_end(c); break;
    case EventKind::Departure: on_departure(c); break;
    case EventKind::Arrival: break;
    }
    return true;
}

MetricsReport Simulation::run() {
    while (step()) {
    }
    return report();
}

WorldView Simulation::snapshot_world() const {
    WorldView w;
    w.now = now_;
    w.peers = &peers_;
    w.lps_table = &lps_table_;
    w.lps_pools = lps_pools_;
    w.por_pool = &por_pool_;
    w.plans = plans_;
    w.params = params_;
    return w;
}

ClientRequest Simulation::request_of(const ClientRecord& c) const {
    return {c.id, c.position, c.arrival};
}

Millis Simulation::fetch_duration(Millis missed, SourceKind from) const {
    const bool peer = from == SourceKind::Neighbor || from == SourceKind::Relay;
    const double rate = peer ? cfg_.peer_rate_mbps : cfg_.proxy_rate_mbps;
    const double ms = static_cast<double>(missed.count()) * cfg_.consumption_rate_mbps / rate;
    return Millis{static_cast<Millis::rep>(std::ceil(ms))};
}

std::size_t Simulation::lps_index(LpsId id) const {
    const auto entries = lps_table_.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].id == id) return i;
    }
    fault(fmt::format("unknown LPS{}", to_int(id)));
}

void Simulation::on_arrival() {
    ClientRecord c;
    c.id = ClientId{static_cast<std::uint32_t>(clients_.size() + 1)};
    c.arrival = now_;
    c.video = VideoId{static_cast<std::uint32_t>(video_rng_.pick_weighted(popularity_) + 1)};
    const double r = cfg_.lf_radius_m;
    do {
        c.position = {position_rng_.uniform(-r, r), position_rng_.uniform(-r, r)};
    } while (c.position.x * c.position.x + c.position.y * c.position.y > r * r);

    const BroadcastPlan& plan = plans_[to_int(c.video) - 1];
    c.initial_buffer_capacity = static_cast<double>(plan.segment_duration.count()) * bits_per_ms_;

    clients_.push_back(c);
    uploaders_.emplace_back();
    peers_.insert({c.id, c.position, c.video, false, false});
    ClientRecord& rec = clients_.back();
    if (counted(rec)) ++arrivals_;

    const ArrivalClass cls = classify_arrival(plan, now_);
    if (const auto* on_time = std::get_if<OnTime>(&cls)) {
        if (counted(rec)) ++on_time_;
        rec.channel = on_time->channel;
        rec.outcome = AcquisitionOutcome{source::ChannelSlot{on_time->channel}, Millis{0}, false, 0,
                                         Millis{0}};
        if (counted(rec)) ++outcome_counts_[static_cast<std::size_t>(SourceKind::ChannelSlot)];
        start_playback(rec);
    } else {
        const auto& late = std::get<Late>(cls);
        rec.missed = late.missed;
        rec.prefetch_buffer_capacity = static_cast<double>(late.missed.count()) * bits_per_ms_;
        rec.channel = late.channel;
        const auto outcome =
            acquire_first_segment(scheme_, request_of(rec), rec.video, snapshot_world());
        apply_outcome(rec, outcome);
    }
    schedule_next_arrival();
}

void Simulation::apply_outcome(ClientRecord& c, const AcquisitionOutcome& out) {
    c.outcome = out;
    if (counted(c)) {
        ++outcome_counts_[static_cast<std::size_t>(kind_of(out.source))];
        if (scheme_ != SchemeId::NoCache) {
            ++attempts_;
            if (out.failed) ++failures_;
        }
    }
    if (out.startup_delay < Millis{0}) fault("negative startup delay");
    if (out.failed && kind_of(out.source) != SourceKind::ChannelSlot) {
        fault("failed outcome must fall back to a channel slot");
    }
    const Millis first_data = now_ + out.startup_delay;
    const Millis done = first_data + fetch_duration(c.missed, kind_of(out.source));

    std::visit(
        [&](const auto& src) {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, source::ChannelSlot>) {
                c.state = ClientState::AwaitingSlot;
                c.channel = src.channel;
                c.prefetch_buffer_capacity = 0.0;
                schedule(first_data, EventKind::SlotStart, c.id);
            } else {
                if constexpr (std::is_same_v<T, source::Neighbor>) {
                    set_uploading(src.holder, true);
                    uploaders_[idx(c.id)] = {src.holder};
                } else if constexpr (std::is_same_v<T, source::Relay>) {
                    set_uploading(src.holder, true);
                    set_uploading(src.via, true);
                    uploaders_[idx(c.id)] = {src.holder, src.via};
                } else if constexpr (std::is_same_v<T, source::PoR>) {
                    por_pool_.reserve(now_, done);
                } else if constexpr (std::is_same_v<T, source::Lps>) {
                    lps_pools_[lps_index(src.lps)].reserve(now_, done);
                }
                c.state = ClientState::FetchingFirst;
                schedule(first_data, EventKind::QueueGrant, c.id);
                schedule(done, EventKind::FetchComplete, c.id);
            }
        },
        out.source);
}

void Simulation::set_uploading(ClientId id, bool uploading) {
    ClientRecord& u = clients_.at(idx(id));
    if (uploading && u.uploading) fault(fmt::format("C{} is already uploading", to_int(id)));
    if (uploading && u.departed) fault(fmt::format("C{} has departed", to_int(id)));
    u.uploading = uploading;
    peers_.set_uploading(id, uploading);
}

void Simulation::start_playback(ClientRecord& c) {
    c.state = ClientState::Playing;
    c.playback_start = now_;
    const Millis delay = now_ - c.arrival;
    if (!c.outcome || delay != c.outcome->startup_delay) {
        fault(fmt::format("C{} started after {} ms, outcome promised {} ms", to_int(c.id),
                          delay.count(), c.outcome ? c.outcome->startup_delay.count() : -1));
    }
    if (counted(c)) {
        const double d = static_cast<double>(delay.count());
        ++delays_recorded_;
        delay_sum_ += d;
        delay_sum_sq_ += d * d;
    }
    c.holder = on_playback_started(scheme_, request_of(c), c.video, snapshot_world(), caching_rng_);
    peers_.set_holder(c.id, c.holder);
    schedule(now_ + video_length_, EventKind::PlaybackEnd, c.id);
}

void Simulation::on_slot_start(ClientRecord& c) {
    if (c.state != ClientState::AwaitingSlot) fault("SlotStart outside AwaitingSlot");
    start_playback(c);
}

void Simulation::on_queue_grant(ClientRecord& c) {
    if (c.state != ClientState::FetchingFirst) fault("QueueGrant outside FetchingFirst");
    if (const auto* lps = std::get_if<source::Lps>(&c.outcome->source)) {
        lps_table_.record_request(lps->lps, c.id);
        ++lps_grants_[lps_index(lps->lps)];
    }
    start_playback(c);
}

void Simulation::on_fetch_complete(ClientRecord& c) {
    if (c.state != ClientState::Playing) fault("FetchComplete before playback started");
    if (const auto* lps = std::get_if<source::Lps>(&c.outcome->source)) {
        lps_table_.release_request(lps->lps, c.id);
        ++lps_releases_[lps_index(lps->lps)];
    }
    for (ClientId u : uploaders_[idx(c.id)]) finish_upload(u);
    uploaders_[idx(c.id)].clear();

    c.initial_buffer_fill = static_cast<double>(c.missed.count()) * bits_per_ms_;
    const double joined_for = static_cast<double>((now_ - c.arrival).count());
    c.prefetch_buffer_fill = std::min(c.prefetch_buffer_capacity, joined_for * bits_per_ms_);
}

void Simulation::finish_upload(ClientId id) {
    set_uploading(id, false);
    ClientRecord& u = clients_.at(idx(id));
    if (u.departure_pending) {
        u.departure_pending = false;
        schedule(now_, EventKind::Departure, id);
    }
}

void Simulation::on_playback_end(ClientRecord& c) {
    if (c.state != ClientState::Playing) fault("PlaybackEnd outside Playing");
    c.state = ClientState::Done;
    if (kind_of(c.outcome->source) == SourceKind::ChannelSlot) {
        c.initial_buffer_fill = c.initial_buffer_capacity;
    }
    c.holder = false;
    peers_.set_holder(c.id, false);
    // A client that is still serving segment 1 stays until the transfer ends.
    if (c.uploading) {
        c.departure_pending = true;
    } else {
        schedule(now_, EventKind::Departure, c.id);
    }
}

void Simulation::on_departure(ClientRecord& c) {
    if (c.state != ClientState::Done || c.uploading) fault("Departure before playback ended");
    c.departed = true;
    peers_.erase(c.id);
}

Census Simulation::census() const {
    Census out;
    out.arrivals = clients_.size();
    for (const auto& c : clients_) {
        if (c.departed) {
            ++out.departed;
        } else if (c.state == ClientState::Done) {
            ++out.completed;
        } else {
            ++out.in_flight;
        }
    }
    return out;
}

MetricsReport Simulation::report() const {
    MetricsReport r;
    r.scheme = scheme_;
    r.seed = cfg_.seed;
    r.arrivals = arrivals_;
    r.on_time = on_time_;
    r.empty = delays_recorded_ == 0;
    if (!r.empty) {
        const double n = static_cast<double>(delays_recorded_);
        r.mean_startup_delay_ms = delay_sum_ / n;
        if (delays_recorded_ > 1) {
            const double var =
                std::max(0.0, (delay_sum_sq_ - n * r.mean_startup_delay_ms * r.mean_startup_delay_ms) /
                                  (n - 1.0));
            r.ci95_ms = 1.96 * std::sqrt(var / n);
        }
    }
    r.attempts = attempts_;
    r.failures = failures_;
    r.failure_probability =
        attempts_ == 0 ? 0.0 : static_cast<double>(failures_) / static_cast<double>(attempts_);
    r.outcome_counts = outcome_counts_;
    r.lps_grants = lps_grants_;
    r.lps_releases = lps_releases_;
    for (const auto& e : lps_table_.entries()) r.lps_outstanding.push_back(e.request_count());
    return r;
}

MetricsReport run_simulation(const SimConfig& cfg, SchemeId scheme, std::ostream* trace) {
    Simulation sim(cfg, scheme, trace);
    return sim.run();
}

} // namespace vodsim
