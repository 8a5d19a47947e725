// Copyright 2026 The epochmesh Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "epochmesh/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "epochmesh/dissemination.hpp"
#include "epochmesh/ratchet.hpp"
#include "epochmesh/timesync.hpp"

namespace epochmesh::sim {

namespace {
constexpr double kAttackWindowS = 3600.0;  // fabricated clocks within +-1 h of true time
constexpr double kRequestTimeoutS = 2.0;
constexpr double kFullDiffPeriodS = 30.0;  // recovery pass over a neighbor's full inventory
constexpr uint8_t kMockTag = 0x7f;
constexpr size_t kMockHeader = 1 + 8 + 1 + 4 + 4 + 8;
}  // namespace

void SimConfig::validate() const {
    auto bad = [](const std::string& why) { throw std::invalid_argument("config: " + why); };
    if (users < 1) bad("users must be at least 1");
    if (attackers > users) bad("attackers cannot exceed users");
    if (density <= 0) bad("density must be positive");
    if (radius_m <= 0) bad("radius must be positive");
    if (bandwidth_bps <= 0) bad("bandwidth must be positive");
    if (epoch_s <= 0) bad("epoch duration must be positive");
    if (vote_period_s <= 0) bad("vote period must be positive");
    if (epsilon_ms < 0) bad("epsilon must be non-negative");
    if (duration_s <= 0) bad("duration must be positive");
    if (sample_period_s <= 0) bad("sample period must be positive");
    if (runs < 1) bad("runs must be at least 1");
    if (message_interval_s < 0) bad("message interval must be non-negative");
    if (movement == MovementModel::Trace && trace_file.empty())
        bad("trace movement model requires a trace file");
    if (movement == MovementModel::Converging && groups < 1) bad("groups must be at least 1");
    if (tree_depth > hibe::kMaxDepth) bad("tree depth exceeds maximum");
    if (effective_depth() > hibe::kMaxDepth)
        bad("run too long for the maximum key tree depth");
}

uint32_t SimConfig::effective_depth() const {
    if (tree_depth != 0) return tree_depth;
    double sub = smooth_rollover ? epoch_s / 2.0 : epoch_s;
    double horizon = genesis_margin_s + clock_offset_s + duration_s +
                     (attackers > 0 ? kAttackWindowS : 0.0);
    uint64_t needed = static_cast<uint64_t>(std::ceil(horizon / sub)) + 4;
    for (uint32_t depth = 1; depth <= hibe::kMaxDepth; ++depth)
        if (ratchet::max_epoch(depth) >= needed) return depth;
    return hibe::kMaxDepth + 1;  // validate() turns this into an error
}

// ---- config file ----

namespace {
std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}
}  // namespace

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    size_t line_no = 0;
    auto fail = [&line_no](const std::string& why) {
        throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string s = trim(line);
        size_t hash = s.find('#');
        if (hash != std::string::npos) s = trim(s.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail("unterminated section header");
            section = s.substr(1, s.size() - 2);
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty()) fail("expected key = value");

        auto num = [&]() {
            try {
                return std::stod(value);
            } catch (...) {
                fail("bad number '" + value + "'");
                return 0.0;
            }
        };
        auto flag = [&]() {
            if (value == "on" || value == "true" || value == "1") return true;
            if (value == "off" || value == "false" || value == "0") return false;
            fail("bad flag '" + value + "' (on/off)");
            return false;
        };

        std::string qual = section.empty() ? key : section + "." + key;
        if (qual == "sim.users") cfg.users = static_cast<uint32_t>(num());
        else if (qual == "sim.attackers") cfg.attackers = static_cast<uint32_t>(num());
        else if (qual == "sim.duration_s") cfg.duration_s = num();
        else if (qual == "sim.stabilization_s") cfg.stabilization_s = num();
        else if (qual == "sim.runs") cfg.runs = static_cast<uint32_t>(num());
        else if (qual == "sim.seed") cfg.seed = static_cast<uint64_t>(num());
        else if (qual == "sim.sample_period_s") cfg.sample_period_s = num();
        else if (qual == "sim.crypto") {
            if (value == "mock") cfg.crypto = CryptoMode::Mock;
            else if (value == "real") cfg.crypto = CryptoMode::Real;
            else fail("crypto must be mock or real");
        }
        else if (qual == "radio.density") cfg.density = num();
        else if (qual == "radio.radius_m") cfg.radius_m = num();
        else if (qual == "radio.bandwidth_bps") cfg.bandwidth_bps = num();
        else if (qual == "epochs.epoch_s") cfg.epoch_s = num();
        else if (qual == "epochs.rollover") cfg.smooth_rollover = flag();
        else if (qual == "epochs.depth") cfg.tree_depth = static_cast<uint32_t>(num());
        else if (qual == "epochs.genesis_margin_s") cfg.genesis_margin_s = num();
        else if (qual == "sync.vote_period_s") cfg.vote_period_s = num();
        else if (qual == "sync.epsilon_ms") cfg.epsilon_ms = num();
        else if (qual == "sync.clock_offset_s") cfg.clock_offset_s = num();
        else if (qual == "sync.drift_ms_per_min") cfg.drift_ms_per_min = num();
        else if (qual == "traffic.message_interval_s") cfg.message_interval_s = num();
        else if (qual == "traffic.message_size") cfg.message_size = static_cast<uint32_t>(num());
        else if (qual == "movement.model") {
            if (value == "static") cfg.movement = MovementModel::Static;
            else if (value == "converging") cfg.movement = MovementModel::Converging;
            else if (value == "trace") cfg.movement = MovementModel::Trace;
            else fail("unknown movement model '" + value + "'");
        }
        else if (qual == "movement.groups") cfg.groups = static_cast<uint32_t>(num());
        else if (qual == "movement.speed_mps") cfg.speed_mps = num();
        else if (qual == "movement.dwell_s") cfg.dwell_s = num();
        else if (qual == "movement.spawn_distance_m") cfg.spawn_distance_m = num();
        else if (qual == "movement.trace_file") cfg.trace_file = value;
        else if (qual == "dissemination.heartbeat_s") cfg.heartbeat_s = num();
        else if (qual == "dissemination.announce_coalesce_s") cfg.announce_coalesce_s = num();
        else fail("unknown key '" + qual + "'");
    }
    cfg.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// ---- the event loop ----

namespace {

enum class Ev : uint8_t { Vote, Heartbeat, UserSend, TxDone, Sample, AnnounceFlush };

struct Event {
    double t;
    uint64_t seq;
    uint32_t node;
    Ev kind;
};

struct EventLater {
    bool operator()(const Event& a, const Event& b) const {
        if (a.t != b.t) return a.t > b.t;
        return a.seq > b.seq;
    }
};

// In-simulation datagram: structured contents shared across receivers, byte
// size modeled from the real codecs (the codecs themselves are exercised by
// the protocol tests and the CLI).
struct Datagram {
    enum class Kind : uint8_t { Time, Inventory, Request, Payload } kind;
    size_t wire_size = 0;
    double clock_ms = 0.0;                                       // Time
    std::shared_ptr<const std::vector<dissem::MessageId>> ids;   // Inventory / Request
    std::shared_ptr<const Bytes> body;                           // Payload
    dissem::MessageId id{};                                      // Payload
};

Datagram make_time_dgram(double clock_ms) {
    Datagram d;
    d.kind = Datagram::Kind::Time;
    d.wire_size = timesync::kTimeBroadcastSize;
    d.clock_ms = static_cast<double>(
        static_cast<uint64_t>(std::llround(std::max(0.0, clock_ms))));
    return d;
}

Datagram make_id_list_dgram(Datagram::Kind kind, std::vector<dissem::MessageId> ids) {
    Datagram d;
    d.kind = kind;
    d.wire_size = 3 + ids.size() * 32;  // tag + count + ids
    d.ids = std::make_shared<const std::vector<dissem::MessageId>>(std::move(ids));
    return d;
}

Datagram make_payload_dgram(std::shared_ptr<const Bytes> body, const dissem::MessageId& id) {
    Datagram d;
    d.kind = Datagram::Kind::Payload;
    d.wire_size = 1 + body->size();  // tag + ciphertext
    d.body = std::move(body);
    d.id = id;
    return d;
}

struct TxItem {
    Datagram dgram;
    bool canceled = false;
};

struct MsgRecord {
    uint32_t recipient;
    bool counted;
    bool arrived = false;
    bool delivered = false;
};

// Per-sender inventory cursor: announcements append new ids at the tail, so
// anything up to the last processed tail has been diffed before. A periodic
// full pass covers eviction wrap-around and expired requests.
struct PeerInvCursor {
    dissem::MessageId tail{};
    bool valid = false;
    double last_full_s = -1e18;
};

struct NodeRt {
    timesync::ClockState clock;
    double last_adv_s = 0.0;
    double uptime_ms = 0.0;
    timesync::NeighborClockTable table;
    bool attacker = false;

    dissem::SeenCache cache;
    std::unordered_map<dissem::MessageId, double, dissem::MessageIdHash> pending_req;
    std::unordered_set<dissem::MessageId, dissem::MessageIdHash> pending_tx;
    std::unordered_map<uint32_t, PeerInvCursor> peer_inv;
    std::deque<TxItem> txq;
    bool tx_busy = false;
    bool announce_pending = false;

    uint64_t mock_max_epoch = 0;
    std::optional<ratchet::PublicKey> pk;
    std::optional<ratchet::Session> session;

    SimRng rng{0};
    std::optional<Drbg> drbg;
    uint64_t send_seq = 0;
};

uint64_t mix_seed(uint64_t seed, uint32_t node) {
    uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (node + 1));
    x ^= x >> 29;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 32;
    return x;
}

class Runner {
  public:
    Runner(const SimConfig& cfg, uint64_t seed, const TraceData* trace)
        : cfg_(cfg), trace_(trace), seed_(seed), depth_(cfg.effective_depth()),
          rule_{cfg.epoch_s, 0.0, cfg.smooth_rollover}, run_rng_(mix_seed(seed, 0xffffffff)) {}

    RunResult run();

  private:
    // time bookkeeping
    void advance_node(uint32_t v, double now) {
        NodeRt& n = nodes_[v];
        double elapsed_ms = (now - n.last_adv_s) * 1000.0;
        if (elapsed_ms <= 0) return;
        n.clock.advance(elapsed_ms);
        n.uptime_ms += elapsed_ms * (1.0 + n.clock.drift_ms_per_min / 60000.0);
        n.last_adv_s = now;
    }
    double clock_view_ms(uint32_t v, double now) const {
        const NodeRt& n = nodes_[v];
        double elapsed_ms = (now - n.last_adv_s) * 1000.0;
        return n.clock.value_ms + elapsed_ms * (1.0 + n.clock.drift_ms_per_min / 60000.0);
    }
    uint64_t node_epoch(uint32_t v) const {
        double clock_s = std::max(0.0, nodes_[v].clock.value_ms) / 1000.0;
        return ratchet::current_epochs(clock_s, rule_).encrypt_epoch;
    }
    // Cache retention ages by the node's monotone uptime in sub-epoch units:
    // equivalent to epoch age under a sane clock, immune to vote jumps.
    uint64_t cache_epoch(uint32_t v) const {
        double sub_s = cfg_.smooth_rollover ? cfg_.epoch_s / 2.0 : cfg_.epoch_s;
        return static_cast<uint64_t>(nodes_[v].uptime_ms / (sub_s * 1000.0));
    }
    void sync_crypto(uint32_t v) {
        NodeRt& n = nodes_[v];
        uint64_t e = node_epoch(v);
        if (cfg_.crypto == CryptoMode::Mock) {
            uint64_t cap = ratchet::max_epoch(depth_);
            if (e > n.mock_max_epoch) n.mock_max_epoch = std::min(e, cap);
        } else if (n.session) {
            n.session->advance_to_clock(std::max(0.0, n.clock.value_ms) / 1000.0);
        }
    }

    // radio
    void push_event(double t, uint32_t node, Ev kind) { q_.push({t, seq_++, node, kind}); }
    void send_datagram(uint32_t v, Datagram dgram, double now) {
        NodeRt& n = nodes_[v];
        n.txq.push_back(TxItem{std::move(dgram)});
        if (!n.tx_busy) {
            n.tx_busy = true;
            push_event(
                now + transmission_delay_s(n.txq.front().dgram.wire_size, cfg_.bandwidth_bps), v,
                Ev::TxDone);
        }
    }
    const std::vector<std::vector<uint32_t>>& neighbors(double now) {
        if (cfg_.movement == MovementModel::Static) return static_adj_;
        double bucket = std::floor(now);
        if (bucket != adj_bucket_) {
            std::vector<bool> present;
            auto pos = positions_at(cfg_, trace_, now, &present);
            adj_cache_ = connectivity(pos, cfg_.radius_m, &present);
            adj_bucket_ = bucket;
        }
        return adj_cache_;
    }

    // handlers
    void handle_vote(uint32_t v, double now);
    void handle_heartbeat(uint32_t v, double now);
    void handle_user_send(uint32_t v, double now);
    void handle_tx_done(uint32_t v, double now);
    void handle_announce_flush(uint32_t v, double now);
    void handle_sample(double now);
    void receive(uint32_t v, uint32_t from, const Datagram& dgram, double now);
    void emit_announce(uint32_t v, double now);
    void schedule_announce(uint32_t v, double now) {
        NodeRt& n = nodes_[v];
        if (!n.announce_pending) {
            n.announce_pending = true;
            push_event(now + cfg_.announce_coalesce_s, v, Ev::AnnounceFlush);
        }
    }

    Bytes build_payload(uint32_t sender, uint32_t recipient, uint64_t epoch);
    bool payload_well_formed(BytesView body) const;
    std::optional<Bytes> trial_decrypt(uint32_t v, BytesView body, double now);
    void note_arrival(uint32_t v, const dissem::MessageId& id,
                      const dissem::PayloadOutcome& outcome);

    const SimConfig& cfg_;
    const TraceData* trace_;
    uint64_t seed_;
    uint32_t depth_;
    ratchet::EpochClockRule rule_;
    SimRng run_rng_;

    std::vector<NodeRt> nodes_;
    std::vector<uint32_t> honest_;
    std::vector<std::vector<uint32_t>> static_adj_;
    std::vector<std::vector<uint32_t>> adj_cache_;
    double adj_bucket_ = -1.0;

    std::priority_queue<Event, std::vector<Event>, EventLater> q_;
    uint64_t seq_ = 0;

    std::unordered_map<dissem::MessageId, MsgRecord, dissem::MessageIdHash> registry_;
    uint64_t sent_counted_ = 0, arrived_counted_ = 0, delivered_counted_ = 0;
    uint64_t malformed_ = 0;
    std::vector<TimelineSample> timeline_;
};

Bytes Runner::build_payload(uint32_t sender, uint32_t recipient, uint64_t epoch) {
    NodeRt& s = nodes_[sender];
    if (cfg_.crypto == CryptoMode::Real) {
        Bytes msg(cfg_.message_size, 0);
        if (msg.size() >= 12) {
            Bytes tagbytes;
            put_u32le(tagbytes, sender);
            put_u64be(tagbytes, s.send_seq);
            std::copy(tagbytes.begin(), tagbytes.end(), msg.begin());
        }
        s.send_seq++;
        return ratchet::encrypt(epoch, *nodes_[recipient].pk, msg, *s.drbg);
    }
    uint32_t n = ratchet::epoch_to_identity(epoch, depth_).length;
    size_t total = ratchet::Ciphertext::encoded_size(n, cfg_.message_size);
    Bytes body;
    body.reserve(total);
    body.push_back(kMockTag);
    put_u64be(body, epoch);
    body.push_back(static_cast<uint8_t>(2 + n));
    put_u32le(body, recipient);
    put_u32le(body, sender);
    put_u64be(body, s.send_seq++);
    body.resize(total, 0);
    return body;
}

bool Runner::payload_well_formed(BytesView body) const {
    if (cfg_.crypto == CryptoMode::Real) return ratchet::Ciphertext::parse(body).has_value();
    return body.size() >= kMockHeader && body[0] == kMockTag;
}

std::optional<Bytes> Runner::trial_decrypt(uint32_t v, BytesView body, double now) {
    NodeRt& n = nodes_[v];
    if (cfg_.crypto == CryptoMode::Real) {
        auto ct = ratchet::Ciphertext::parse(body);
        if (!ct || !n.session) return std::nullopt;
        return n.session->try_decrypt(*ct, std::max(0.0, n.clock.value_ms) / 1000.0);
    }
    if (body.size() < kMockHeader || body[0] != kMockTag) return std::nullopt;
    uint64_t epoch = get_u64be(body.data() + 1);
    uint32_t recipient = get_u32le(body.data() + 10);
    if (recipient != v) return std::nullopt;
    auto w = ratchet::current_epochs(std::max(0.0, n.clock.value_ms) / 1000.0, rule_);
    bool in_window = false;
    for (uint64_t e : w.decryptable) in_window |= (e == epoch);
    if (!in_window) return std::nullopt;
    // the ratchet only ever holds the current key and the one just left
    bool held = epoch == n.mock_max_epoch ||
                (n.mock_max_epoch > 0 && epoch == n.mock_max_epoch - 1);
    if (!held) return std::nullopt;
    (void)now;
    return Bytes{};
}

void Runner::note_arrival(uint32_t v, const dissem::MessageId& id,
                          const dissem::PayloadOutcome& outcome) {
    auto it = registry_.find(id);
    if (outcome.plaintext.has_value()) {
        // conservation: a delivery must match exactly one send to this node
        if (it == registry_.end() || it->second.recipient != v)
            throw std::logic_error("delivery without matching send");
    }
    if (it == registry_.end() || it->second.recipient != v) return;
    MsgRecord& rec = it->second;
    if (!rec.arrived) {
        rec.arrived = true;
        if (rec.counted) ++arrived_counted_;
    }
    if (outcome.plaintext.has_value() && !rec.delivered) {
        rec.delivered = true;
        if (rec.counted) ++delivered_counted_;
    }
}

void Runner::receive(uint32_t v, uint32_t from, const Datagram& dgram, double now) {
    NodeRt& n = nodes_[v];
    advance_node(v, now);
    switch (dgram.kind) {
        case Datagram::Kind::Time: {
            if (n.attacker) return;  // attackers never adjust their own clocks
            n.table.record(from, dgram.clock_ms, n.uptime_ms);
            return;
        }
        case Datagram::Kind::Inventory: {
            const auto& ids = *dgram.ids;
            // announcements only append; resume after the last processed tail
            // and make a full pass once per heartbeat period
            PeerInvCursor& cur = n.peer_inv[from];
            size_t start = 0;
            bool full = !cur.valid || (now - cur.last_full_s) >= kFullDiffPeriodS;
            if (!full) {
                bool found = false;
                for (size_t k = ids.size(); k-- > 0;) {
                    if (ids[k] == cur.tail) {
                        start = k + 1;
                        found = true;
                        break;
                    }
                }
                if (!found) full = true;
            }
            if (full) {
                start = 0;
                cur.last_full_s = now;
            }
            std::vector<dissem::MessageId> wants;
            for (size_t k = start; k < ids.size(); ++k) {
                const auto& id = ids[k];
                if (n.cache.contains(id)) continue;
                auto pit = n.pending_req.find(id);
                if (pit != n.pending_req.end() && pit->second > now) continue;
                n.pending_req[id] = now + kRequestTimeoutS;
                wants.push_back(id);
            }
            if (!ids.empty()) {
                cur.tail = ids.back();
                cur.valid = true;
            }
            if (!wants.empty())
                send_datagram(v, make_id_list_dgram(Datagram::Kind::Request, std::move(wants)),
                              now);
            return;
        }
        case Datagram::Kind::Request: {
            for (const auto& id : *dgram.ids) {
                if (!n.cache.has_payload(id) || n.pending_tx.count(id)) continue;
                const Bytes* body = n.cache.payload(id);
                n.pending_tx.insert(id);
                send_datagram(v, make_payload_dgram(std::make_shared<const Bytes>(*body), id),
                              now);
            }
            return;
        }
        case Datagram::Kind::Payload: {
            const dissem::MessageId& id = dgram.id;
            BytesView body(*dgram.body);
            n.pending_req.erase(id);
            // a neighbor already transmitted it; cancel our own queued copy
            if (n.pending_tx.count(id)) {
                size_t first = n.tx_busy ? 1 : 0;
                for (size_t i = first; i < n.txq.size(); ++i) {
                    if (n.txq[i].dgram.kind == Datagram::Kind::Payload &&
                        n.txq[i].dgram.id == id)
                        n.txq[i].canceled = true;
                }
            }
            sync_crypto(v);
            auto outcome = dissem::on_payload_with_id(
                n.cache, [this](BytesView b) { return payload_well_formed(b); },
                [this, v](BytesView b, double t) { return trial_decrypt(v, b, t); }, id, body,
                now, cache_epoch(v));
            if (outcome.malformed) {
                ++malformed_;
                return;
            }
            if (outcome.fresh) {
                note_arrival(v, id, outcome);
                schedule_announce(v, now);
            }
            return;
        }
    }
}

void Runner::handle_vote(uint32_t v, double now) {
    NodeRt& n = nodes_[v];
    advance_node(v, now);
    if (n.attacker) {
        double fabricated = cfg_.genesis_margin_s * 1000.0 + now * 1000.0 +
                            n.rng.uniform_range(-kAttackWindowS * 1000.0, kAttackWindowS * 1000.0);
        send_datagram(v, make_time_dgram(fabricated), now);
    } else {
        auto cands = n.table.candidates(n.uptime_ms);
        cands.push_back(n.clock.value_ms);
        n.clock.value_ms = timesync::three_majority_vote(cands, cfg_.epsilon_ms, n.rng);
        n.table.clear();
        sync_crypto(v);
        send_datagram(v, make_time_dgram(n.clock.value_ms), now);
    }
    push_event(now + cfg_.vote_period_s, v, Ev::Vote);
}

void Runner::emit_announce(uint32_t v, double now) {
    NodeRt& n = nodes_[v];
    n.cache.evict(cache_epoch(v));
    auto ids = dissem::announce(n.cache);
    if (!ids.empty())
        send_datagram(v, make_id_list_dgram(Datagram::Kind::Inventory, std::move(ids)), now);
}

void Runner::handle_heartbeat(uint32_t v, double now) {
    advance_node(v, now);
    emit_announce(v, now);
    push_event(now + cfg_.heartbeat_s, v, Ev::Heartbeat);
}

void Runner::handle_announce_flush(uint32_t v, double now) {
    NodeRt& n = nodes_[v];
    n.announce_pending = false;
    advance_node(v, now);
    emit_announce(v, now);
}

void Runner::handle_user_send(uint32_t v, double now) {
    NodeRt& n = nodes_[v];
    advance_node(v, now);
    sync_crypto(v);
    uint64_t epoch = node_epoch(v);
    if (epoch <= ratchet::max_epoch(depth_) && honest_.size() > 1) {
        uint32_t recipient = v;
        while (recipient == v) recipient = honest_[n.rng.uniform(honest_.size())];
        Bytes body = build_payload(v, recipient, epoch);
        dissem::MessageId id = dissem::insert_outgoing(n.cache, body, cache_epoch(v));
        bool counted = now >= cfg_.stabilization_s;
        registry_.emplace(id, MsgRecord{recipient, counted});
        if (counted) ++sent_counted_;
        schedule_announce(v, now);
    }
    push_event(now + cfg_.message_interval_s, v, Ev::UserSend);
}

void Runner::handle_tx_done(uint32_t v, double now) {
    NodeRt& n = nodes_[v];
    if (n.txq.empty()) {
        n.tx_busy = false;
        return;
    }
    TxItem item = std::move(n.txq.front());
    n.txq.pop_front();
    if (item.dgram.kind == Datagram::Kind::Payload) n.pending_tx.erase(item.dgram.id);

    const auto& adj = neighbors(now);
    for (uint32_t nb : adj[v]) receive(nb, v, item.dgram, now);

    while (!n.txq.empty() && n.txq.front().canceled) {
        if (n.txq.front().dgram.kind == Datagram::Kind::Payload)
            n.pending_tx.erase(n.txq.front().dgram.id);
        n.txq.pop_front();
    }
    if (!n.txq.empty()) {
        push_event(now + transmission_delay_s(n.txq.front().dgram.wire_size, cfg_.bandwidth_bps),
                   v, Ev::TxDone);
    } else {
        n.tx_busy = false;
    }
}

void Runner::handle_sample(double now) {
    // modal epoch share over honest nodes, clocks viewed without mutation
    std::unordered_map<uint64_t, uint32_t> buckets;
    for (uint32_t v : honest_) {
        double ms = std::max(0.0, clock_view_ms(v, now));
        uint64_t e = ratchet::current_epochs(ms / 1000.0, rule_).encrypt_epoch;
        buckets[e]++;
    }
    uint32_t mode = 0;
    for (const auto& [e, c] : buckets) mode = std::max(mode, c);
    TimelineSample s;
    s.t_s = now;
    s.sync_share = honest_.empty() ? 0.0 : static_cast<double>(mode) / honest_.size();
    s.arrived_share = sent_counted_ ? static_cast<double>(arrived_counted_) / sent_counted_ : 0.0;
    s.successful_share =
        sent_counted_ ? static_cast<double>(delivered_counted_) / sent_counted_ : 0.0;
    timeline_.push_back(s);
    push_event(now + cfg_.sample_period_s, 0, Ev::Sample);
}

RunResult Runner::run() {
    const uint32_t n = cfg_.users;
    nodes_.resize(n);

    // attacker subset (deterministic partial Fisher-Yates over node ids)
    std::vector<uint32_t> ids(n);
    for (uint32_t i = 0; i < n; ++i) ids[i] = i;
    for (uint32_t i = 0; i < cfg_.attackers; ++i) {
        uint32_t j = i + static_cast<uint32_t>(run_rng_.uniform(n - i));
        std::swap(ids[i], ids[j]);
    }
    for (uint32_t i = 0; i < cfg_.attackers; ++i) nodes_[ids[i]].attacker = true;
    for (uint32_t i = 0; i < n; ++i)
        if (!nodes_[i].attacker) honest_.push_back(i);

    Drbg master(seed_);
    for (uint32_t i = 0; i < n; ++i) {
        NodeRt& nd = nodes_[i];
        nd.rng = SimRng(mix_seed(seed_, i));
        nd.clock.value_ms = cfg_.genesis_margin_s * 1000.0 +
                            nd.rng.uniform_range(-cfg_.clock_offset_s, cfg_.clock_offset_s) * 1000.0;
        nd.clock.drift_ms_per_min =
            nd.rng.uniform_range(-cfg_.drift_ms_per_min, cfg_.drift_ms_per_min);
        if (cfg_.crypto == CryptoMode::Real) {
            nd.drbg = master.fork(i);
            auto [pk, sk] = ratchet::keygen(depth_, *nd.drbg);
            nd.pk = std::move(pk);
            nd.session.emplace(std::move(sk), rule_, nd.drbg->fork(1));
        }
        sync_crypto(i);

        push_event(nd.rng.uniform_range(0.0, cfg_.vote_period_s), i, Ev::Vote);
        push_event(nd.rng.uniform_range(0.0, cfg_.heartbeat_s), i, Ev::Heartbeat);
        if (cfg_.message_interval_s > 0 && !nd.attacker)
            push_event(nd.rng.uniform_range(0.0, cfg_.message_interval_s), i, Ev::UserSend);
    }

    if (cfg_.movement == MovementModel::Static) {
        auto pos = positions_at(cfg_, trace_, 0.0, nullptr);
        static_adj_ = connectivity(pos, cfg_.radius_m, nullptr);
    }

    push_event(0.0, 0, Ev::Sample);

    while (!q_.empty()) {
        Event ev = q_.top();
        if (ev.t > cfg_.duration_s) break;
        q_.pop();
        switch (ev.kind) {
            case Ev::Vote: handle_vote(ev.node, ev.t); break;
            case Ev::Heartbeat: handle_heartbeat(ev.node, ev.t); break;
            case Ev::UserSend: handle_user_send(ev.node, ev.t); break;
            case Ev::TxDone: handle_tx_done(ev.node, ev.t); break;
            case Ev::Sample: handle_sample(ev.t); break;
            case Ev::AnnounceFlush: handle_announce_flush(ev.node, ev.t); break;
        }
    }

    RunResult out;
    out.timeline = std::move(timeline_);
    out.summary.seed = seed_;
    out.summary.time_to_sync_s = time_to_sync(out.timeline);
    out.summary.sent_counted = sent_counted_;
    out.summary.malformed = malformed_;
    if (sent_counted_ > 0) {
        out.summary.success_ratio = static_cast<double>(delivered_counted_) / sent_counted_;
        out.summary.arrived_ratio = static_cast<double>(arrived_counted_) / sent_counted_;
    }
    return out;
}

}  // namespace

double time_to_sync(const std::vector<TimelineSample>& timeline, double threshold) {
    for (const auto& s : timeline)
        if (s.sync_share >= threshold) return s.t_s;
    return -1.0;
}

RunResult run_single(const SimConfig& cfg, uint64_t seed, const TraceData* trace) {
    cfg.validate();
    Runner runner(cfg, seed, trace);
    return runner.run();
}

std::vector<RunResult> run_campaign(const SimConfig& cfg, uint32_t jobs) {
    cfg.validate();
    TraceData trace;
    const TraceData* trace_ptr = nullptr;
    if (cfg.movement == MovementModel::Trace) {
        trace = load_trace(cfg.trace_file);
        trace_ptr = &trace;
    }

    std::vector<RunResult> results(cfg.runs);
    if (jobs == 0) jobs = 1;
    jobs = std::min<uint32_t>(jobs, cfg.runs);

    if (jobs == 1) {
        for (uint32_t i = 0; i < cfg.runs; ++i)
            results[i] = run_single(cfg, cfg.seed + i, trace_ptr);
        return results;
    }

    std::atomic<uint32_t> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (uint32_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&]() {
            while (true) {
                uint32_t i = next.fetch_add(1);
                if (i >= cfg.runs) return;
                try {
                    results[i] = run_single(cfg, cfg.seed + i, trace_ptr);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

void write_outputs(const std::vector<RunResult>& results, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    char buf[256];

    std::ofstream runs(out_dir + "/runs.csv", std::ios::binary);
    if (!runs.good()) throw std::runtime_error("cannot write " + out_dir + "/runs.csv");
    runs << "seed,time_to_sync_s,success_ratio,arrived_ratio\n";
    for (const auto& r : results) {
        std::snprintf(buf, sizeof(buf), "%llu,%.1f,%.6f,%.6f\n",
                      static_cast<unsigned long long>(r.summary.seed), r.summary.time_to_sync_s,
                      r.summary.success_ratio, r.summary.arrived_ratio);
        runs << buf;
    }
    runs.close();

    for (const auto& r : results) {
        std::string path =
            out_dir + "/timeline_" + std::to_string(r.summary.seed) + ".csv";
        std::ofstream tl(path, std::ios::binary);
        if (!tl.good()) throw std::runtime_error("cannot write " + path);
        tl << "t_s,sync_share,arrived_share,successful_share\n";
        for (const auto& s : r.timeline) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.6f,%.6f,%.6f\n", s.t_s, s.sync_share,
                          s.arrived_share, s.successful_share);
            tl << buf;
        }
    }
}

}  // namespace epochmesh::sim
