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

#pragma once

#include <array>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "epochmesh/bytes.hpp"

// Flooding with smart broadcast: nodes announce the ids of payloads they can
// forward, neighbors request only what they have not seen, and payloads are
// broadcast on request. Incoming payloads are trial-decrypted; there is no
// recipient field anywhere on the wire.

namespace epochmesh::dissem {

using MessageId = std::array<uint8_t, 32>;

// sha-256 of the canonical ciphertext bytes
MessageId message_id(BytesView payload_body);

struct MessageIdHash {
    size_t operator()(const MessageId& id) const {
        size_t h;
        std::memcpy(&h, id.data(), sizeof(h));  // ids are digests, already uniform
        return h;
    }
};

// Payload store plus duplicate filter, tied to the epoch clock. Payload bytes
// are kept while they are still within the decryptable window (current and
// previous epoch); the ids stay two epochs longer so late duplicates are
// still recognized and not re-flooded.
class SeenCache {
  public:
    // Returns false when the id was already present.
    bool insert(const MessageId& id, Bytes payload, uint64_t epoch);
    bool contains(const MessageId& id) const { return entries_.count(id) != 0; }
    bool has_payload(const MessageId& id) const;
    const Bytes* payload(const MessageId& id) const;

    // Ids of all currently forwardable payloads, in insertion order.
    std::vector<MessageId> forwardable_ids() const;

    // Applies the retention rules for the given current epoch.
    void evict(uint64_t current_epoch);

    size_t size() const { return entries_.size(); }

  private:
    struct Entry {
        uint64_t insert_epoch;
        bool have_payload;
        Bytes payload;
    };
    std::unordered_map<MessageId, Entry, MessageIdHash> entries_;
    std::vector<MessageId> order_;
};

// --- wire formats -----------------------------------------------------------
// inventory:  0x11 | count (2, BE) | count * 32-byte ids
// request:    0x12 | count (2, BE) | count * 32-byte ids
// payload:    0x13 | ciphertext bytes
constexpr uint8_t kInventoryTag = 0x11;
constexpr uint8_t kRequestTag = 0x12;
constexpr uint8_t kPayloadTag = 0x13;

Bytes encode_id_list(uint8_t tag, const std::vector<MessageId>& ids);
std::optional<std::vector<MessageId>> parse_id_list(uint8_t tag, BytesView data);
Bytes encode_payload(BytesView body);

// The announce step: everything forwardable right now.
std::vector<MessageId> announce(const SeenCache& cache);

// The request step: exactly inventory minus already-seen ids.
std::vector<MessageId> diff_request(const std::vector<MessageId>& inventory,
                                    const SeenCache& cache);

// Trial decryption hook; the real ratchet session or the simulator's
// size-faithful stand-in.
using TrialDecrypt = std::function<std::optional<Bytes>(BytesView payload_body, double now_s)>;
// Structural well-formedness check; malformed payloads are dropped uncached.
using PayloadCheck = std::function<bool(BytesView payload_body)>;

struct PayloadOutcome {
    bool fresh = false;      // first sighting; forward by announcing
    bool malformed = false;  // dropped without caching
    std::optional<Bytes> plaintext;
};

// Handles one received payload body: well-formedness, duplicate check, store,
// trial-decrypt. Forwarding happens regardless of whether decryption
// succeeded.
PayloadOutcome on_payload(SeenCache& cache, const PayloadCheck& validate,
                          const TrialDecrypt& decrypt, BytesView payload_body, double now_s,
                          uint64_t current_epoch);
// Same, with the id already computed (radio layers hash each payload once).
PayloadOutcome on_payload_with_id(SeenCache& cache, const PayloadCheck& validate,
                                  const TrialDecrypt& decrypt, const MessageId& id,
                                  BytesView payload_body, double now_s, uint64_t current_epoch);

// Sender-side bookkeeping: store an outgoing ciphertext so it becomes part of
// the next announce. Returns its id.
MessageId insert_outgoing(SeenCache& cache, BytesView payload_body, uint64_t current_epoch);

}  // namespace epochmesh::dissem
