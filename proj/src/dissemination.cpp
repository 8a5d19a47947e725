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

#include "epochmesh/dissemination.hpp"

#include <algorithm>

#include "epochmesh/sha256.hpp"

namespace epochmesh::dissem {

MessageId message_id(BytesView payload_body) { return sha256(payload_body); }

bool SeenCache::insert(const MessageId& id, Bytes payload, uint64_t epoch) {
    auto [it, fresh] = entries_.try_emplace(id, Entry{epoch, true, std::move(payload)});
    if (fresh) order_.push_back(id);
    return fresh;
}

bool SeenCache::has_payload(const MessageId& id) const {
    auto it = entries_.find(id);
    return it != entries_.end() && it->second.have_payload;
}

const Bytes* SeenCache::payload(const MessageId& id) const {
    auto it = entries_.find(id);
    if (it == entries_.end() || !it->second.have_payload) return nullptr;
    return &it->second.payload;
}

std::vector<MessageId> SeenCache::forwardable_ids() const {
    std::vector<MessageId> out;
    out.reserve(order_.size());
    for (const auto& id : order_) {
        auto it = entries_.find(id);
        if (it != entries_.end() && it->second.have_payload) out.push_back(id);
    }
    return out;
}

void SeenCache::evict(uint64_t current_epoch) {
    // payload bytes leave with the decryptable window (age >= 2 epochs);
    // ids linger two epochs longer (age >= 4)
    bool compact = false;
    for (auto it = entries_.begin(); it != entries_.end();) {
        uint64_t age = current_epoch >= it->second.insert_epoch
                           ? current_epoch - it->second.insert_epoch
                           : 0;
        if (age >= 4) {
            it = entries_.erase(it);
            compact = true;
        } else {
            if (age >= 2 && it->second.have_payload) {
                secure_wipe(it->second.payload.data(), it->second.payload.size());
                it->second.payload.clear();
                it->second.payload.shrink_to_fit();
                it->second.have_payload = false;
            }
            ++it;
        }
    }
    if (compact) {
        order_.erase(std::remove_if(order_.begin(), order_.end(),
                                    [this](const MessageId& id) { return !entries_.count(id); }),
                     order_.end());
    }
}

Bytes encode_id_list(uint8_t tag, const std::vector<MessageId>& ids) {
    Bytes out;
    out.reserve(3 + ids.size() * 32);
    out.push_back(tag);
    put_u16be(out, static_cast<uint16_t>(ids.size()));
    for (const auto& id : ids) out.insert(out.end(), id.begin(), id.end());
    return out;
}

std::optional<std::vector<MessageId>> parse_id_list(uint8_t tag, BytesView data) {
    if (data.size() < 3 || data[0] != tag) return std::nullopt;
    size_t count = get_u16be(data.data() + 1);
    if (data.size() != 3 + count * 32) return std::nullopt;
    std::vector<MessageId> ids(count);
    for (size_t i = 0; i < count; ++i)
        std::copy_n(data.data() + 3 + i * 32, 32, ids[i].begin());
    return ids;
}

Bytes encode_payload(BytesView body) {
    Bytes out;
    out.reserve(1 + body.size());
    out.push_back(kPayloadTag);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::vector<MessageId> announce(const SeenCache& cache) { return cache.forwardable_ids(); }

std::vector<MessageId> diff_request(const std::vector<MessageId>& inventory,
                                    const SeenCache& cache) {
    std::vector<MessageId> out;
    for (const auto& id : inventory)
        if (!cache.contains(id)) out.push_back(id);
    return out;
}

PayloadOutcome on_payload(SeenCache& cache, const PayloadCheck& validate,
                          const TrialDecrypt& decrypt, BytesView payload_body, double now_s,
                          uint64_t current_epoch) {
    if (payload_body.empty()) return {false, true, std::nullopt};
    return on_payload_with_id(cache, validate, decrypt, message_id(payload_body), payload_body,
                              now_s, current_epoch);
}

PayloadOutcome on_payload_with_id(SeenCache& cache, const PayloadCheck& validate,
                                  const TrialDecrypt& decrypt, const MessageId& id,
                                  BytesView payload_body, double now_s, uint64_t current_epoch) {
    PayloadOutcome out;
    if (payload_body.empty() || (validate && !validate(payload_body))) {
        out.malformed = true;
        return out;
    }
    if (cache.contains(id)) return out;  // duplicate: drop silently

    out.fresh = true;
    cache.insert(id, Bytes(payload_body.begin(), payload_body.end()), current_epoch);
    out.plaintext = decrypt(payload_body, now_s);
    return out;
}

MessageId insert_outgoing(SeenCache& cache, BytesView payload_body, uint64_t current_epoch) {
    MessageId id = message_id(payload_body);
    cache.insert(id, Bytes(payload_body.begin(), payload_body.end()), current_epoch);
    return id;
}

}  // namespace epochmesh::dissem
