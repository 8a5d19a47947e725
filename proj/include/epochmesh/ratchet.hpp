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

#include <optional>
#include <stdexcept>
#include <vector>

#include "epochmesh/aead.hpp"
#include "epochmesh/hibe.hpp"

// Key-evolving public-key encryption built on the HIBE: epochs are the nodes
// of the binary identity tree in depth-first preorder, the secret key is a
// stack of user keys whose top always belongs to the current epoch, and every
// update deletes the material for the epoch it leaves behind. Advancing is
// one-way; ciphertexts from earlier epochs stay sealed after the keys that
// could open them are gone.

namespace epochmesh::ratchet {

// Highest epoch index for a tree of the given depth (2^(depth+1) - 2).
uint64_t max_epoch(uint32_t depth);

// Depth-first preorder position -> tree path. Throws std::out_of_range when
// the epoch does not fit the tree.
hibe::Identity epoch_to_identity(uint64_t epoch, uint32_t depth);

class PublicKey {
  public:
    PublicKey() = default;
    PublicKey(uint64_t epoch, hibe::MasterPublicKey mpk) : epoch_(epoch), mpk_(std::move(mpk)) {}

    uint64_t epoch() const { return epoch_; }
    uint32_t depth() const { return mpk_.depth(); }
    const hibe::MasterPublicKey& mpk() const { return mpk_; }

    // The public half of the ratchet: only the epoch counter moves. The
    // stored epoch is advisory; encryption takes the epoch explicitly.
    void set_epoch(uint64_t epoch) { epoch_ = epoch; }

    Bytes to_bytes() const;
    static std::optional<PublicKey> from_bytes(BytesView data);

  private:
    uint64_t epoch_ = 0;
    hibe::MasterPublicKey mpk_;
};

class SecretKey {
  public:
    SecretKey() = default;

    uint64_t epoch() const { return epoch_; }
    uint32_t depth() const { return depth_; }
    size_t stack_size() const { return stack_.size(); }
    const std::vector<hibe::UserKey>& stack() const { return stack_; }
    bool exhausted() const;

    Bytes to_bytes() const;
    static std::optional<SecretKey> from_bytes(BytesView data);
    void wipe();

  private:
    friend std::pair<PublicKey, SecretKey> keygen(uint32_t, Drbg&);
    friend void update(SecretKey&, Drbg&);
    friend std::optional<Bytes> decrypt(uint64_t, const SecretKey&, const struct Ciphertext&);
    uint64_t epoch_ = 0;
    uint32_t depth_ = 0;
    std::vector<hibe::UserKey> stack_;  // top = back(), key for the current epoch
};

// Signals that the key has reached the last epoch of its tree.
struct KeyExhausted : std::runtime_error {
    KeyExhausted() : std::runtime_error("ratchet key lifetime exhausted") {}
};

// Wire format of an encrypted message:
// 0x05 | epoch (8, BE) | component count (1) | C | nonce (12) | body | tag (16).
// The epoch rides in clear (all recipients share it); nothing identifies the
// recipient.
struct Ciphertext {
    uint64_t epoch = 0;
    hibe::Encapsulation enc;
    aead::Nonce nonce{};
    Bytes sealed;  // AEAD output: body || tag

    Bytes to_bytes() const;
    static std::optional<Ciphertext> parse(BytesView data);
    // Exact wire size for a message of msg_len sent to an identity of the
    // given length; shape depends on nothing else.
    static size_t encoded_size(uint32_t id_length, size_t msg_len);
};

// FsKeyGen: the master secret derives the root user key and is destroyed.
std::pair<PublicKey, SecretKey> keygen(uint32_t depth, Drbg& rng);

// FsUpdate: advance one epoch. Deleted material is wiped. Throws KeyExhausted
// at the end of the tree.
void update(SecretKey& sk, Drbg& rng);

// FsEncrypt.
Bytes encrypt(uint64_t epoch, const PublicKey& pk, BytesView msg, Drbg& rng);

// FsDecrypt: succeeds iff sk still holds the key for this epoch and the
// ciphertext was made for it; wrong recipient and wrong epoch are
// indistinguishable failures.
std::optional<Bytes> decrypt(uint64_t epoch, const SecretKey& sk, const Ciphertext& ct);

// Wall-clock to epoch mapping.
struct EpochClockRule {
    double epoch_seconds = 60.0;
    double genesis_s = 0.0;
    bool smooth_rollover = true;  // ratchet at half period, keep previous key
};

struct EpochWindow {
    uint64_t encrypt_epoch = 0;
    std::vector<uint64_t> decryptable;  // newest first
};

EpochWindow current_epochs(double clock_s, const EpochClockRule& rule);

// Receiver-side state: the ratchet key plus, with smooth rollover, the bare
// user key of the sub-epoch just left, so boundary-straddling messages still
// decrypt.
class Session {
  public:
    Session(SecretKey sk, EpochClockRule rule, Drbg rng)
        : sk_(std::move(sk)), rule_(rule), rng_(std::move(rng)) {}

    const SecretKey& secret_key() const { return sk_; }
    const EpochClockRule& rule() const { return rule_; }
    uint64_t encrypt_epoch(double clock_s) const;

    // Ratchets forward until sk covers the epoch for this clock. Never moves
    // backwards. Returns false once the key is exhausted.
    bool advance_to_clock(double clock_s);

    std::optional<Bytes> try_decrypt(const Ciphertext& ct, double clock_s);

  private:
    SecretKey sk_;
    std::optional<hibe::UserKey> prev_;  // delegation-stripped key for epoch()-1
    uint64_t prev_epoch_ = 0;
    EpochClockRule rule_;
    Drbg rng_;
    bool exhausted_ = false;
};

}  // namespace epochmesh::ratchet
