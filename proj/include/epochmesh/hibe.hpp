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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "epochmesh/bls12_381.hpp"
#include "epochmesh/bytes.hpp"
#include "epochmesh/rng.hpp"

// Anonymous hierarchical identity-based key encapsulation over BLS12-381.
//
// Identities are paths in a binary tree of depth at most kMaxDepth. An
// encapsulation to an identity of length n consists of 2+n G1 elements and a
// session key in Gt; component count and byte length depend only on n, never
// on the key material, so ciphertexts cannot be matched to a public key by
// shape. Secret keys carry delegation material for the subtree below their
// identity and nothing else: a key for id can derive keys exactly for the
// descendants of id.

namespace epochmesh::hibe {

constexpr uint32_t kMaxDepth = 32;

struct GroupParams {
    uint32_t security_bits;
    uint32_t mddh_k;
    const char* curve;
};
constexpr GroupParams kGroupParams{128, 1, "BLS12-381"};

// Path in the binary identity tree; the empty path is the root.
struct Identity {
    uint32_t length = 0;
    uint32_t bits = 0;  // bit i = branch taken at level i+1

    static Identity root() { return {}; }
    bool is_root() const { return length == 0; }
    int bit_at(uint32_t level) const { return (bits >> level) & 1; }

    Identity child(int bit) const;
    // true when this is an ancestor of (or equal to) other
    bool is_prefix_of(const Identity& other) const;
    bool operator==(const Identity& other) const {
        uint32_t mask = length == 32 ? ~0u : ((1u << length) - 1);
        return length == other.length && (bits & mask) == (other.bits & mask);
    }
    std::string to_string() const;  // "", "0", "01", ...
};

class MasterPublicKey {
  public:
    uint32_t depth() const { return depth_; }

    Bytes to_bytes() const;
    static std::optional<MasterPublicKey> from_bytes(BytesView data);
    // Encoded size for a given depth; a pure function of (lambda, k, depth).
    static size_t encoded_size(uint32_t depth);

  private:
    friend struct Ops;
    uint32_t depth_ = 0;
    bls::G1 a1_, a2_;
    std::vector<std::array<bls::G1, 2>> level_;  // one pair of basis points per tree level
    bls::Gt pbase_;
};

// Scalars behind the master public key. Wiped on destruction; the ratchet
// derives the root user key and then destroys this immediately.
class MasterSecret {
  public:
    MasterSecret() = default;
    ~MasterSecret() { wipe(); }
    MasterSecret(const MasterSecret&) = delete;
    MasterSecret& operator=(const MasterSecret&) = delete;
    MasterSecret(MasterSecret&&) = default;
    MasterSecret& operator=(MasterSecret&&) = default;

    uint32_t depth() const { return depth_; }
    void wipe();

  private:
    friend struct Ops;
    uint32_t depth_ = 0;
    bls::Fr k0_, k1_;
    std::vector<std::array<std::array<bls::Fr, 2>, 2>> w_;  // w_[level][bit] = (w0, w1)
};

// Secret key plus delegation key for one identity.
struct UserKey {
    Identity id;
    uint32_t depth = 0;
    std::array<bls::G2, 2> d0;
    std::vector<bls::G2> leveled;  // one element per identity level
    // delegation key: for each level below the identity, per branch bit, a
    // pair of G2 elements
    std::vector<std::array<std::array<bls::G2, 2>, 2>> deleg;

    void wipe();
    // Drops the delegation material, keeping decapsulation ability only.
    void strip_delegation() { deleg.clear(); }

    Bytes to_bytes() const;
    static std::optional<UserKey> from_bytes(BytesView data);
};

struct Encapsulation {
    std::vector<bls::G1> c;  // 2 + |id| components

    Bytes to_bytes() const;
    static std::optional<Encapsulation> from_bytes(BytesView data);
    static size_t encoded_size(uint32_t id_length);
};

// The five algorithms.

// Key generation for a tree of the given depth. security_bits must be 128.
std::pair<MasterPublicKey, MasterSecret> setup(uint32_t depth, uint32_t security_bits, Drbg& rng);

UserKey usk_gen(const MasterSecret& msk, const Identity& id, Drbg& rng);

// child_id must strictly extend parent.id (by one or more levels).
UserKey delegate_key(const UserKey& parent, const Identity& child_id, Drbg& rng);

std::pair<bls::Gt, Encapsulation> encaps(const MasterPublicKey& mpk, const Identity& id, Drbg& rng);

// Requires key.id == id and a well-formed encapsulation for |id|; the
// returned session key only matches the encapsulated one if the key and the
// ciphertext belong together (callers detect mismatch via the DEM).
bls::Gt decaps(const UserKey& key, const Identity& id, const Encapsulation& enc);

}  // namespace epochmesh::hibe
