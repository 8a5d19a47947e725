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

#include "epochmesh/hibe.hpp"

#include <stdexcept>

namespace epochmesh::hibe {

using bls::Fr;
using bls::G1;
using bls::G2;
using bls::Gt;

namespace {
constexpr uint8_t kTagMpk = 0x01;
constexpr uint8_t kTagUserKey = 0x03;
constexpr uint8_t kTagEncaps = 0x06;
}  // namespace

struct Ops {
    static MasterPublicKey make_mpk(uint32_t depth, G1 a1, G1 a2,
                                    std::vector<std::array<G1, 2>> level, Gt pbase) {
        MasterPublicKey k;
        k.depth_ = depth;
        k.a1_ = a1;
        k.a2_ = a2;
        k.level_ = std::move(level);
        k.pbase_ = pbase;
        return k;
    }
    static const G1& a1(const MasterPublicKey& k) { return k.a1_; }
    static const G1& a2(const MasterPublicKey& k) { return k.a2_; }
    static const std::vector<std::array<G1, 2>>& level(const MasterPublicKey& k) {
        return k.level_;
    }
    static const Gt& pbase(const MasterPublicKey& k) { return k.pbase_; }

    static MasterSecret make_msk(uint32_t depth, Fr k0, Fr k1,
                                 std::vector<std::array<std::array<Fr, 2>, 2>> w) {
        MasterSecret m;
        m.depth_ = depth;
        m.k0_ = k0;
        m.k1_ = k1;
        m.w_ = std::move(w);
        return m;
    }
    static const Fr& k0(const MasterSecret& m) { return m.k0_; }
    static const Fr& k1(const MasterSecret& m) { return m.k1_; }
    static const std::vector<std::array<std::array<Fr, 2>, 2>>& w(const MasterSecret& m) {
        return m.w_;
    }
};

Identity Identity::child(int bit) const {
    if (length >= kMaxDepth) throw std::invalid_argument("identity at maximum depth");
    Identity c = *this;
    if (bit) c.bits |= (1u << length);
    c.length += 1;
    return c;
}

bool Identity::is_prefix_of(const Identity& other) const {
    if (length > other.length) return false;
    for (uint32_t i = 0; i < length; ++i)
        if (bit_at(i) != other.bit_at(i)) return false;
    return true;
}

std::string Identity::to_string() const {
    std::string s;
    for (uint32_t i = 0; i < length; ++i) s.push_back(bit_at(i) ? '1' : '0');
    return s;
}

void MasterSecret::wipe() {
    k0_.wipe();
    k1_.wipe();
    for (auto& lvl : w_)
        for (auto& bit : lvl)
            for (auto& f : bit) f.wipe();
    w_.clear();
    depth_ = 0;
}

void UserKey::wipe() {
    for (auto& g : d0) g.wipe();
    for (auto& g : leveled) g.wipe();
    for (auto& lvl : deleg)
        for (auto& bit : lvl)
            for (auto& g : bit) g.wipe();
    leveled.clear();
    deleg.clear();
    id = Identity{};
}

std::pair<MasterPublicKey, MasterSecret> setup(uint32_t depth, uint32_t security_bits, Drbg& rng) {
    if (security_bits != 128) throw std::invalid_argument("unsupported security level");
    if (depth < 1 || depth > kMaxDepth) throw std::invalid_argument("tree depth out of range");

    Fr a = Fr::random(rng);
    Fr k0 = Fr::random(rng);
    Fr k1 = Fr::random(rng);
    std::vector<std::array<std::array<Fr, 2>, 2>> w(depth);
    for (auto& lvl : w)
        for (auto& bit : lvl)
            for (auto& f : bit) f = Fr::random(rng);

    const G1& g1 = G1::generator();
    std::vector<std::array<G1, 2>> level(depth);
    for (uint32_t i = 0; i < depth; ++i)
        for (int b = 0; b < 2; ++b)
            level[i][b] = g1.mul(w[i][b][0].add(a.mul(w[i][b][1])));

    Gt pbase = Gt::pairing_generator().pow(k0.add(a.mul(k1)));
    MasterPublicKey mpk = Ops::make_mpk(depth, g1, g1.mul(a), std::move(level), pbase);
    MasterSecret msk = Ops::make_msk(depth, k0, k1, std::move(w));
    a.wipe();
    return {std::move(mpk), std::move(msk)};
}

UserKey usk_gen(const MasterSecret& msk, const Identity& id, Drbg& rng) {
    if (id.length > msk.depth()) throw std::invalid_argument("identity longer than tree depth");
    const auto& w = Ops::w(msk);
    const G2& g2 = G2::generator();

    UserKey key;
    key.id = id;
    key.depth = msk.depth();
    Fr x0 = Ops::k0(msk);
    Fr x1 = Ops::k1(msk);
    key.leveled.reserve(id.length);
    for (uint32_t i = 0; i < id.length; ++i) {
        Fr s = Fr::random(rng);
        int b = id.bit_at(i);
        x0 = x0.sub(s.mul(w[i][b][0]));
        x1 = x1.sub(s.mul(w[i][b][1]));
        key.leveled.push_back(g2.mul(s));
        s.wipe();
    }
    key.d0 = {g2.mul(x0), g2.mul(x1)};
    x0.wipe();
    x1.wipe();
    key.deleg.reserve(msk.depth() - id.length);
    for (uint32_t j = id.length; j < msk.depth(); ++j) {
        std::array<std::array<G2, 2>, 2> entry;
        for (int b = 0; b < 2; ++b)
            entry[b] = {g2.mul(w[j][b][0]), g2.mul(w[j][b][1])};
        key.deleg.push_back(entry);
    }
    return key;
}

UserKey delegate_key(const UserKey& parent, const Identity& child_id, Drbg& rng) {
    if (!(parent.id.is_prefix_of(child_id)) || child_id.length == parent.id.length)
        throw std::invalid_argument("child identity must strictly extend the parent identity");
    if (child_id.length > parent.depth) throw std::invalid_argument("tree depth exceeded");
    if (parent.deleg.size() < child_id.length - parent.id.length)
        throw std::invalid_argument("parent key lacks delegation material");

    const G2& g2 = G2::generator();
    UserKey key = parent;
    for (uint32_t lvl = parent.id.length; lvl < child_id.length; ++lvl) {
        int bit = child_id.bit_at(lvl);
        const auto dw = key.deleg.front()[bit];
        Fr s = Fr::random(rng);
        key.d0[0] = key.d0[0].add(dw[0].mul(s).neg());
        key.d0[1] = key.d0[1].add(dw[1].mul(s).neg());
        key.leveled.push_back(g2.mul(s));
        s.wipe();
        key.deleg.erase(key.deleg.begin());
        key.id = key.id.child(bit);
    }
    return key;
}

std::pair<Gt, Encapsulation> encaps(const MasterPublicKey& mpk, const Identity& id, Drbg& rng) {
    if (id.length > mpk.depth()) throw std::invalid_argument("identity longer than tree depth");
    Fr rho = Fr::random(rng);
    Encapsulation enc;
    enc.c.reserve(2 + id.length);
    enc.c.push_back(Ops::a1(mpk).mul(rho));
    enc.c.push_back(Ops::a2(mpk).mul(rho));
    for (uint32_t i = 0; i < id.length; ++i)
        enc.c.push_back(Ops::level(mpk)[i][id.bit_at(i)].mul(rho));
    Gt k = Ops::pbase(mpk).pow(rho);
    rho.wipe();
    return {k, std::move(enc)};
}

Gt decaps(const UserKey& key, const Identity& id, const Encapsulation& enc) {
    if (!(key.id == id)) throw std::invalid_argument("key identity mismatch");
    if (enc.c.size() != 2 + id.length)
        throw std::invalid_argument("encapsulation has wrong component count");
    std::vector<std::pair<G1, G2>> pairs;
    pairs.reserve(enc.c.size());
    pairs.emplace_back(enc.c[0], key.d0[0]);
    pairs.emplace_back(enc.c[1], key.d0[1]);
    for (uint32_t i = 0; i < id.length; ++i) pairs.emplace_back(enc.c[2 + i], key.leveled[i]);
    return bls::multi_pairing(pairs);
}

// ---- serialization ----

size_t MasterPublicKey::encoded_size(uint32_t depth) {
    return 2 + (2 + 2 * size_t{depth}) * bls::kG1Bytes + bls::kGtBytes;
}

Bytes MasterPublicKey::to_bytes() const {
    Bytes out;
    out.reserve(encoded_size(depth_));
    out.push_back(kTagMpk);
    out.push_back(static_cast<uint8_t>(depth_));
    auto push_g1 = [&out](const bls::G1& p) {
        auto b = p.to_bytes();
        out.insert(out.end(), b.begin(), b.end());
    };
    push_g1(a1_);
    push_g1(a2_);
    for (const auto& lvl : level_) {
        push_g1(lvl[0]);
        push_g1(lvl[1]);
    }
    auto pb = pbase_.to_bytes();
    out.insert(out.end(), pb.begin(), pb.end());
    return out;
}

std::optional<MasterPublicKey> MasterPublicKey::from_bytes(BytesView data) {
    if (data.size() < 2 || data[0] != kTagMpk) return std::nullopt;
    uint32_t depth = data[1];
    if (depth < 1 || depth > kMaxDepth) return std::nullopt;
    if (data.size() != encoded_size(depth)) return std::nullopt;
    size_t off = 2;
    auto read_g1 = [&data, &off]() -> std::optional<bls::G1> {
        auto p = bls::G1::from_bytes(data.data() + off);
        off += bls::kG1Bytes;
        return p;
    };
    auto a1 = read_g1();
    auto a2 = read_g1();
    if (!a1 || !a2) return std::nullopt;
    std::vector<std::array<bls::G1, 2>> level(depth);
    for (uint32_t i = 0; i < depth; ++i) {
        auto z0 = read_g1();
        auto z1 = read_g1();
        if (!z0 || !z1) return std::nullopt;
        level[i] = {*z0, *z1};
    }
    auto pbase = bls::Gt::from_bytes(data.data() + off);
    if (!pbase) return std::nullopt;
    return Ops::make_mpk(depth, *a1, *a2, std::move(level), *pbase);
}

size_t Encapsulation::encoded_size(uint32_t id_length) {
    return 2 + (2 + size_t{id_length}) * bls::kG1Bytes;
}

Bytes Encapsulation::to_bytes() const {
    Bytes out;
    out.reserve(2 + c.size() * bls::kG1Bytes);
    out.push_back(kTagEncaps);
    out.push_back(static_cast<uint8_t>(c.size()));
    for (const auto& p : c) {
        auto b = p.to_bytes();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

std::optional<Encapsulation> Encapsulation::from_bytes(BytesView data) {
    if (data.size() < 2 || data[0] != kTagEncaps) return std::nullopt;
    size_t count = data[1];
    if (count < 2 || count > 2 + kMaxDepth) return std::nullopt;
    if (data.size() != 2 + count * bls::kG1Bytes) return std::nullopt;
    Encapsulation enc;
    enc.c.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        auto p = bls::G1::from_bytes(data.data() + 2 + i * bls::kG1Bytes);
        if (!p) return std::nullopt;
        enc.c.push_back(*p);
    }
    return enc;
}

Bytes UserKey::to_bytes() const {
    Bytes out;
    out.push_back(kTagUserKey);
    out.push_back(static_cast<uint8_t>(id.length));
    put_u32le(out, id.bits);
    out.push_back(static_cast<uint8_t>(depth));
    auto push_g2 = [&out](const bls::G2& p) {
        auto b = p.to_bytes();
        out.insert(out.end(), b.begin(), b.end());
    };
    push_g2(d0[0]);
    push_g2(d0[1]);
    for (const auto& p : leveled) push_g2(p);
    out.push_back(static_cast<uint8_t>(deleg.size()));
    for (const auto& lvl : deleg)
        for (const auto& bit : lvl) {
            push_g2(bit[0]);
            push_g2(bit[1]);
        }
    return out;
}

std::optional<UserKey> UserKey::from_bytes(BytesView data) {
    if (data.size() < 8 || data[0] != kTagUserKey) return std::nullopt;
    UserKey key;
    key.id.length = data[1];
    if (key.id.length > kMaxDepth) return std::nullopt;
    key.id.bits = get_u32le(data.data() + 2);
    key.depth = data[6];
    if (key.depth > kMaxDepth || key.id.length > key.depth) return std::nullopt;
    size_t off = 7;
    auto read_g2 = [&data, &off]() -> std::optional<bls::G2> {
        if (off + bls::kG2Bytes > data.size()) return std::nullopt;
        auto p = bls::G2::from_bytes(data.data() + off);
        off += bls::kG2Bytes;
        return p;
    };
    auto d0a = read_g2();
    auto d0b = read_g2();
    if (!d0a || !d0b) return std::nullopt;
    key.d0 = {*d0a, *d0b};
    for (uint32_t i = 0; i < key.id.length; ++i) {
        auto p = read_g2();
        if (!p) return std::nullopt;
        key.leveled.push_back(*p);
    }
    if (off >= data.size()) return std::nullopt;
    size_t ndeleg = data[off++];
    for (size_t j = 0; j < ndeleg; ++j) {
        std::array<std::array<bls::G2, 2>, 2> entry;
        for (int b = 0; b < 2; ++b) {
            auto p0 = read_g2();
            auto p1 = read_g2();
            if (!p0 || !p1) return std::nullopt;
            entry[b] = {*p0, *p1};
        }
        key.deleg.push_back(entry);
    }
    if (off != data.size()) return std::nullopt;
    return key;
}

}  // namespace epochmesh::hibe
