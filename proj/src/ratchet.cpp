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

#include "epochmesh/ratchet.hpp"

#include <cmath>
#include <stdexcept>

#include "epochmesh/sha256.hpp"

namespace epochmesh::ratchet {

namespace {
constexpr uint8_t kTagPublicKey = 0x02;
constexpr uint8_t kTagSecretKey = 0x04;
constexpr uint8_t kTagCiphertext = 0x05;

aead::Key dem_key(const bls::Gt& k) {
    auto raw = k.to_bytes();
    Digest d = sha256(BytesView(raw.data(), raw.size()));
    aead::Key key{};
    std::copy(d.begin(), d.end(), key.begin());
    secure_wipe(raw.data(), raw.size());
    return key;
}

Bytes ciphertext_header(const Ciphertext& ct) {
    Bytes header;
    header.push_back(kTagCiphertext);
    put_u64be(header, ct.epoch);
    Bytes encb = ct.enc.to_bytes();
    header.push_back(encb[1]);  // component count
    header.insert(header.end(), encb.begin() + 2, encb.end());
    header.insert(header.end(), ct.nonce.begin(), ct.nonce.end());
    return header;
}

std::optional<Bytes> open_with_key(const hibe::UserKey& key, const Ciphertext& ct) {
    if (ct.enc.c.size() != 2 + key.id.length) return std::nullopt;
    bls::Gt k = hibe::decaps(key, key.id, ct.enc);
    aead::Key dk = dem_key(k);
    k.wipe();
    Bytes header = ciphertext_header(ct);
    auto out = aead::open(dk, ct.nonce, ct.sealed, header);
    secure_wipe(dk.data(), dk.size());
    return out;
}
}  // namespace

uint64_t max_epoch(uint32_t depth) { return (uint64_t{1} << (depth + 1)) - 2; }

hibe::Identity epoch_to_identity(uint64_t epoch, uint32_t depth) {
    if (depth < 1 || depth > hibe::kMaxDepth) throw std::out_of_range("tree depth out of range");
    if (epoch > max_epoch(depth)) throw std::out_of_range("epoch beyond tree capacity");
    hibe::Identity id;
    uint64_t remaining = epoch;
    uint32_t level = 0;
    while (remaining > 0) {
        remaining -= 1;  // step past the current node into its subtrees
        uint64_t left_size = (uint64_t{1} << (depth - level)) - 1;
        if (remaining < left_size) {
            id = id.child(0);
        } else {
            id = id.child(1);
            remaining -= left_size;
        }
        ++level;
    }
    return id;
}

bool SecretKey::exhausted() const { return stack_.empty() || epoch_ >= max_epoch(depth_); }

std::pair<PublicKey, SecretKey> keygen(uint32_t depth, Drbg& rng) {
    auto [mpk, msk] = hibe::setup(depth, 128, rng);
    SecretKey sk;
    sk.epoch_ = 0;
    sk.depth_ = depth;
    sk.stack_.push_back(hibe::usk_gen(msk, hibe::Identity::root(), rng));
    msk.wipe();
    return {PublicKey(0, std::move(mpk)), std::move(sk)};
}

void update(SecretKey& sk, Drbg& rng) {
    if (sk.stack_.empty() || sk.epoch_ >= max_epoch(sk.depth_)) throw KeyExhausted();
    hibe::UserKey& top = sk.stack_.back();
    if (top.id.length == sk.depth_) {
        // leaf: the stored sibling/uncle key underneath becomes current
        top.wipe();
        sk.stack_.pop_back();
    } else {
        hibe::UserKey right = hibe::delegate_key(top, top.id.child(1), rng);
        hibe::UserKey left = hibe::delegate_key(top, top.id.child(0), rng);
        top.wipe();
        sk.stack_.pop_back();
        sk.stack_.push_back(std::move(right));
        sk.stack_.push_back(std::move(left));
    }
    sk.epoch_ += 1;
}

Bytes encrypt(uint64_t epoch, const PublicKey& pk, BytesView msg, Drbg& rng) {
    hibe::Identity id = epoch_to_identity(epoch, pk.depth());
    auto [k, enc] = hibe::encaps(pk.mpk(), id, rng);

    Ciphertext ct;
    ct.epoch = epoch;
    ct.enc = std::move(enc);
    rng.fill(ct.nonce.data(), ct.nonce.size());

    // header (everything before the sealed body) doubles as AEAD aad
    Bytes header = ciphertext_header(ct);
    aead::Key key = dem_key(k);
    k.wipe();
    ct.sealed = aead::seal(key, ct.nonce, msg, header);
    secure_wipe(key.data(), key.size());

    Bytes out = std::move(header);
    out.insert(out.end(), ct.sealed.begin(), ct.sealed.end());
    return out;
}

std::optional<Bytes> decrypt(uint64_t epoch, const SecretKey& sk, const Ciphertext& ct) {
    if (sk.depth_ == 0) return std::nullopt;
    if (epoch > max_epoch(sk.depth_)) return std::nullopt;
    hibe::Identity id = epoch_to_identity(epoch, sk.depth_);
    // top of the stack is the common case; older entries hold future epochs
    const hibe::UserKey* key = nullptr;
    for (auto it = sk.stack_.rbegin(); it != sk.stack_.rend(); ++it) {
        if (it->id == id) {
            key = &*it;
            break;
        }
    }
    if (key == nullptr) return std::nullopt;
    return open_with_key(*key, ct);
}

// ---- wire format ----

size_t Ciphertext::encoded_size(uint32_t id_length, size_t msg_len) {
    return 1 + 8 + 1 + (2 + size_t{id_length}) * bls::kG1Bytes + aead::kNonceSize + msg_len +
           aead::kTagSize;
}

Bytes Ciphertext::to_bytes() const {
    Bytes out;
    out.push_back(kTagCiphertext);
    put_u64be(out, epoch);
    Bytes encb = enc.to_bytes();
    out.push_back(encb[1]);
    out.insert(out.end(), encb.begin() + 2, encb.end());
    out.insert(out.end(), nonce.begin(), nonce.end());
    out.insert(out.end(), sealed.begin(), sealed.end());
    return out;
}

std::optional<Ciphertext> Ciphertext::parse(BytesView data) {
    if (data.size() < 1 + 8 + 1 || data[0] != kTagCiphertext) return std::nullopt;
    Ciphertext ct;
    ct.epoch = get_u64be(data.data() + 1);
    size_t count = data[9];
    if (count < 2 || count > 2 + hibe::kMaxDepth) return std::nullopt;
    size_t comp_bytes = count * bls::kG1Bytes;
    size_t min_size = 10 + comp_bytes + aead::kNonceSize + aead::kTagSize;
    if (data.size() < min_size) return std::nullopt;

    Bytes encb;
    encb.push_back(0x06);
    encb.push_back(static_cast<uint8_t>(count));
    encb.insert(encb.end(), data.begin() + 10, data.begin() + 10 + comp_bytes);
    auto enc = hibe::Encapsulation::from_bytes(encb);
    if (!enc) return std::nullopt;
    ct.enc = std::move(*enc);

    size_t off = 10 + comp_bytes;
    std::copy(data.begin() + off, data.begin() + off + aead::kNonceSize, ct.nonce.begin());
    off += aead::kNonceSize;
    ct.sealed.assign(data.begin() + off, data.end());
    return ct;
}

// ---- key serialization ----

Bytes PublicKey::to_bytes() const {
    Bytes out;
    out.push_back(kTagPublicKey);
    put_u64be(out, epoch_);
    Bytes m = mpk_.to_bytes();
    out.insert(out.end(), m.begin(), m.end());
    return out;
}

std::optional<PublicKey> PublicKey::from_bytes(BytesView data) {
    if (data.size() < 9 || data[0] != kTagPublicKey) return std::nullopt;
    uint64_t epoch = get_u64be(data.data() + 1);
    auto mpk = hibe::MasterPublicKey::from_bytes(data.subspan(9));
    if (!mpk) return std::nullopt;
    if (epoch > max_epoch(mpk->depth())) return std::nullopt;
    return PublicKey(epoch, std::move(*mpk));
}

Bytes SecretKey::to_bytes() const {
    Bytes out;
    out.push_back(kTagSecretKey);
    put_u64be(out, epoch_);
    out.push_back(static_cast<uint8_t>(depth_));
    out.push_back(static_cast<uint8_t>(stack_.size()));
    for (const auto& key : stack_) {
        Bytes kb = key.to_bytes();
        put_u32le(out, static_cast<uint32_t>(kb.size()));
        out.insert(out.end(), kb.begin(), kb.end());
    }
    return out;
}

std::optional<SecretKey> SecretKey::from_bytes(BytesView data) {
    if (data.size() < 11 || data[0] != kTagSecretKey) return std::nullopt;
    SecretKey sk;
    sk.epoch_ = get_u64be(data.data() + 1);
    sk.depth_ = data[9];
    if (sk.depth_ < 1 || sk.depth_ > hibe::kMaxDepth) return std::nullopt;
    if (sk.epoch_ > max_epoch(sk.depth_)) return std::nullopt;
    size_t count = data[10];
    if (count == 0 || count > sk.depth_ + 1) return std::nullopt;
    size_t off = 11;
    for (size_t i = 0; i < count; ++i) {
        if (off + 4 > data.size()) return std::nullopt;
        uint32_t len = get_u32le(data.data() + off);
        off += 4;
        if (off + len > data.size()) return std::nullopt;
        auto key = hibe::UserKey::from_bytes(data.subspan(off, len));
        if (!key) return std::nullopt;
        sk.stack_.push_back(std::move(*key));
        off += len;
    }
    if (off != data.size()) return std::nullopt;
    return sk;
}

void SecretKey::wipe() {
    for (auto& key : stack_) key.wipe();
    stack_.clear();
    epoch_ = 0;
}

// ---- wall clock mapping ----

EpochWindow current_epochs(double clock_s, const EpochClockRule& rule) {
    if (rule.epoch_seconds <= 0) throw std::invalid_argument("epoch duration must be positive");
    double period = rule.smooth_rollover ? rule.epoch_seconds / 2.0 : rule.epoch_seconds;
    double rel = clock_s - rule.genesis_s;
    if (rel < 0) rel = 0;
    uint64_t s = static_cast<uint64_t>(std::floor(rel / period));
    EpochWindow w;
    w.encrypt_epoch = s;
    w.decryptable.push_back(s);
    if (rule.smooth_rollover && s > 0) w.decryptable.push_back(s - 1);
    return w;
}

uint64_t Session::encrypt_epoch(double clock_s) const {
    return current_epochs(clock_s, rule_).encrypt_epoch;
}

bool Session::advance_to_clock(double clock_s) {
    uint64_t target = encrypt_epoch(clock_s);
    while (sk_.epoch() < target) {
        if (exhausted_) return false;
        // keep a decryption-only copy of the key being left behind
        hibe::UserKey leaving = sk_.stack().back();
        leaving.strip_delegation();
        try {
            update(sk_, rng_);
        } catch (const KeyExhausted&) {
            exhausted_ = true;
            leaving.wipe();
            return false;
        }
        if (prev_) prev_->wipe();
        prev_ = std::move(leaving);
        prev_epoch_ = sk_.epoch() - 1;
    }
    return true;
}

std::optional<Bytes> Session::try_decrypt(const Ciphertext& ct, double clock_s) {
    advance_to_clock(clock_s);
    EpochWindow w = current_epochs(clock_s, rule_);
    for (uint64_t e : w.decryptable) {
        if (e != ct.epoch) continue;
        if (e == sk_.epoch()) {
            if (auto m = decrypt(e, sk_, ct)) return m;
        } else if (prev_ && e == prev_epoch_) {
            if (auto m = open_with_key(*prev_, ct)) return m;
        }
    }
    return std::nullopt;
}

}  // namespace epochmesh::ratchet
