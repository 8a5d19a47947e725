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

#include "epochmesh/rng.hpp"

#include <openssl/rand.h>

#include <cstring>
#include <stdexcept>

#include "epochmesh/sha256.hpp"

namespace epochmesh {

Drbg::Drbg(uint64_t seed) {
    Bytes s;
    put_u64be(s, seed);
    Digest d = sha256(s);
    std::memcpy(state_, d.data(), 32);
}

Drbg::Drbg(BytesView seed_bytes) {
    Digest d = sha256(seed_bytes);
    std::memcpy(state_, d.data(), 32);
}

Drbg Drbg::from_system_entropy() {
    uint8_t seed[32];
    if (RAND_bytes(seed, sizeof(seed)) != 1) throw std::runtime_error("system entropy unavailable");
    return Drbg(BytesView(seed, sizeof(seed)));
}

void Drbg::fill(uint8_t* out, size_t len) {
    while (len > 0) {
        if (buf_used_ == 32) {
            Bytes block;
            block.insert(block.end(), state_, state_ + 32);
            put_u64be(block, counter_++);
            Digest d = sha256(block);
            std::memcpy(buf_, d.data(), 32);
            buf_used_ = 0;
        }
        size_t take = std::min(len, size_t{32} - buf_used_);
        std::memcpy(out, buf_ + buf_used_, take);
        buf_used_ += take;
        out += take;
        len -= take;
    }
}

Bytes Drbg::bytes(size_t len) {
    Bytes out(len);
    fill(out.data(), len);
    return out;
}

uint64_t Drbg::next_u64() {
    uint8_t b[8];
    fill(b, 8);
    return get_u64be(b);
}

Drbg Drbg::fork(uint64_t label) {
    Bytes block;
    block.insert(block.end(), state_, state_ + 32);
    block.push_back(0xf0);  // domain separation from fill()
    put_u64be(block, label);
    Drbg child;
    Digest d = sha256(block);
    std::memcpy(child.state_, d.data(), 32);
    return child;
}

static uint64_t splitmix64(uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

SimRng::SimRng(uint64_t seed) {
    uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

static inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

uint64_t SimRng::next_u64() {
    uint64_t result = rotl(s_[1] * 5, 7) * 9;
    uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

uint64_t SimRng::uniform(uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    uint64_t limit = n * (UINT64_MAX / n);
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % n;
}

double SimRng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double SimRng::uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

}  // namespace epochmesh
