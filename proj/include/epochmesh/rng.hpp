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

#include <cstdint>

#include "epochmesh/bytes.hpp"

namespace epochmesh {

// Deterministic byte generator used for all key material. Every operation
// that consumes randomness takes one of these, so a fixed seed reproduces
// keys, ciphertexts and simulation traces byte for byte.
class Drbg {
  public:
    explicit Drbg(uint64_t seed);
    explicit Drbg(BytesView seed_bytes);

    // Fresh instance seeded from the OS entropy pool.
    static Drbg from_system_entropy();

    void fill(uint8_t* out, size_t len);
    Bytes bytes(size_t len);
    uint64_t next_u64();

    // Independent child generator; advancing one does not affect the other.
    Drbg fork(uint64_t label);

  private:
    Drbg() = default;
    uint8_t state_[32] = {};
    uint64_t counter_ = 0;
    uint8_t buf_[32] = {};
    size_t buf_used_ = 32;
};

// Small fast generator for simulation decisions (placement, draws, timing).
// xoshiro256** seeded via splitmix64.
class SimRng {
  public:
    explicit SimRng(uint64_t seed);

    uint64_t next_u64();
    // Uniform in [0, n), n > 0.
    uint64_t uniform(uint64_t n);
    // Uniform double in [0, 1).
    double uniform01();
    // Uniform double in [lo, hi).
    double uniform_range(double lo, double hi);

  private:
    uint64_t s_[4];
};

}  // namespace epochmesh
