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
#include <vector>

#include "epochmesh/bytes.hpp"
#include "epochmesh/rng.hpp"

// Pairing-friendly curve BLS12-381.
//
// G1 is the order-r subgroup of E(Fp): y^2 = x^3 + 4, G2 the order-r subgroup
// of the twist E'(Fp2): y^2 = x^3 + 4(u+1), Gt the order-r subgroup of Fp12*.
// The pairing is the optimal ate pairing; the Fp12 tower is
// Fp2 = Fp[u]/(u^2+1), Fp6 = Fp2[v]/(v^3-(u+1)), Fp12 = Fp6[w]/(w^2-v).
//
// Byte formats follow the common 48/96-byte compressed point encoding
// (flag bits in the top three bits of the first byte). Gt elements serialize
// as 12 big-endian 48-byte field coefficients in the w-power basis.

namespace epochmesh::bls {

constexpr size_t kFpBytes = 48;
constexpr size_t kFrBytes = 32;
constexpr size_t kG1Bytes = 48;
constexpr size_t kG2Bytes = 96;
constexpr size_t kGtBytes = 576;

struct Fp {
    uint64_t v[6];
};

struct Fp2 {
    Fp c0, c1;  // c0 + c1*u
};

struct Fp6 {
    Fp2 c0, c1, c2;  // c0 + c1*v + c2*v^2
};

struct Fp12 {
    Fp6 c0, c1;  // c0 + c1*w
};

// Scalar field element (mod r), Montgomery form internally.
class Fr {
  public:
    Fr() : v_{0, 0, 0, 0} {}

    static Fr zero() { return Fr(); }
    static Fr one();
    static Fr from_u64(uint64_t x);
    // Uniform scalar from 64 generator bytes reduced mod r.
    static Fr random(Drbg& rng);

    Fr add(const Fr& o) const;
    Fr sub(const Fr& o) const;
    Fr mul(const Fr& o) const;
    Fr neg() const;
    bool is_zero() const;
    bool eq(const Fr& o) const;

    std::array<uint8_t, kFrBytes> to_bytes() const;                       // big-endian
    static std::optional<Fr> from_bytes(const uint8_t* p);                // rejects >= r
    void to_limbs(uint64_t out[4]) const;                                 // standard form
    void wipe();

  private:
    uint64_t v_[4];
    friend class Frimpl;
};

class G1;
class G2;

// Affine G1 point (or the identity).
class G1 {
  public:
    G1() : infinity_(true), x_{}, y_{} {}

    static const G1& generator();
    bool is_identity() const { return infinity_; }

    G1 add(const G1& o) const;
    G1 mul(const Fr& k) const;
    G1 neg() const;
    bool eq(const G1& o) const;
    bool on_curve() const;
    bool in_subgroup() const;

    std::array<uint8_t, kG1Bytes> to_bytes() const;
    // Decompresses and checks curve membership; subgroup check when requested.
    static std::optional<G1> from_bytes(const uint8_t* p, bool check_subgroup = true);
    void wipe();

    Fp x_raw() const { return x_; }
    Fp y_raw() const { return y_; }

  private:
    friend struct PairEngine;
    bool infinity_;
    Fp x_, y_;
};

class G2 {
  public:
    G2() : infinity_(true), x_{}, y_{} {}

    static const G2& generator();
    bool is_identity() const { return infinity_; }

    G2 add(const G2& o) const;
    G2 mul(const Fr& k) const;
    G2 neg() const;
    bool eq(const G2& o) const;
    bool on_curve() const;
    bool in_subgroup() const;

    std::array<uint8_t, kG2Bytes> to_bytes() const;
    static std::optional<G2> from_bytes(const uint8_t* p, bool check_subgroup = true);
    void wipe();

  private:
    friend struct PairEngine;
    bool infinity_;
    Fp2 x_, y_;
};

// Target-group element.
class Gt {
  public:
    Gt();  // identity

    static const Gt& pairing_generator();  // e(g1, g2)

    Gt mul(const Gt& o) const;
    Gt pow(const Fr& k) const;
    Gt inverse() const;
    bool eq(const Gt& o) const;
    bool is_identity() const;

    std::array<uint8_t, kGtBytes> to_bytes() const;
    static std::optional<Gt> from_bytes(const uint8_t* p);
    void wipe();

  private:
    friend struct PairEngine;
    explicit Gt(const Fp12& v) : v_(v) {}
    Fp12 v_;
};

Gt pairing(const G1& p, const G2& q);
// Product of pairings e(p1,q1) * e(p2,q2) * ... with one shared final
// exponentiation.
Gt multi_pairing(const std::vector<std::pair<G1, G2>>& pairs);

// Field self-checks used by the test suite (bilinearity is exercised through
// pairing(); these expose the tower for direct probing).
namespace detail {
Fp12 fp12_random(Drbg& rng);
Fp12 fp12_mul(const Fp12& a, const Fp12& b);
bool fp12_eq(const Fp12& a, const Fp12& b);
Fp12 fp12_inv(const Fp12& a);
Fp12 fp12_one();
std::array<uint8_t, kGtBytes> fp12_to_bytes(const Fp12& a);
std::optional<Fp12> fp12_from_bytes(const uint8_t* p);
}  // namespace detail

}  // namespace epochmesh::bls
