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

#include "epochmesh/bls12_381.hpp"

#include <cassert>
#include <cstring>
#include <stdexcept>

namespace epochmesh::bls {

namespace {

using u64 = uint64_t;
using u128 = unsigned __int128;

// ----------------------------------------------------------------------------
// Generic little-endian limb arithmetic + Montgomery multiplication (CIOS).

template <size_t N>
inline bool limbs_geq(const u64* a, const u64* b) {
    for (size_t i = N; i-- > 0;) {
        if (a[i] > b[i]) return true;
        if (a[i] < b[i]) return false;
    }
    return true;  // equal
}

template <size_t N>
inline bool limbs_is_zero(const u64* a) {
    for (size_t i = 0; i < N; ++i)
        if (a[i] != 0) return false;
    return true;
}

template <size_t N>
inline void limbs_sub(const u64* a, const u64* b, u64* out) {
    u64 borrow = 0;
    for (size_t i = 0; i < N; ++i) {
        u128 d = (u128)a[i] - b[i] - borrow;
        out[i] = (u64)d;
        borrow = (d >> 64) ? 1 : 0;
    }
}

template <size_t N>
inline u64 limbs_add(const u64* a, const u64* b, u64* out) {
    u64 carry = 0;
    for (size_t i = 0; i < N; ++i) {
        u128 s = (u128)a[i] + b[i] + carry;
        out[i] = (u64)s;
        carry = (u64)(s >> 64);
    }
    return carry;
}

template <size_t N>
inline void mod_add(const u64* a, const u64* b, const u64* m, u64* out) {
    u64 carry = limbs_add<N>(a, b, out);
    if (carry || limbs_geq<N>(out, m)) {
        u64 t[N];
        limbs_sub<N>(out, m, t);
        std::memcpy(out, t, sizeof(t));
    }
}

template <size_t N>
inline void mod_sub(const u64* a, const u64* b, const u64* m, u64* out) {
    u64 t[N];
    u64 borrow = 0;
    for (size_t i = 0; i < N; ++i) {
        u128 d = (u128)a[i] - b[i] - borrow;
        t[i] = (u64)d;
        borrow = (d >> 64) ? 1 : 0;
    }
    if (borrow) limbs_add<N>(t, m, t);
    std::memcpy(out, t, N * sizeof(u64));
}

template <size_t N>
inline void mod_neg(const u64* a, const u64* m, u64* out) {
    if (limbs_is_zero<N>(a)) {
        std::memset(out, 0, N * sizeof(u64));
        return;
    }
    limbs_sub<N>(m, a, out);
}

// Montgomery product: out = a*b*R^-1 mod m.
template <size_t N>
inline void mont_mul(const u64* a, const u64* b, const u64* m, u64 inv, u64* out) {
    u64 t[N + 2] = {0};
    for (size_t i = 0; i < N; ++i) {
        u64 carry = 0;
        for (size_t j = 0; j < N; ++j) {
            u128 cur = (u128)a[j] * b[i] + t[j] + carry;
            t[j] = (u64)cur;
            carry = (u64)(cur >> 64);
        }
        u128 s = (u128)t[N] + carry;
        t[N] = (u64)s;
        t[N + 1] = (u64)(s >> 64);

        u64 mfac = t[0] * inv;
        u128 cur = (u128)mfac * m[0] + t[0];
        carry = (u64)(cur >> 64);
        for (size_t j = 1; j < N; ++j) {
            cur = (u128)mfac * m[j] + t[j] + carry;
            t[j - 1] = (u64)cur;
            carry = (u64)(cur >> 64);
        }
        s = (u128)t[N] + carry;
        t[N - 1] = (u64)s;
        t[N] = t[N + 1] + (u64)(s >> 64);
        t[N + 1] = 0;
    }
    if (t[N] != 0 || limbs_geq<N>(t, m)) {
        u64 r[N + 1];
        u64 borrow = 0;
        for (size_t i = 0; i < N; ++i) {
            u128 d = (u128)t[i] - m[i] - borrow;
            r[i] = (u64)d;
            borrow = (d >> 64) ? 1 : 0;
        }
        std::memcpy(out, r, N * sizeof(u64));
    } else {
        std::memcpy(out, t, N * sizeof(u64));
    }
}

// -m^-1 mod 2^64 via Newton iteration.
inline u64 mont_inv64(u64 m) {
    u64 inv = 1;
    for (int i = 0; i < 63; ++i) inv *= 2 - m * inv;
    return ~inv + 1;  // negate
}

template <size_t N>
void hex_to_limbs(const char* hex, u64* out) {
    std::memset(out, 0, N * sizeof(u64));
    size_t len = std::strlen(hex);
    for (size_t i = 0; i < len; ++i) {
        char c = hex[len - 1 - i];
        u64 nib = (c >= '0' && c <= '9')   ? (u64)(c - '0')
                  : (c >= 'a' && c <= 'f') ? (u64)(c - 'a' + 10)
                                           : 0;
        out[i / 16] |= nib << (4 * (i % 16));
    }
}

// R^2 mod m computed by doubling R mod m (itself from doubling 1) 64*N times.
template <size_t N>
void compute_r2(const u64* m, u64* r2) {
    u64 acc[N];
    std::memset(acc, 0, sizeof(acc));
    acc[0] = 1;
    for (size_t i = 0; i < 2 * 64 * N; ++i) mod_add<N>(acc, acc, m, acc);
    std::memcpy(r2, acc, sizeof(acc));
}

constexpr const char* kPHex =
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaab";
constexpr const char* kRHex =
    "73eda753299d7d483339d80809a1d80553bda402fffe5bfeffffffff00000001";
constexpr const char* kPMinus2Hex =
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaa9";
constexpr const char* kPPlus1Div4Hex =
    "680447a8e5ff9a692c6e9ed90d2eb35d91dd2e13ce144afd9cc34a83dac3d890"
    "7aaffffac54ffffee7fbfffffffeaab";
constexpr const char* kPMinus1Div6Hex =
    "45582fc5eeaa66f0c849bf3b5e1f223e613e1eb7deb831fe688231ad3c829060"
    "51caaaa72e3555549aa7ffffffff1c7";
constexpr const char* kRMinus2Hex =
    "73eda753299d7d483339d80809a1d80553bda402fffe5bfefffffffeffffffff";
// (p^4 - p^2 + 1) / r, the exponent of the final-exponentiation hard part.
constexpr const char* kHardExpHex =
    "f686b3d807d01c0bd38c3195c899ed3cde88eeb996ca394506632528d6a9a2f2"
    "30063cf081517f68f7764c28b6f8ae5a72bce8d63cb9f827eca0ba621315b207"
    "6995003fc77a17988f8761bdc51dc2378b9039096d1b767f17fcbde783765915"
    "c97f36c6f18212ed0b283ed237db421d160aeb6a1e79983774940996754c8c71"
    "a2629b0dea236905ce937335d5b68fa9912aae208ccf1e516c3f438e3ba79";

// |z| for the BLS parameter z = -0xd201000000010000.
constexpr u64 kZAbs = 0xd201000000010000ull;

constexpr const char* kG1XHex =
    "17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58"
    "6c55e83ff97a1aeffb3af00adb22c6bb";
constexpr const char* kG1YHex =
    "08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3ed"
    "d03cc744a2888ae40caa232946c5e7e1";
constexpr const char* kG2X0Hex =
    "024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d177"
    "0bac0326a805bbefd48056c8c121bdb8";
constexpr const char* kG2X1Hex =
    "13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049"
    "334cf11213945d57e5ac7d055d042b7e";
constexpr const char* kG2Y0Hex =
    "0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160d12c"
    "923ac9cc3baca289e193548608b82801";
constexpr const char* kG2Y1Hex =
    "0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e99ab"
    "3f370d275cec1da1aaa9075ff05f79be";

struct FpConsts {
    u64 p[6];
    u64 inv;
    u64 r2[6];
    u64 one[6];  // R mod p
    u64 half_p[6];  // (p-1)/2 as integer limbs, for sign comparisons
    std::vector<uint8_t> p_minus_2, p_plus_1_div_4, p_minus_1_div_6, hard_exp, r_minus_2;
    u64 r_mod[4];
    u64 r_inv;
    u64 r_r2[4];
    u64 r_one[4];
};

std::vector<uint8_t> hex_exp_bytes(const char* hex) {
    std::string s(hex);
    if (s.size() % 2) s.insert(s.begin(), '0');
    return from_hex(s);
}

const FpConsts& fpc() {
    static const FpConsts c = [] {
        FpConsts k{};
        hex_to_limbs<6>(kPHex, k.p);
        k.inv = mont_inv64(k.p[0]);
        compute_r2<6>(k.p, k.r2);
        u64 one_std[6] = {1, 0, 0, 0, 0, 0};
        mont_mul<6>(one_std, k.r2, k.p, k.inv, k.one);
        // (p-1)/2
        u64 pm1[6];
        u64 one_l[6] = {1, 0, 0, 0, 0, 0};
        limbs_sub<6>(k.p, one_l, pm1);
        for (size_t i = 0; i < 6; ++i) {
            k.half_p[i] = (pm1[i] >> 1) | (i + 1 < 6 ? (pm1[i + 1] << 63) : 0);
        }
        k.p_minus_2 = hex_exp_bytes(kPMinus2Hex);
        k.p_plus_1_div_4 = hex_exp_bytes(kPPlus1Div4Hex);
        k.p_minus_1_div_6 = hex_exp_bytes(kPMinus1Div6Hex);
        k.hard_exp = hex_exp_bytes(kHardExpHex);
        k.r_minus_2 = hex_exp_bytes(kRMinus2Hex);
        hex_to_limbs<4>(kRHex, k.r_mod);
        k.r_inv = mont_inv64(k.r_mod[0]);
        compute_r2<4>(k.r_mod, k.r_r2);
        u64 one4[4] = {1, 0, 0, 0};
        mont_mul<4>(one4, k.r_r2, k.r_mod, k.r_inv, k.r_one);
        return k;
    }();
    return c;
}

// ----------------------------------------------------------------------------
// Fp

inline Fp fp_zero() { return Fp{{0, 0, 0, 0, 0, 0}}; }
inline Fp fp_one() {
    Fp o;
    std::memcpy(o.v, fpc().one, sizeof(o.v));
    return o;
}
inline bool fp_is_zero(const Fp& a) { return limbs_is_zero<6>(a.v); }
inline bool fp_eq(const Fp& a, const Fp& b) { return std::memcmp(a.v, b.v, sizeof(a.v)) == 0; }
inline Fp fp_add(const Fp& a, const Fp& b) {
    Fp o;
    mod_add<6>(a.v, b.v, fpc().p, o.v);
    return o;
}
inline Fp fp_sub(const Fp& a, const Fp& b) {
    Fp o;
    mod_sub<6>(a.v, b.v, fpc().p, o.v);
    return o;
}
inline Fp fp_neg(const Fp& a) {
    Fp o;
    mod_neg<6>(a.v, fpc().p, o.v);
    return o;
}
inline Fp fp_mul(const Fp& a, const Fp& b) {
    Fp o;
    mont_mul<6>(a.v, b.v, fpc().p, fpc().inv, o.v);
    return o;
}
inline Fp fp_sqr(const Fp& a) { return fp_mul(a, a); }
inline Fp fp_dbl(const Fp& a) { return fp_add(a, a); }

Fp fp_from_u64(u64 x) {
    u64 t[6] = {x, 0, 0, 0, 0, 0};
    Fp o;
    mont_mul<6>(t, fpc().r2, fpc().p, fpc().inv, o.v);
    return o;
}

Fp fp_pow_bytes(const Fp& base, const std::vector<uint8_t>& exp) {
    Fp acc = fp_one();
    bool started = false;
    for (uint8_t byte : exp) {
        for (int bit = 7; bit >= 0; --bit) {
            if (started) acc = fp_sqr(acc);
            if ((byte >> bit) & 1) {
                if (started)
                    acc = fp_mul(acc, base);
                else {
                    acc = base;
                    started = true;
                }
            }
        }
    }
    return started ? acc : fp_one();
}

inline Fp fp_inv(const Fp& a) { return fp_pow_bytes(a, fpc().p_minus_2); }

std::optional<Fp> fp_sqrt(const Fp& a) {
    Fp s = fp_pow_bytes(a, fpc().p_plus_1_div_4);
    if (!fp_eq(fp_sqr(s), a)) return std::nullopt;
    return s;
}

void fp_to_std(const Fp& a, u64 out[6]) {
    u64 one[6] = {1, 0, 0, 0, 0, 0};
    mont_mul<6>(a.v, one, fpc().p, fpc().inv, out);
}

Fp fp_from_std(const u64 in[6]) {
    Fp o;
    mont_mul<6>(in, fpc().r2, fpc().p, fpc().inv, o.v);
    return o;
}

void fp_to_bytes48(const Fp& a, uint8_t* out) {
    u64 s[6];
    fp_to_std(a, s);
    for (int i = 0; i < 6; ++i)
        for (int b = 0; b < 8; ++b) out[47 - (8 * i + b)] = (uint8_t)(s[i] >> (8 * b));
}

std::optional<Fp> fp_from_bytes48(const uint8_t* in) {
    u64 s[6] = {0};
    for (int i = 0; i < 48; ++i) s[(47 - i) / 8] |= (u64)in[i] << (8 * ((47 - i) % 8));
    if (limbs_geq<6>(s, fpc().p)) return std::nullopt;
    return fp_from_std(s);
}

// integer value (standard form) strictly above (p-1)/2, i.e. y > -y
bool fp_is_lex_largest(const Fp& a) {
    u64 s[6];
    fp_to_std(a, s);
    const u64* h = fpc().half_p;
    for (size_t i = 6; i-- > 0;) {
        if (s[i] > h[i]) return true;
        if (s[i] < h[i]) return false;
    }
    return false;  // equal to (p-1)/2 counts as small
}

Fp fp_from_hex(const char* hex) {
    u64 s[6];
    hex_to_limbs<6>(hex, s);
    return fp_from_std(s);
}

// ----------------------------------------------------------------------------
// Fp2 = Fp[u]/(u^2+1)

inline Fp2 fp2_zero() { return Fp2{fp_zero(), fp_zero()}; }
inline Fp2 fp2_one() { return Fp2{fp_one(), fp_zero()}; }
inline bool fp2_is_zero(const Fp2& a) { return fp_is_zero(a.c0) && fp_is_zero(a.c1); }
inline bool fp2_eq(const Fp2& a, const Fp2& b) { return fp_eq(a.c0, b.c0) && fp_eq(a.c1, b.c1); }
inline Fp2 fp2_add(const Fp2& a, const Fp2& b) { return {fp_add(a.c0, b.c0), fp_add(a.c1, b.c1)}; }
inline Fp2 fp2_sub(const Fp2& a, const Fp2& b) { return {fp_sub(a.c0, b.c0), fp_sub(a.c1, b.c1)}; }
inline Fp2 fp2_neg(const Fp2& a) { return {fp_neg(a.c0), fp_neg(a.c1)}; }
inline Fp2 fp2_dbl(const Fp2& a) { return fp2_add(a, a); }
inline Fp2 fp2_conj(const Fp2& a) { return {a.c0, fp_neg(a.c1)}; }

inline Fp2 fp2_mul(const Fp2& a, const Fp2& b) {
    Fp t0 = fp_mul(a.c0, b.c0);
    Fp t1 = fp_mul(a.c1, b.c1);
    Fp sum = fp_mul(fp_add(a.c0, a.c1), fp_add(b.c0, b.c1));
    return {fp_sub(t0, t1), fp_sub(fp_sub(sum, t0), t1)};
}

inline Fp2 fp2_sqr(const Fp2& a) {
    Fp t0 = fp_mul(fp_add(a.c0, a.c1), fp_sub(a.c0, a.c1));
    Fp t1 = fp_dbl(fp_mul(a.c0, a.c1));
    return {t0, t1};
}

inline Fp2 fp2_mul_fp(const Fp2& a, const Fp& s) { return {fp_mul(a.c0, s), fp_mul(a.c1, s)}; }

inline Fp2 fp2_inv(const Fp2& a) {
    Fp norm = fp_add(fp_sqr(a.c0), fp_sqr(a.c1));
    Fp ninv = fp_inv(norm);
    return {fp_mul(a.c0, ninv), fp_neg(fp_mul(a.c1, ninv))};
}

// multiply by xi = u + 1
inline Fp2 fp2_mul_xi(const Fp2& a) { return {fp_sub(a.c0, a.c1), fp_add(a.c0, a.c1)}; }

inline Fp2 fp2_triple(const Fp2& a) { return fp2_add(fp2_dbl(a), a); }

Fp2 fp2_pow_bytes(const Fp2& base, const std::vector<uint8_t>& exp) {
    Fp2 acc = fp2_one();
    bool started = false;
    for (uint8_t byte : exp) {
        for (int bit = 7; bit >= 0; --bit) {
            if (started) acc = fp2_sqr(acc);
            if ((byte >> bit) & 1) {
                if (started)
                    acc = fp2_mul(acc, base);
                else {
                    acc = base;
                    started = true;
                }
            }
        }
    }
    return started ? acc : fp2_one();
}

std::optional<Fp2> fp2_sqrt(const Fp2& a) {
    if (fp_is_zero(a.c1)) {
        if (auto s = fp_sqrt(a.c0)) return Fp2{*s, fp_zero()};
        if (auto s = fp_sqrt(fp_neg(a.c0))) return Fp2{fp_zero(), *s};
        return std::nullopt;
    }
    Fp norm = fp_add(fp_sqr(a.c0), fp_sqr(a.c1));
    auto n = fp_sqrt(norm);
    if (!n) return std::nullopt;
    static const Fp inv2 = fp_inv(fp_from_u64(2));
    Fp d = fp_mul(fp_add(a.c0, *n), inv2);
    auto x0 = fp_sqrt(d);
    if (!x0) {
        d = fp_mul(fp_sub(a.c0, *n), inv2);
        x0 = fp_sqrt(d);
        if (!x0) return std::nullopt;
    }
    Fp x1 = fp_mul(a.c1, fp_inv(fp_dbl(*x0)));
    Fp2 cand{*x0, x1};
    if (!fp2_eq(fp2_sqr(cand), a)) return std::nullopt;
    return cand;
}

bool fp2_is_lex_largest(const Fp2& a) {
    if (!fp_is_zero(a.c1)) return fp_is_lex_largest(a.c1);
    return fp_is_lex_largest(a.c0);
}

// ----------------------------------------------------------------------------
// Fp6 = Fp2[v]/(v^3 - xi)

inline Fp6 fp6_zero() { return {fp2_zero(), fp2_zero(), fp2_zero()}; }
inline Fp6 fp6_one() { return {fp2_one(), fp2_zero(), fp2_zero()}; }
inline bool fp6_is_zero(const Fp6& a) {
    return fp2_is_zero(a.c0) && fp2_is_zero(a.c1) && fp2_is_zero(a.c2);
}
inline bool fp6_eq(const Fp6& a, const Fp6& b) {
    return fp2_eq(a.c0, b.c0) && fp2_eq(a.c1, b.c1) && fp2_eq(a.c2, b.c2);
}
inline Fp6 fp6_add(const Fp6& a, const Fp6& b) {
    return {fp2_add(a.c0, b.c0), fp2_add(a.c1, b.c1), fp2_add(a.c2, b.c2)};
}
inline Fp6 fp6_sub(const Fp6& a, const Fp6& b) {
    return {fp2_sub(a.c0, b.c0), fp2_sub(a.c1, b.c1), fp2_sub(a.c2, b.c2)};
}
inline Fp6 fp6_neg(const Fp6& a) { return {fp2_neg(a.c0), fp2_neg(a.c1), fp2_neg(a.c2)}; }

Fp6 fp6_mul(const Fp6& a, const Fp6& b) {
    Fp2 t0 = fp2_mul(a.c0, b.c0);
    Fp2 t1 = fp2_mul(a.c1, b.c1);
    Fp2 t2 = fp2_mul(a.c2, b.c2);
    Fp2 c0 = fp2_add(t0, fp2_mul_xi(fp2_sub(
                             fp2_mul(fp2_add(a.c1, a.c2), fp2_add(b.c1, b.c2)), fp2_add(t1, t2))));
    Fp2 c1 = fp2_add(fp2_sub(fp2_mul(fp2_add(a.c0, a.c1), fp2_add(b.c0, b.c1)), fp2_add(t0, t1)),
                     fp2_mul_xi(t2));
    Fp2 c2 = fp2_add(fp2_sub(fp2_mul(fp2_add(a.c0, a.c2), fp2_add(b.c0, b.c2)), fp2_add(t0, t2)),
                     t1);
    return {c0, c1, c2};
}

inline Fp6 fp6_sqr(const Fp6& a) { return fp6_mul(a, a); }

// multiply by v
inline Fp6 fp6_mul_by_v(const Fp6& a) { return {fp2_mul_xi(a.c2), a.c0, a.c1}; }

Fp6 fp6_inv(const Fp6& a) {
    Fp2 t0 = fp2_sub(fp2_sqr(a.c0), fp2_mul_xi(fp2_mul(a.c1, a.c2)));
    Fp2 t1 = fp2_sub(fp2_mul_xi(fp2_sqr(a.c2)), fp2_mul(a.c0, a.c1));
    Fp2 t2 = fp2_sub(fp2_sqr(a.c1), fp2_mul(a.c0, a.c2));
    Fp2 d = fp2_add(fp2_mul(a.c0, t0),
                    fp2_mul_xi(fp2_add(fp2_mul(a.c2, t1), fp2_mul(a.c1, t2))));
    Fp2 di = fp2_inv(d);
    return {fp2_mul(t0, di), fp2_mul(t1, di), fp2_mul(t2, di)};
}

// sparse products used by the Miller loop
Fp6 fp6_mul_by_01(const Fp6& x, const Fp2& s0, const Fp2& s1) {
    return {fp2_add(fp2_mul(x.c0, s0), fp2_mul_xi(fp2_mul(x.c2, s1))),
            fp2_add(fp2_mul(x.c0, s1), fp2_mul(x.c1, s0)),
            fp2_add(fp2_mul(x.c1, s1), fp2_mul(x.c2, s0))};
}

Fp6 fp6_mul_by_1(const Fp6& x, const Fp2& s1) {
    return {fp2_mul_xi(fp2_mul(x.c2, s1)), fp2_mul(x.c0, s1), fp2_mul(x.c1, s1)};
}

// ----------------------------------------------------------------------------
// Fp12 = Fp6[w]/(w^2 - v)

inline Fp12 fp12_one_() { return {fp6_one(), fp6_zero()}; }
inline bool fp12_eq_(const Fp12& a, const Fp12& b) { return fp6_eq(a.c0, b.c0) && fp6_eq(a.c1, b.c1); }

Fp12 fp12_mul_(const Fp12& a, const Fp12& b) {
    Fp6 t0 = fp6_mul(a.c0, b.c0);
    Fp6 t1 = fp6_mul(a.c1, b.c1);
    Fp6 c0 = fp6_add(t0, fp6_mul_by_v(t1));
    Fp6 c1 = fp6_sub(fp6_sub(fp6_mul(fp6_add(a.c0, a.c1), fp6_add(b.c0, b.c1)), t0), t1);
    return {c0, c1};
}

Fp12 fp12_sqr_(const Fp12& a) {
    // complex squaring over the quadratic extension
    Fp6 t = fp6_mul(a.c0, a.c1);
    Fp6 s = fp6_mul(fp6_add(a.c0, a.c1), fp6_add(a.c0, fp6_mul_by_v(a.c1)));
    Fp6 c0 = fp6_sub(fp6_sub(s, t), fp6_mul_by_v(t));
    Fp6 c1 = fp6_add(t, t);
    return {c0, c1};
}

// f^(p^6), the conjugation over Fp6
inline Fp12 fp12_conj(const Fp12& a) { return {a.c0, fp6_neg(a.c1)}; }

Fp12 fp12_inv_(const Fp12& a) {
    Fp6 d = fp6_sub(fp6_sqr(a.c0), fp6_mul_by_v(fp6_sqr(a.c1)));
    Fp6 di = fp6_inv(d);
    return {fp6_mul(a.c0, di), fp6_neg(fp6_mul(a.c1, di))};
}

// w-power basis accessors: coefficient of w^k, k = 0..5
inline Fp2& wcoef(Fp12& f, int k) {
    switch (k) {
        case 0: return f.c0.c0;
        case 1: return f.c1.c0;
        case 2: return f.c0.c1;
        case 3: return f.c1.c1;
        case 4: return f.c0.c2;
        default: return f.c1.c2;
    }
}
inline const Fp2& wcoef(const Fp12& f, int k) { return wcoef(const_cast<Fp12&>(f), k); }

struct FrobConsts {
    Fp2 gamma[6];  // xi^(k*(p-1)/6)
};

const FrobConsts& frobc() {
    static const FrobConsts c = [] {
        FrobConsts k;
        Fp2 xi{fp_one(), fp_one()};
        Fp2 g = fp2_pow_bytes(xi, fpc().p_minus_1_div_6);
        k.gamma[0] = fp2_one();
        for (int i = 1; i < 6; ++i) k.gamma[i] = fp2_mul(k.gamma[i - 1], g);
        return k;
    }();
    return c;
}

Fp12 fp12_frobenius(const Fp12& a) {
    Fp12 out;
    for (int k = 0; k < 6; ++k) wcoef(out, k) = fp2_mul(fp2_conj(wcoef(a, k)), frobc().gamma[k]);
    return out;
}

Fp12 fp12_pow_bytes(const Fp12& base, const std::vector<uint8_t>& exp) {
    Fp12 acc = fp12_one_();
    bool started = false;
    for (uint8_t byte : exp) {
        for (int bit = 7; bit >= 0; --bit) {
            if (started) acc = fp12_sqr_(acc);
            if ((byte >> bit) & 1) {
                if (started)
                    acc = fp12_mul_(acc, base);
                else {
                    acc = base;
                    started = true;
                }
            }
        }
    }
    return started ? acc : fp12_one_();
}

Fp12 fp12_pow_limbs(const Fp12& base, const u64 limbs[4]) {
    std::vector<uint8_t> exp(32);
    for (int i = 0; i < 4; ++i)
        for (int b = 0; b < 8; ++b) exp[31 - (8 * i + b)] = (uint8_t)(limbs[i] >> (8 * b));
    return fp12_pow_bytes(base, exp);
}

// sparse multiply by (A + B*w^2 + C*w^3)
Fp12 fp12_mul_sparse(const Fp12& f, const Fp2& a, const Fp2& b, const Fp2& c) {
    // s0 = (A, B, 0) in Fp6, s1 = (0, C, 0)
    Fp6 f0s0 = fp6_mul_by_01(f.c0, a, b);
    Fp6 f1s1 = fp6_mul_by_1(f.c1, c);
    Fp6 f0s1 = fp6_mul_by_1(f.c0, c);
    Fp6 f1s0 = fp6_mul_by_01(f.c1, a, b);
    return {fp6_add(f0s0, fp6_mul_by_v(f1s1)), fp6_add(f0s1, f1s0)};
}

// ----------------------------------------------------------------------------
// Curve arithmetic (Jacobian), shared by G1 and G2

template <typename F, typename Ops>
struct Jac {
    F x, y, z;  // z == 0 encodes the identity
};

struct FpOps {
    using F = Fp;
    static F zero() { return fp_zero(); }
    static F one() { return fp_one(); }
    static F add(const F& a, const F& b) { return fp_add(a, b); }
    static F sub(const F& a, const F& b) { return fp_sub(a, b); }
    static F neg(const F& a) { return fp_neg(a); }
    static F mul(const F& a, const F& b) { return fp_mul(a, b); }
    static F sqr(const F& a) { return fp_sqr(a); }
    static F inv(const F& a) { return fp_inv(a); }
    static bool is_zero(const F& a) { return fp_is_zero(a); }
    static bool eq(const F& a, const F& b) { return fp_eq(a, b); }
    static F curve_b() { return fp_from_u64(4); }
};

struct Fp2Ops {
    using F = Fp2;
    static F zero() { return fp2_zero(); }
    static F one() { return fp2_one(); }
    static F add(const F& a, const F& b) { return fp2_add(a, b); }
    static F sub(const F& a, const F& b) { return fp2_sub(a, b); }
    static F neg(const F& a) { return fp2_neg(a); }
    static F mul(const F& a, const F& b) { return fp2_mul(a, b); }
    static F sqr(const F& a) { return fp2_sqr(a); }
    static F inv(const F& a) { return fp2_inv(a); }
    static bool is_zero(const F& a) { return fp2_is_zero(a); }
    static bool eq(const F& a, const F& b) { return fp2_eq(a, b); }
    static F curve_b() { return Fp2{fp_from_u64(4), fp_from_u64(4)}; }
};

template <typename Ops>
using JacP = Jac<typename Ops::F, Ops>;

template <typename Ops>
JacP<Ops> jac_identity() {
    return {Ops::zero(), Ops::one(), Ops::zero()};
}

template <typename Ops>
bool jac_is_identity(const JacP<Ops>& p) {
    return Ops::is_zero(p.z);
}

template <typename Ops>
JacP<Ops> jac_dbl(const JacP<Ops>& p) {
    using F = typename Ops::F;
    if (jac_is_identity<Ops>(p) || Ops::is_zero(p.y)) return jac_identity<Ops>();
    F a = Ops::sqr(p.x);
    F b = Ops::sqr(p.y);
    F c = Ops::sqr(b);
    F d = Ops::sub(Ops::sqr(Ops::add(p.x, b)), Ops::add(a, c));
    d = Ops::add(d, d);
    F e = Ops::add(Ops::add(a, a), a);
    F f = Ops::sqr(e);
    F x3 = Ops::sub(f, Ops::add(d, d));
    F eight_c = Ops::add(c, c);
    eight_c = Ops::add(eight_c, eight_c);
    eight_c = Ops::add(eight_c, eight_c);
    F y3 = Ops::sub(Ops::mul(e, Ops::sub(d, x3)), eight_c);
    F z3 = Ops::mul(Ops::add(p.y, p.y), p.z);
    return {x3, y3, z3};
}

template <typename Ops>
JacP<Ops> jac_add(const JacP<Ops>& p, const JacP<Ops>& q) {
    using F = typename Ops::F;
    if (jac_is_identity<Ops>(p)) return q;
    if (jac_is_identity<Ops>(q)) return p;
    F z1z1 = Ops::sqr(p.z);
    F z2z2 = Ops::sqr(q.z);
    F u1 = Ops::mul(p.x, z2z2);
    F u2 = Ops::mul(q.x, z1z1);
    F s1 = Ops::mul(Ops::mul(p.y, q.z), z2z2);
    F s2 = Ops::mul(Ops::mul(q.y, p.z), z1z1);
    if (Ops::eq(u1, u2)) {
        if (Ops::eq(s1, s2)) return jac_dbl<Ops>(p);
        return jac_identity<Ops>();
    }
    F h = Ops::sub(u2, u1);
    F i = Ops::sqr(Ops::add(h, h));
    F j = Ops::mul(h, i);
    F rr = Ops::sub(s2, s1);
    rr = Ops::add(rr, rr);
    F v = Ops::mul(u1, i);
    F x3 = Ops::sub(Ops::sub(Ops::sqr(rr), j), Ops::add(v, v));
    F s1j = Ops::mul(s1, j);
    F y3 = Ops::sub(Ops::mul(rr, Ops::sub(v, x3)), Ops::add(s1j, s1j));
    F z3 = Ops::mul(Ops::sub(Ops::sub(Ops::sqr(Ops::add(p.z, q.z)), z1z1), z2z2), h);
    return {x3, y3, z3};
}

struct AffinePt {
    bool infinity;
};

template <typename Ops>
JacP<Ops> jac_from_affine(bool infinity, const typename Ops::F& x, const typename Ops::F& y) {
    if (infinity) return jac_identity<Ops>();
    return {x, y, Ops::one()};
}

template <typename Ops>
void jac_to_affine(const JacP<Ops>& p, bool& infinity, typename Ops::F& x, typename Ops::F& y) {
    using F = typename Ops::F;
    if (jac_is_identity<Ops>(p)) {
        infinity = true;
        x = Ops::zero();
        y = Ops::zero();
        return;
    }
    infinity = false;
    F zi = Ops::inv(p.z);
    F zi2 = Ops::sqr(zi);
    x = Ops::mul(p.x, zi2);
    y = Ops::mul(p.y, Ops::mul(zi2, zi));
}

template <typename Ops>
JacP<Ops> jac_mul(const JacP<Ops>& p, const u64 scalar[4]) {
    // 4-bit window double-and-add
    JacP<Ops> table[16];
    table[0] = jac_identity<Ops>();
    table[1] = p;
    for (int i = 2; i < 16; ++i) table[i] = jac_add<Ops>(table[i - 1], p);
    JacP<Ops> acc = jac_identity<Ops>();
    bool started = false;
    for (int limb = 3; limb >= 0; --limb) {
        for (int shift = 60; shift >= 0; shift -= 4) {
            if (started) {
                acc = jac_dbl<Ops>(acc);
                acc = jac_dbl<Ops>(acc);
                acc = jac_dbl<Ops>(acc);
                acc = jac_dbl<Ops>(acc);
            }
            unsigned nibble = (unsigned)((scalar[limb] >> shift) & 0xf);
            if (nibble != 0) {
                acc = jac_add<Ops>(acc, table[nibble]);
                started = true;
            }
        }
    }
    return acc;
}

// ----------------------------------------------------------------------------
// Fr

struct FrVal {
    u64 v[4];
};

inline FrVal frv_mul(const FrVal& a, const FrVal& b) {
    FrVal o;
    mont_mul<4>(a.v, b.v, fpc().r_mod, fpc().r_inv, o.v);
    return o;
}

}  // namespace

// ---- Fr public methods ----

Fr Fr::one() {
    Fr o;
    std::memcpy(o.v_, fpc().r_one, sizeof(o.v_));
    return o;
}

Fr Fr::from_u64(uint64_t x) {
    u64 t[4] = {x, 0, 0, 0};
    Fr o;
    mont_mul<4>(t, fpc().r_r2, fpc().r_mod, fpc().r_inv, o.v_);
    return o;
}

Fr Fr::random(Drbg& rng) {
    uint8_t wide[64];
    rng.fill(wide, sizeof(wide));
    // interpret as big-endian integer, reduce mod r byte by byte
    u64 acc[4] = {0, 0, 0, 0};
    for (uint8_t byte : wide) {
        for (int k = 0; k < 8; ++k) mod_add<4>(acc, acc, fpc().r_mod, acc);
        u64 b[4] = {byte, 0, 0, 0};
        mod_add<4>(acc, b, fpc().r_mod, acc);
    }
    Fr o;
    mont_mul<4>(acc, fpc().r_r2, fpc().r_mod, fpc().r_inv, o.v_);
    return o;
}

Fr Fr::add(const Fr& o) const {
    Fr r;
    mod_add<4>(v_, o.v_, fpc().r_mod, r.v_);
    return r;
}

Fr Fr::sub(const Fr& o) const {
    Fr r;
    mod_sub<4>(v_, o.v_, fpc().r_mod, r.v_);
    return r;
}

Fr Fr::mul(const Fr& o) const {
    Fr r;
    mont_mul<4>(v_, o.v_, fpc().r_mod, fpc().r_inv, r.v_);
    return r;
}

Fr Fr::neg() const {
    Fr r;
    mod_neg<4>(v_, fpc().r_mod, r.v_);
    return r;
}

bool Fr::is_zero() const { return limbs_is_zero<4>(v_); }
bool Fr::eq(const Fr& o) const { return std::memcmp(v_, o.v_, sizeof(v_)) == 0; }

std::array<uint8_t, kFrBytes> Fr::to_bytes() const {
    u64 s[4];
    u64 one[4] = {1, 0, 0, 0};
    mont_mul<4>(v_, one, fpc().r_mod, fpc().r_inv, s);
    std::array<uint8_t, kFrBytes> out{};
    for (int i = 0; i < 4; ++i)
        for (int b = 0; b < 8; ++b) out[31 - (8 * i + b)] = (uint8_t)(s[i] >> (8 * b));
    return out;
}

std::optional<Fr> Fr::from_bytes(const uint8_t* p) {
    u64 s[4] = {0};
    for (int i = 0; i < 32; ++i) s[(31 - i) / 8] |= (u64)p[i] << (8 * ((31 - i) % 8));
    if (limbs_geq<4>(s, fpc().r_mod)) return std::nullopt;
    Fr o;
    mont_mul<4>(s, fpc().r_r2, fpc().r_mod, fpc().r_inv, o.v_);
    return o;
}

void Fr::to_limbs(uint64_t out[4]) const {
    u64 one[4] = {1, 0, 0, 0};
    mont_mul<4>(v_, one, fpc().r_mod, fpc().r_inv, out);
}

void Fr::wipe() { secure_wipe(v_, sizeof(v_)); }

// ---- G1 ----

static G1 g1_from_parts(bool inf, const Fp& x, const Fp& y);
static G2 g2_from_parts(bool inf, const Fp2& x, const Fp2& y);

struct PairEngine {
    static G1 make_g1(bool inf, const Fp& x, const Fp& y) {
        G1 p;
        p.infinity_ = inf;
        p.x_ = x;
        p.y_ = y;
        return p;
    }
    static G2 make_g2(bool inf, const Fp2& x, const Fp2& y) {
        G2 p;
        p.infinity_ = inf;
        p.x_ = x;
        p.y_ = y;
        return p;
    }
    static const Fp& g1x(const G1& p) { return p.x_; }
    static const Fp& g1y(const G1& p) { return p.y_; }
    static const Fp2& g2x(const G2& p) { return p.x_; }
    static const Fp2& g2y(const G2& p) { return p.y_; }
    static Gt make_gt(const Fp12& v) { return Gt(v); }
    static const Fp12& gt_val(const Gt& g) { return g.v_; }
};

static G1 g1_from_parts(bool inf, const Fp& x, const Fp& y) { return PairEngine::make_g1(inf, x, y); }
static G2 g2_from_parts(bool inf, const Fp2& x, const Fp2& y) { return PairEngine::make_g2(inf, x, y); }

const G1& G1::generator() {
    static const G1 g = g1_from_parts(false, fp_from_hex(kG1XHex), fp_from_hex(kG1YHex));
    return g;
}

G1 G1::add(const G1& o) const {
    auto a = jac_from_affine<FpOps>(infinity_, x_, y_);
    auto b = jac_from_affine<FpOps>(o.infinity_, o.x_, o.y_);
    auto s = jac_add<FpOps>(a, b);
    bool inf;
    Fp x, y;
    jac_to_affine<FpOps>(s, inf, x, y);
    return g1_from_parts(inf, x, y);
}

G1 G1::mul(const Fr& k) const {
    u64 limbs[4];
    k.to_limbs(limbs);
    auto p = jac_from_affine<FpOps>(infinity_, x_, y_);
    auto s = jac_mul<FpOps>(p, limbs);
    bool inf;
    Fp x, y;
    jac_to_affine<FpOps>(s, inf, x, y);
    return g1_from_parts(inf, x, y);
}

G1 G1::neg() const {
    if (infinity_) return *this;
    return g1_from_parts(false, x_, fp_neg(y_));
}

bool G1::eq(const G1& o) const {
    if (infinity_ != o.infinity_) return false;
    if (infinity_) return true;
    return fp_eq(x_, o.x_) && fp_eq(y_, o.y_);
}

bool G1::on_curve() const {
    if (infinity_) return true;
    Fp lhs = fp_sqr(y_);
    Fp rhs = fp_add(fp_mul(fp_sqr(x_), x_), FpOps::curve_b());
    return fp_eq(lhs, rhs);
}

bool G1::in_subgroup() const {
    if (infinity_) return true;
    auto p = jac_from_affine<FpOps>(false, x_, y_);
    auto s = jac_mul<FpOps>(p, fpc().r_mod);
    return jac_is_identity<FpOps>(s);
}

std::array<uint8_t, kG1Bytes> G1::to_bytes() const {
    std::array<uint8_t, kG1Bytes> out{};
    if (infinity_) {
        out[0] = 0xc0;
        return out;
    }
    fp_to_bytes48(x_, out.data());
    out[0] |= 0x80;
    if (fp_is_lex_largest(y_)) out[0] |= 0x20;
    return out;
}

std::optional<G1> G1::from_bytes(const uint8_t* p, bool check_subgroup) {
    uint8_t flags = p[0] & 0xe0;
    if (!(flags & 0x80)) return std::nullopt;  // only compressed accepted
    if (flags & 0x40) {
        for (int i = 1; i < 48; ++i)
            if (p[i] != 0) return std::nullopt;
        if ((p[0] & 0x1f) != 0) return std::nullopt;
        return G1();
    }
    uint8_t buf[48];
    std::memcpy(buf, p, 48);
    buf[0] &= 0x1f;
    auto x = fp_from_bytes48(buf);
    if (!x) return std::nullopt;
    Fp rhs = fp_add(fp_mul(fp_sqr(*x), *x), FpOps::curve_b());
    auto y = fp_sqrt(rhs);
    if (!y) return std::nullopt;
    bool want_large = (flags & 0x20) != 0;
    Fp yy = *y;
    if (fp_is_lex_largest(yy) != want_large) yy = fp_neg(yy);
    G1 out = g1_from_parts(false, *x, yy);
    if (check_subgroup && !out.in_subgroup()) return std::nullopt;
    return out;
}

void G1::wipe() {
    secure_wipe(&x_, sizeof(x_));
    secure_wipe(&y_, sizeof(y_));
    infinity_ = true;
}

// ---- G2 ----

const G2& G2::generator() {
    static const G2 g = g2_from_parts(
        false, Fp2{fp_from_hex(kG2X0Hex), fp_from_hex(kG2X1Hex)},
        Fp2{fp_from_hex(kG2Y0Hex), fp_from_hex(kG2Y1Hex)});
    return g;
}

G2 G2::add(const G2& o) const {
    auto a = jac_from_affine<Fp2Ops>(infinity_, x_, y_);
    auto b = jac_from_affine<Fp2Ops>(o.infinity_, o.x_, o.y_);
    auto s = jac_add<Fp2Ops>(a, b);
    bool inf;
    Fp2 x, y;
    jac_to_affine<Fp2Ops>(s, inf, x, y);
    return g2_from_parts(inf, x, y);
}

G2 G2::mul(const Fr& k) const {
    u64 limbs[4];
    k.to_limbs(limbs);
    auto p = jac_from_affine<Fp2Ops>(infinity_, x_, y_);
    auto s = jac_mul<Fp2Ops>(p, limbs);
    bool inf;
    Fp2 x, y;
    jac_to_affine<Fp2Ops>(s, inf, x, y);
    return g2_from_parts(inf, x, y);
}

G2 G2::neg() const {
    if (infinity_) return *this;
    return g2_from_parts(false, x_, fp2_neg(y_));
}

bool G2::eq(const G2& o) const {
    if (infinity_ != o.infinity_) return false;
    if (infinity_) return true;
    return fp2_eq(x_, o.x_) && fp2_eq(y_, o.y_);
}

bool G2::on_curve() const {
    if (infinity_) return true;
    Fp2 lhs = fp2_sqr(y_);
    Fp2 rhs = fp2_add(fp2_mul(fp2_sqr(x_), x_), Fp2Ops::curve_b());
    return fp2_eq(lhs, rhs);
}

bool G2::in_subgroup() const {
    if (infinity_) return true;
    auto p = jac_from_affine<Fp2Ops>(false, x_, y_);
    auto s = jac_mul<Fp2Ops>(p, fpc().r_mod);
    return jac_is_identity<Fp2Ops>(s);
}

std::array<uint8_t, kG2Bytes> G2::to_bytes() const {
    std::array<uint8_t, kG2Bytes> out{};
    if (infinity_) {
        out[0] = 0xc0;
        return out;
    }
    fp_to_bytes48(x_.c1, out.data());
    fp_to_bytes48(x_.c0, out.data() + 48);
    out[0] |= 0x80;
    if (fp2_is_lex_largest(y_)) out[0] |= 0x20;
    return out;
}

std::optional<G2> G2::from_bytes(const uint8_t* p, bool check_subgroup) {
    uint8_t flags = p[0] & 0xe0;
    if (!(flags & 0x80)) return std::nullopt;
    if (flags & 0x40) {
        for (int i = 1; i < 96; ++i)
            if (p[i] != 0) return std::nullopt;
        if ((p[0] & 0x1f) != 0) return std::nullopt;
        return G2();
    }
    uint8_t buf[48];
    std::memcpy(buf, p, 48);
    buf[0] &= 0x1f;
    auto x1 = fp_from_bytes48(buf);
    auto x0 = fp_from_bytes48(p + 48);
    if (!x0 || !x1) return std::nullopt;
    Fp2 x{*x0, *x1};
    Fp2 rhs = fp2_add(fp2_mul(fp2_sqr(x), x), Fp2Ops::curve_b());
    auto y = fp2_sqrt(rhs);
    if (!y) return std::nullopt;
    bool want_large = (flags & 0x20) != 0;
    Fp2 yy = *y;
    if (fp2_is_lex_largest(yy) != want_large) yy = fp2_neg(yy);
    G2 out = g2_from_parts(false, x, yy);
    if (check_subgroup && !out.in_subgroup()) return std::nullopt;
    return out;
}

void G2::wipe() {
    secure_wipe(&x_, sizeof(x_));
    secure_wipe(&y_, sizeof(y_));
    infinity_ = true;
}

// ---- pairing ----

namespace {

struct MillerState {
    JacP<Fp2Ops> t;
    Fp2 qx, qy;  // affine twist coordinates of Q
    Fp px, py;   // affine coordinates of P
};

// Doubling step: advances T to 2T and emits the tangent line evaluated at P,
// as sparse coefficients (A at w^0, B at w^2, C at w^3).
void dbl_step(MillerState& s, Fp2& a, Fp2& b, Fp2& c) {
    const Fp2 X = s.t.x, Y = s.t.y, Z = s.t.z;
    Fp2 xx = fp2_sqr(X);
    Fp2 yy = fp2_sqr(Y);
    Fp2 zz = fp2_sqr(Z);
    Fp2 e = fp2_triple(xx);

    // point doubling (reuses xx, yy, zz)
    Fp2 yyyy = fp2_sqr(yy);
    Fp2 d = fp2_sub(fp2_sqr(fp2_add(X, yy)), fp2_add(xx, yyyy));
    d = fp2_dbl(d);
    Fp2 f = fp2_sqr(e);
    Fp2 x3 = fp2_sub(f, fp2_dbl(d));
    Fp2 eight = fp2_dbl(fp2_dbl(fp2_dbl(yyyy)));
    Fp2 y3 = fp2_sub(fp2_mul(e, fp2_sub(d, x3)), eight);
    Fp2 z3 = fp2_mul(fp2_dbl(Y), Z);

    // line: (3X^3 - 2Y^2) + (-3X^2 Z^2 xP) w^2 + (2YZ^3 yP) w^3
    a = fp2_sub(fp2_mul(e, X), fp2_dbl(yy));
    b = fp2_mul_fp(fp2_neg(fp2_mul(e, zz)), s.px);
    c = fp2_mul_fp(fp2_mul(z3, zz), s.py);

    s.t = {x3, y3, z3};
}

// Mixed addition step: T += Q and the chord line through them evaluated at P.
void add_step(MillerState& s, Fp2& a, Fp2& b, Fp2& c) {
    const Fp2 X = s.t.x, Y = s.t.y, Z = s.t.z;
    Fp2 zz = fp2_sqr(Z);
    Fp2 u2 = fp2_mul(s.qx, zz);
    Fp2 s2 = fp2_mul(fp2_mul(s.qy, Z), zz);
    Fp2 omega = fp2_sub(u2, X);   // H
    Fp2 theta = fp2_sub(s2, Y);

    Fp2 wz = fp2_mul(omega, Z);
    a = fp2_sub(fp2_mul(theta, s.qx), fp2_mul(wz, s.qy));
    b = fp2_mul_fp(fp2_neg(theta), s.px);
    c = fp2_mul_fp(wz, s.py);

    Fp2 hh = fp2_sqr(omega);
    Fp2 i = fp2_dbl(fp2_dbl(hh));
    Fp2 j = fp2_mul(omega, i);
    Fp2 rr = fp2_dbl(theta);
    Fp2 v = fp2_mul(X, i);
    Fp2 x3 = fp2_sub(fp2_sub(fp2_sqr(rr), j), fp2_dbl(v));
    Fp2 yj = fp2_mul(Y, j);
    Fp2 y3 = fp2_sub(fp2_mul(rr, fp2_sub(v, x3)), fp2_dbl(yj));
    Fp2 z3 = fp2_sub(fp2_sub(fp2_sqr(fp2_add(Z, omega)), zz), hh);
    s.t = {x3, y3, z3};
}

Fp12 miller_loop(const std::vector<std::pair<G1, G2>>& pairs) {
    std::vector<MillerState> states;
    states.reserve(pairs.size());
    for (const auto& [p, q] : pairs) {
        if (p.is_identity() || q.is_identity()) continue;
        MillerState s;
        s.qx = PairEngine::g2x(q);
        s.qy = PairEngine::g2y(q);
        s.t = jac_from_affine<Fp2Ops>(false, s.qx, s.qy);
        s.px = PairEngine::g1x(p);
        s.py = PairEngine::g1y(p);
        states.push_back(s);
    }
    Fp12 f = fp12_one_();
    if (states.empty()) return f;

    int top = 63;
    while (top >= 0 && !((kZAbs >> top) & 1)) --top;
    for (int i = top - 1; i >= 0; --i) {
        f = fp12_sqr_(f);
        for (auto& s : states) {
            Fp2 a, b, c;
            dbl_step(s, a, b, c);
            f = fp12_mul_sparse(f, a, b, c);
        }
        if ((kZAbs >> i) & 1) {
            for (auto& s : states) {
                Fp2 a, b, c;
                add_step(s, a, b, c);
                f = fp12_mul_sparse(f, a, b, c);
            }
        }
    }
    // z is negative: conjugation inverts up to factors killed by the final exp
    return fp12_conj(f);
}

Fp12 final_exponentiation(const Fp12& f) {
    // easy part: f^((p^6-1)(p^2+1))
    Fp12 t = fp12_mul_(fp12_conj(f), fp12_inv_(f));
    t = fp12_mul_(fp12_frobenius(fp12_frobenius(t)), t);
    // hard part: t^((p^4 - p^2 + 1)/r)
    return fp12_pow_bytes(t, fpc().hard_exp);
}

}  // namespace

// ---- Gt ----

Gt::Gt() : v_(fp12_one_()) {}

const Gt& Gt::pairing_generator() {
    static const Gt g = pairing(G1::generator(), G2::generator());
    return g;
}

Gt Gt::mul(const Gt& o) const { return Gt(fp12_mul_(v_, o.v_)); }

Gt Gt::pow(const Fr& k) const {
    u64 limbs[4];
    k.to_limbs(limbs);
    return Gt(fp12_pow_limbs(v_, limbs));
}

Gt Gt::inverse() const { return Gt(fp12_inv_(v_)); }

bool Gt::eq(const Gt& o) const { return fp12_eq_(v_, o.v_); }
bool Gt::is_identity() const { return fp12_eq_(v_, fp12_one_()); }

std::array<uint8_t, kGtBytes> Gt::to_bytes() const {
    std::array<uint8_t, kGtBytes> out{};
    for (int k = 0; k < 6; ++k) {
        const Fp2& c = wcoef(v_, k);
        fp_to_bytes48(c.c0, out.data() + 96 * k);
        fp_to_bytes48(c.c1, out.data() + 96 * k + 48);
    }
    return out;
}

std::optional<Gt> Gt::from_bytes(const uint8_t* p) {
    Fp12 v;
    for (int k = 0; k < 6; ++k) {
        auto re = fp_from_bytes48(p + 96 * k);
        auto im = fp_from_bytes48(p + 96 * k + 48);
        if (!re || !im) return std::nullopt;
        wcoef(v, k) = Fp2{*re, *im};
    }
    // membership in the order-r subgroup
    Fp12 chk = fp12_pow_limbs(v, fpc().r_mod);
    if (!fp12_eq_(chk, fp12_one_())) return std::nullopt;
    return Gt(v);
}

void Gt::wipe() { secure_wipe(&v_, sizeof(v_)); }

Gt pairing(const G1& p, const G2& q) {
    return PairEngine::make_gt(final_exponentiation(miller_loop({{p, q}})));
}

Gt multi_pairing(const std::vector<std::pair<G1, G2>>& pairs) {
    return PairEngine::make_gt(final_exponentiation(miller_loop(pairs)));
}

namespace detail {

Fp12 fp12_random(Drbg& rng) {
    Fp12 out;
    for (int k = 0; k < 6; ++k) {
        Fr a = Fr::random(rng);
        Fr b = Fr::random(rng);
        u64 la[4], lb[4];
        a.to_limbs(la);
        b.to_limbs(lb);
        u64 wide_a[6] = {la[0], la[1], la[2], la[3], 0, 0};
        u64 wide_b[6] = {lb[0], lb[1], lb[2], lb[3], 0, 0};
        wcoef(out, k) = Fp2{fp_from_std(wide_a), fp_from_std(wide_b)};
    }
    return out;
}

Fp12 fp12_mul(const Fp12& a, const Fp12& b) { return fp12_mul_(a, b); }
bool fp12_eq(const Fp12& a, const Fp12& b) { return fp12_eq_(a, b); }
Fp12 fp12_inv(const Fp12& a) { return fp12_inv_(a); }
Fp12 fp12_one() { return fp12_one_(); }

std::array<uint8_t, kGtBytes> fp12_to_bytes(const Fp12& a) {
    std::array<uint8_t, kGtBytes> out{};
    for (int k = 0; k < 6; ++k) {
        const Fp2& c = wcoef(a, k);
        fp_to_bytes48(c.c0, out.data() + 96 * k);
        fp_to_bytes48(c.c1, out.data() + 96 * k + 48);
    }
    return out;
}

std::optional<Fp12> fp12_from_bytes(const uint8_t* p) {
    Fp12 v;
    for (int k = 0; k < 6; ++k) {
        auto re = fp_from_bytes48(p + 96 * k);
        auto im = fp_from_bytes48(p + 96 * k + 48);
        if (!re || !im) return std::nullopt;
        wcoef(v, k) = Fp2{*re, *im};
    }
    return v;
}

}  // namespace detail

}  // namespace epochmesh::bls
