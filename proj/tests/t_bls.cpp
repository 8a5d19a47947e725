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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "epochmesh/bls12_381.hpp"

using namespace epochmesh;
using namespace epochmesh::bls;

TEST_CASE("fr field arithmetic") {
    Drbg rng(1);
    for (int i = 0; i < 50; ++i) {
        Fr a = Fr::random(rng), b = Fr::random(rng), c = Fr::random(rng);
        CHECK(a.add(b).eq(b.add(a)));
        CHECK(a.mul(b).eq(b.mul(a)));
        CHECK(a.mul(b.add(c)).eq(a.mul(b).add(a.mul(c))));
        CHECK(a.sub(a).is_zero());
        CHECK(a.add(a.neg()).is_zero());
        CHECK(a.mul(Fr::one()).eq(a));
        auto bytes = a.to_bytes();
        auto back = Fr::from_bytes(bytes.data());
        REQUIRE(back.has_value());
        CHECK(back->eq(a));
    }
}

TEST_CASE("generators are valid") {
    CHECK(G1::generator().on_curve());
    CHECK(G1::generator().in_subgroup());
    CHECK(G2::generator().on_curve());
    CHECK(G2::generator().in_subgroup());
}

TEST_CASE("group laws") {
    Drbg rng(2);
    const G1& g = G1::generator();
    const G2& h = G2::generator();
    for (int i = 0; i < 10; ++i) {
        Fr a = Fr::random(rng), b = Fr::random(rng);
        // (a+b)G == aG + bG
        CHECK(g.mul(a.add(b)).eq(g.mul(a).add(g.mul(b))));
        CHECK(h.mul(a.add(b)).eq(h.mul(a).add(h.mul(b))));
        // aG - aG == O
        CHECK(g.mul(a).add(g.mul(a).neg()).is_identity());
        CHECK(g.mul(a).on_curve());
        CHECK(h.mul(b).on_curve());
    }
    CHECK(g.mul(Fr::zero()).is_identity());
    CHECK(g.mul(Fr::one()).eq(g));
}

TEST_CASE("point serialization roundtrip") {
    Drbg rng(3);
    for (int i = 0; i < 10; ++i) {
        Fr k = Fr::random(rng);
        G1 p = G1::generator().mul(k);
        auto b = p.to_bytes();
        auto q = G1::from_bytes(b.data());
        REQUIRE(q.has_value());
        CHECK(q->eq(p));

        G2 p2 = G2::generator().mul(k);
        auto b2 = p2.to_bytes();
        auto q2 = G2::from_bytes(b2.data());
        REQUIRE(q2.has_value());
        CHECK(q2->eq(p2));
    }
    // identity encodings
    auto inf1 = G1().to_bytes();
    CHECK(inf1[0] == 0xc0);
    CHECK(G1::from_bytes(inf1.data())->is_identity());
    auto inf2 = G2().to_bytes();
    CHECK(G2::from_bytes(inf2.data())->is_identity());
    // garbage rejected
    std::array<uint8_t, kG1Bytes> junk{};
    junk.fill(0xff);
    CHECK(!G1::from_bytes(junk.data()).has_value());
}

TEST_CASE("pairing bilinearity and non-degeneracy over random draws") {
    Drbg rng(4);
    const G1& g = G1::generator();
    const G2& h = G2::generator();
    Gt base = pairing(g, h);
    CHECK(!base.is_identity());  // non-degeneracy
    // 100 random (u, v, a, b): e(u^a, v^b) == e(u, v)^(ab)
    for (int i = 0; i < 100; ++i) {
        Fr s = Fr::random(rng), t = Fr::random(rng);
        Fr a = Fr::random(rng), b = Fr::random(rng);
        G1 u = g.mul(s);
        G2 v = h.mul(t);
        Gt lhs = pairing(u.mul(a), v.mul(b));
        Gt rhs = pairing(u, v).pow(a.mul(b));
        CHECK(lhs.eq(rhs));
    }
}

TEST_CASE("pairing matches independent reference values") {
    std::ifstream in(std::string(TEST_DATA_DIR) + "/pairing_kat.txt");
    REQUIRE(in.good());
    std::string line;
    int checked = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        std::array<uint8_t, kGtBytes> expect{};
        for (int k = 0; k < 6; ++k) {
            std::string re, im;
            ss >> re >> im;
            Bytes reb = from_hex(re), imb = from_hex(im);
            REQUIRE(reb.size() == 48);
            std::copy(reb.begin(), reb.end(), expect.begin() + 96 * k);
            std::copy(imb.begin(), imb.end(), expect.begin() + 96 * k + 48);
        }
        Gt got;
        if (tag == "e_g1_g2") {
            got = pairing(G1::generator(), G2::generator());
        } else if (tag == "e_5g1_7g2") {
            got = pairing(G1::generator().mul(Fr::from_u64(5)),
                          G2::generator().mul(Fr::from_u64(7)));
        } else {
            continue;
        }
        CHECK(got.to_bytes() == expect);
        ++checked;
    }
    CHECK(checked == 2);
}

TEST_CASE("multi pairing equals product of pairings") {
    Drbg rng(5);
    const G1& g = G1::generator();
    const G2& h = G2::generator();
    std::vector<std::pair<G1, G2>> pairs;
    Gt expect;
    for (int i = 0; i < 5; ++i) {
        G1 p = g.mul(Fr::random(rng));
        G2 q = h.mul(Fr::random(rng));
        pairs.emplace_back(p, q);
        expect = expect.mul(pairing(p, q));
    }
    CHECK(multi_pairing(pairs).eq(expect));
    // identity entries contribute nothing
    pairs.emplace_back(G1(), h);
    CHECK(multi_pairing(pairs).eq(expect));
}

TEST_CASE("gt serialization and subgroup validation") {
    Drbg rng(6);
    Gt x = Gt::pairing_generator().pow(Fr::random(rng));
    auto b = x.to_bytes();
    auto back = Gt::from_bytes(b.data());
    REQUIRE(back.has_value());
    CHECK(back->eq(x));
    // a random Fp12 element is almost surely not in the order-r subgroup
    auto junk = detail::fp12_to_bytes(detail::fp12_random(rng));
    CHECK(!Gt::from_bytes(junk.data()).has_value());
}

TEST_CASE("fp12 inverse") {
    Drbg rng(7);
    for (int i = 0; i < 10; ++i) {
        auto x = detail::fp12_random(rng);
        auto xi = detail::fp12_inv(x);
        CHECK(detail::fp12_eq(detail::fp12_mul(x, xi), detail::fp12_one()));
    }
}

TEST_CASE("gt group behavior") {
    Drbg rng(8);
    Fr a = Fr::random(rng), b = Fr::random(rng);
    const Gt& g = Gt::pairing_generator();
    CHECK(g.pow(a).mul(g.pow(b)).eq(g.pow(a.add(b))));
    CHECK(g.pow(a).mul(g.pow(a).inverse()).is_identity());
}
