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

#include "epochmesh/ratchet.hpp"

using namespace epochmesh;
using namespace epochmesh::ratchet;

static std::string idstr(uint64_t t, uint32_t depth) {
    return epoch_to_identity(t, depth).to_string();
}

TEST_CASE("epoch to identity, depth-2 preorder table") {
    CHECK(idstr(0, 2) == "");
    CHECK(idstr(1, 2) == "0");
    CHECK(idstr(2, 2) == "00");
    CHECK(idstr(3, 2) == "01");
    CHECK(idstr(4, 2) == "1");
    CHECK(idstr(5, 2) == "10");
    CHECK(idstr(6, 2) == "11");
    CHECK_THROWS_AS(epoch_to_identity(7, 2), std::out_of_range);
}

TEST_CASE("epoch mapping is a preorder traversal at any depth") {
    for (uint32_t depth : {1u, 3u, 5u}) {
        // preorder: node t+1 is either t's first child or the next node after
        // closing t's subtree; reconstruct by simulation with an explicit stack
        uint64_t cap = max_epoch(depth);
        std::vector<std::string> expect;
        struct Frame {
            std::string path;
        };
        std::vector<std::string> stack{""};
        while (!stack.empty()) {
            std::string cur = stack.back();
            stack.pop_back();
            expect.push_back(cur);
            if (cur.size() < depth) {
                stack.push_back(cur + "1");
                stack.push_back(cur + "0");
            }
        }
        REQUIRE(expect.size() == cap + 1);
        for (uint64_t t = 0; t <= cap; ++t) CHECK(idstr(t, depth) == expect[t]);
    }
}

TEST_CASE("keygen produces root state and rejects depth 0") {
    Drbg rng(1);
    auto [pk, sk] = keygen(2, rng);
    CHECK(pk.epoch() == 0);
    CHECK(sk.epoch() == 0);
    CHECK(sk.stack_size() == 1);
    CHECK(sk.stack().back().id.is_root());
    Drbg rng2(1);
    CHECK_THROWS_AS(keygen(0, rng2), std::invalid_argument);
}

TEST_CASE("keygen determinism under fixed seed") {
    Drbg a(9), b(9);
    auto [pk1, sk1] = keygen(2, a);
    auto [pk2, sk2] = keygen(2, b);
    CHECK(pk1.to_bytes() == pk2.to_bytes());
    CHECK(sk1.to_bytes() == sk2.to_bytes());
}

TEST_CASE("update walks the figure's stack states at depth 2") {
    Drbg rng(2);
    auto [pk, sk] = keygen(2, rng);

    update(sk, rng);  // 0 -> 1: stack holds keys for epochs 4 and 1
    CHECK(sk.epoch() == 1);
    REQUIRE(sk.stack_size() == 2);
    CHECK(sk.stack()[0].id.to_string() == "1");   // epoch 4, stored
    CHECK(sk.stack()[1].id.to_string() == "0");   // epoch 1, current

    update(sk, rng);  // 1 -> 2: key 3 stored, key 1 deleted
    CHECK(sk.epoch() == 2);
    REQUIRE(sk.stack_size() == 3);
    CHECK(sk.stack()[0].id.to_string() == "1");
    CHECK(sk.stack()[1].id.to_string() == "01");  // epoch 3
    CHECK(sk.stack()[2].id.to_string() == "00");  // epoch 2, current

    update(sk, rng);  // 2 -> 3: leaf pop
    CHECK(sk.epoch() == 3);
    REQUIRE(sk.stack_size() == 2);
    CHECK(sk.stack().back().id.to_string() == "01");
}

TEST_CASE("full traversal count, stack bound and top alignment") {
    for (uint32_t depth = 1; depth <= 4; ++depth) {
        Drbg rng(3 + depth);
        auto [pk, sk] = keygen(depth, rng);
        uint64_t updates = 0;
        while (true) {
            CHECK(sk.stack_size() >= 1);
            CHECK(sk.stack_size() <= depth + 1);
            CHECK(sk.stack().back().id == epoch_to_identity(sk.epoch(), depth));
            try {
                update(sk, rng);
            } catch (const KeyExhausted&) {
                break;
            }
            ++updates;
        }
        CHECK(updates == max_epoch(depth));
        CHECK(sk.epoch() == max_epoch(depth));
    }
}

TEST_CASE("encrypt/decrypt roundtrip at every epoch, depth 3") {
    Drbg rng(20);
    auto [pk, sk] = keygen(3, rng);
    Bytes msg = {'h', 'i', ' ', 't', 'h', 'e', 'r', 'e'};
    for (uint64_t t = 0; t <= max_epoch(3); ++t) {
        Bytes wire = encrypt(t, pk, msg, rng);
        auto ct = Ciphertext::parse(wire);
        REQUIRE(ct.has_value());
        CHECK(ct->epoch == t);
        auto out = decrypt(t, sk, *ct);
        REQUIRE(out.has_value());
        CHECK(*out == msg);
        if (t < max_epoch(3)) update(sk, rng);
    }
}

TEST_CASE("forward secrecy: advanced key fails on all earlier epochs, depth 3 exhaustive") {
    Drbg rng(21);
    auto [pk, sk] = keygen(3, rng);
    Bytes msg = {'x'};
    std::vector<Bytes> wires;
    for (uint64_t t = 0; t <= max_epoch(3); ++t) wires.push_back(encrypt(t, pk, msg, rng));

    for (uint64_t j = 1; j <= max_epoch(3); ++j) {
        update(sk, rng);
        for (uint64_t i = 0; i < j; ++i) {
            auto ct = Ciphertext::parse(wires[i]);
            REQUIRE(ct.has_value());
            CHECK(!decrypt(i, sk, *ct).has_value());
            // stack audit: nothing stored is an ancestor-or-equal of identity(i)
            hibe::Identity past = epoch_to_identity(i, 3);
            for (const auto& key : sk.stack()) CHECK(!key.id.is_prefix_of(past));
        }
        // while the current epoch still decrypts
        auto ct = Ciphertext::parse(wires[j]);
        CHECK(decrypt(j, sk, *ct).has_value());
    }
}

TEST_CASE("cross-recipient ciphertexts fail cleanly, 100 trials") {
    Drbg rng(22);
    auto [pk_a, sk_a] = keygen(2, rng);
    auto [pk_b, sk_b] = keygen(2, rng);
    Bytes msg = {'s', 'e', 'c', 'r', 'e', 't'};
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        Bytes wire = encrypt(0, pk_a, msg, rng);
        auto ct = Ciphertext::parse(wire);
        if (!decrypt(0, sk_b, *ct).has_value()) ++failures;
    }
    CHECK(failures == 100);
}

TEST_CASE("message sizes from 512 bytes to 10 KiB") {
    Drbg rng(23);
    auto [pk, sk] = keygen(2, rng);
    for (size_t size : {size_t{512}, size_t{1024}, size_t{10240}}) {
        Bytes msg = rng.bytes(size);
        Bytes wire = encrypt(0, pk, msg, rng);
        CHECK(wire.size() == Ciphertext::encoded_size(0, size));
        auto ct = Ciphertext::parse(wire);
        REQUIRE(ct.has_value());
        auto out = decrypt(0, sk, *ct);
        REQUIRE(out.has_value());
        CHECK(*out == msg);
    }
}

TEST_CASE("ciphertext length and arity depend only on epoch depth and message size") {
    Drbg rng(24);
    Bytes msg(512, 0xab);
    size_t want = 0;
    for (int i = 0; i < 100; ++i) {
        auto [pk, sk] = keygen(2, rng);
        Bytes wire = encrypt(3, pk, msg, rng);
        if (i == 0) want = wire.size();
        CHECK(wire.size() == want);
        auto ct = Ciphertext::parse(wire);
        REQUIRE(ct.has_value());
        CHECK(ct->enc.c.size() == 4);  // |id(3)| = 2 at depth 2
    }
}

TEST_CASE("wire layout carries only epoch, components, nonce, body, tag") {
    Drbg rng(25);
    auto [pk, sk] = keygen(2, rng);
    Bytes msg(64, 0x11);
    Bytes wire = encrypt(4, pk, msg, rng);
    // audit the exact byte layout
    CHECK(wire[0] == 0x05);
    CHECK(get_u64be(wire.data() + 1) == 4);
    size_t ncomp = wire[9];
    CHECK(ncomp == 3);  // |id(4)| = 1
    size_t expected = 1 + 8 + 1 + ncomp * 48 + 12 + msg.size() + 16;
    CHECK(wire.size() == expected);
}

TEST_CASE("current_epochs arithmetic") {
    EpochClockRule rule{60.0, 0.0, true};
    auto w = current_epochs(89.0, rule);
    CHECK(w.encrypt_epoch == 2);
    REQUIRE(w.decryptable.size() == 2);
    CHECK(w.decryptable[0] == 2);
    CHECK(w.decryptable[1] == 1);

    w = current_epochs(0.0, rule);
    CHECK(w.encrypt_epoch == 0);
    CHECK(w.decryptable == std::vector<uint64_t>{0});

    EpochClockRule no_roll{60.0, 0.0, false};
    w = current_epochs(119.0, no_roll);
    CHECK(w.encrypt_epoch == 1);
    CHECK(w.decryptable == std::vector<uint64_t>{1});
}

TEST_CASE("session decrypts previous sub-epoch under smooth rollover") {
    Drbg rng(26);
    auto [pk, sk] = keygen(4, rng);
    EpochClockRule rule{60.0, 0.0, true};
    Session session(std::move(sk), rule, rng.fork(1));

    // sender encrypts at sub-epoch 2 (clock 75s), receiver reads at 95s
    // (sub-epoch 3): still decryptable thanks to the retained key
    Bytes msg = {'l', 'a', 't', 'e'};
    Bytes wire = encrypt(2, pk, msg, rng);
    auto ct = Ciphertext::parse(wire);
    REQUIRE(ct.has_value());
    auto out = session.try_decrypt(*ct, 95.0);
    REQUIRE(out.has_value());
    CHECK(*out == msg);

    // two sub-epochs late: gone
    Bytes wire2 = encrypt(2, pk, msg, rng);
    auto ct2 = Ciphertext::parse(wire2);
    CHECK(!session.try_decrypt(*ct2, 125.0).has_value());

    // far future epoch not yet decryptable
    Bytes wire3 = encrypt(9, pk, msg, rng);
    auto ct3 = Ciphertext::parse(wire3);
    CHECK(!session.try_decrypt(*ct3, 95.0).has_value());
}

TEST_CASE("key serialization roundtrips") {
    Drbg rng(27);
    auto [pk, sk] = keygen(3, rng);
    update(sk, rng);
    update(sk, rng);

    auto pkb = pk.to_bytes();
    auto pk2 = PublicKey::from_bytes(pkb);
    REQUIRE(pk2.has_value());
    CHECK(pk2->to_bytes() == pkb);

    auto skb = sk.to_bytes();
    auto sk2 = SecretKey::from_bytes(skb);
    REQUIRE(sk2.has_value());
    CHECK(sk2->to_bytes() == skb);
    CHECK(sk2->epoch() == sk.epoch());

    // restored key decrypts
    Bytes msg = {'z'};
    Bytes wire = encrypt(2, pk, msg, rng);
    auto ct = Ciphertext::parse(wire);
    auto out = decrypt(2, *sk2, *ct);
    REQUIRE(out.has_value());
    CHECK(*out == msg);

    Bytes garbage = {0x00, 0x01, 0x02};
    CHECK(!SecretKey::from_bytes(garbage).has_value());
    CHECK(!PublicKey::from_bytes(garbage).has_value());
}

TEST_CASE("malformed ciphertext arity is rejected at parse") {
    Drbg rng(28);
    auto [pk, sk] = keygen(2, rng);
    Bytes wire = encrypt(1, pk, Bytes{'q'}, rng);
    // truncate one component
    Bytes bad(wire.begin(), wire.begin() + 10 + 2 * 48);
    CHECK(!Ciphertext::parse(bad).has_value());
    // nonsense count byte
    Bytes bad2 = wire;
    bad2[9] = 0xff;
    CHECK(!Ciphertext::parse(bad2).has_value());
}
