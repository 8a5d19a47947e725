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

// Exercises the shared-library surface the way an external caller would:
// through epochmesh.h only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <epochmesh.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace {
struct RngGuard {
    epm_rng* rng = nullptr;
    explicit RngGuard(uint64_t seed) { REQUIRE(epm_rng_seeded(seed, &rng) == EPM_OK); }
    ~RngGuard() { epm_rng_free(rng); }
};
}  // namespace

TEST_CASE("version and error names") {
    CHECK(epm_version() != nullptr);
    CHECK(std::string(epm_error_name(EPM_OK)) == "ok");
    CHECK(std::string(epm_error_name(EPM_ERR_CRYPTO)) == "decryption failed");
    CHECK(epm_last_error() != nullptr);
}

TEST_CASE("epoch helpers") {
    uint64_t cap = 0;
    REQUIRE(epm_max_epoch(2, &cap) == EPM_OK);
    CHECK(cap == 6);
    CHECK(epm_max_epoch(0, &cap) == EPM_ERR_CONFIG);

    char* path = nullptr;
    REQUIRE(epm_epoch_identity(3, 2, &path) == EPM_OK);
    CHECK(std::string(path) == "01");
    epm_string_free(path);
    REQUIRE(epm_epoch_identity(0, 2, &path) == EPM_OK);
    CHECK(std::string(path).empty());
    epm_string_free(path);
    CHECK(epm_epoch_identity(7, 2, &path) == EPM_ERR_RANGE);
    CHECK(std::string(epm_last_error()).find("epoch") != std::string::npos);
}

TEST_CASE("keygen, ratchet, encrypt, decrypt through the C surface") {
    RngGuard rng(42);
    epm_public_key* pk = nullptr;
    epm_secret_key* sk = nullptr;
    REQUIRE(epm_keygen(3, rng.rng, &pk, &sk) == EPM_OK);

    uint64_t e = 99;
    CHECK(epm_secret_key_epoch(sk, &e) == EPM_OK);
    CHECK(e == 0);
    uint32_t d = 0;
    CHECK(epm_public_key_depth(pk, &d) == EPM_OK);
    CHECK(d == 3);

    const uint8_t msg[] = "over the mesh";
    uint8_t* ct = nullptr;
    size_t ct_len = 0;
    REQUIRE(epm_encrypt(pk, 2, msg, sizeof(msg), rng.rng, &ct, &ct_len) == EPM_OK);

    uint64_t ct_epoch = 0;
    CHECK(epm_ciphertext_epoch(ct, ct_len, &ct_epoch) == EPM_OK);
    CHECK(ct_epoch == 2);

    // advance the key to epoch 2 and decrypt
    REQUIRE(epm_secret_key_update_to(sk, 2, rng.rng) == EPM_OK);
    CHECK(epm_secret_key_epoch(sk, &e) == EPM_OK);
    CHECK(e == 2);
    uint8_t* out = nullptr;
    size_t out_len = 0;
    REQUIRE(epm_decrypt(sk, ct, ct_len, &out, &out_len) == EPM_OK);
    CHECK(out_len == sizeof(msg));
    CHECK(std::memcmp(out, msg, out_len) == 0);
    epm_buffer_free(out);

    // forward secrecy surfaced as EPM_ERR_CRYPTO after advancing past 2
    REQUIRE(epm_secret_key_update_to(sk, 5, rng.rng) == EPM_OK);
    CHECK(epm_decrypt(sk, ct, ct_len, &out, &out_len) == EPM_ERR_CRYPTO);
    CHECK(epm_secret_key_update_to(sk, 1, rng.rng) == EPM_ERR_RANGE);  // no going back

    // exhaust the tree: update_to the last epoch then one more step fails
    uint64_t cap = 0;
    epm_max_epoch(3, &cap);
    REQUIRE(epm_secret_key_update_to(sk, cap, rng.rng) == EPM_OK);
    CHECK(epm_secret_key_update(sk, rng.rng) == EPM_ERR_EXHAUSTED);

    // serialization roundtrip through bytes
    uint8_t* pkb = nullptr;
    size_t pkb_len = 0;
    REQUIRE(epm_public_key_to_bytes(pk, &pkb, &pkb_len) == EPM_OK);
    epm_public_key* pk2 = nullptr;
    REQUIRE(epm_public_key_from_bytes(pkb, pkb_len, &pk2) == EPM_OK);
    uint8_t* pkb2 = nullptr;
    size_t pkb2_len = 0;
    REQUIRE(epm_public_key_to_bytes(pk2, &pkb2, &pkb2_len) == EPM_OK);
    CHECK(pkb_len == pkb2_len);
    CHECK(std::memcmp(pkb, pkb2, pkb_len) == 0);
    epm_buffer_free(pkb);
    epm_buffer_free(pkb2);
    epm_public_key_free(pk2);

    // malformed inputs are rejected with parse errors
    uint8_t junk[4] = {1, 2, 3, 4};
    epm_secret_key* sk2 = nullptr;
    CHECK(epm_secret_key_from_bytes(junk, sizeof(junk), &sk2) == EPM_ERR_PARSE);
    CHECK(epm_decrypt(sk, junk, sizeof(junk), &out, &out_len) == EPM_ERR_PARSE);

    epm_buffer_free(ct);
    epm_public_key_free(pk);
    epm_secret_key_free(sk);
}

TEST_CASE("null arguments are rejected, not crashed on") {
    CHECK(epm_rng_seeded(1, nullptr) == EPM_ERR_ARG);
    CHECK(epm_keygen(2, nullptr, nullptr, nullptr) == EPM_ERR_ARG);
    CHECK(epm_max_epoch(2, nullptr) == EPM_ERR_ARG);
    CHECK(epm_decrypt(nullptr, nullptr, 0, nullptr, nullptr) == EPM_ERR_ARG);
    epm_public_key_free(nullptr);
    epm_secret_key_free(nullptr);
    epm_rng_free(nullptr);
}

TEST_CASE("determinism through the C surface") {
    auto make_pk_bytes = [](uint64_t seed) {
        RngGuard rng(seed);
        epm_public_key* pk = nullptr;
        epm_secret_key* sk = nullptr;
        REQUIRE(epm_keygen(2, rng.rng, &pk, &sk) == EPM_OK);
        uint8_t* b = nullptr;
        size_t len = 0;
        REQUIRE(epm_public_key_to_bytes(pk, &b, &len) == EPM_OK);
        std::string out(reinterpret_cast<char*>(b), len);
        epm_buffer_free(b);
        epm_public_key_free(pk);
        epm_secret_key_free(sk);
        return out;
    };
    CHECK(make_pk_bytes(7) == make_pk_bytes(7));
    CHECK(make_pk_bytes(7) != make_pk_bytes(8));
}

TEST_CASE("bench through the C surface") {
    char* csv = nullptr;
    size_t sizes[] = {512};
    REQUIRE(epm_bench(2, sizes, 1, 30, &csv) == EPM_OK);
    std::string text(csv);
    epm_string_free(csv);
    CHECK(text.rfind("operation,size_bytes,iterations,mean_ns,stddev_ns\n", 0) == 0);
    CHECK(text.find("keygen") != std::string::npos);
    CHECK(text.find("public_ratchet") != std::string::npos);
    CHECK(text.find("private_ratchet") != std::string::npos);
    CHECK(text.find("encrypt,512") != std::string::npos);
    CHECK(text.find("decrypt,512") != std::string::npos);
    CHECK(epm_bench(0, sizes, 1, 30, &csv) == EPM_ERR_CONFIG);
}

TEST_CASE("simulate + analyze + trace-convert through the C surface") {
    namespace fs = std::filesystem;
    fs::path work = fs::temp_directory_path() / "epochmesh_capi";
    fs::remove_all(work);
    fs::create_directories(work);

    std::ofstream cfg(work / "sim.cfg");
    cfg << "[sim]\nusers = 12\nduration_s = 240\nstabilization_s = 60\nruns = 2\nseed = 5\n";
    cfg.close();

    std::string out_dir = (work / "out").string();
    REQUIRE(epm_simulate((work / "sim.cfg").string().c_str(), out_dir.c_str(), 2) == EPM_OK);
    CHECK(fs::exists(fs::path(out_dir) / "runs.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "timeline_5.csv"));
    CHECK(fs::exists(fs::path(out_dir) / "timeline_6.csv"));

    char* summary = nullptr;
    REQUIRE(epm_analyze((fs::path(out_dir) / "runs.csv").string().c_str(), &summary) == EPM_OK);
    std::string stext(summary);
    epm_string_free(summary);
    CHECK(stext.rfind("metric,mean,min,max,count", 0) == 0);
    CHECK(stext.find("success_ratio") != std::string::npos);

    CHECK(epm_simulate("/nonexistent/sim.cfg", out_dir.c_str(), 1) != EPM_OK);
    CHECK(epm_analyze("/nonexistent/runs.csv", &summary) == EPM_ERR_IO);

    // trace conversion
    std::ofstream raw(work / "raw.csv");
    raw << "0,0,100,200\n1000,0,150,200\n";
    raw.close();
    std::string conv = (work / "trace.csv").string();
    REQUIRE(epm_trace_convert((work / "raw.csv").string().c_str(), conv.c_str(), "tnxy", 0.001,
                              0.01) == EPM_OK);
    std::ifstream check(conv);
    std::string line;
    std::getline(check, line);
    CHECK(line == "node_id,time_s,x_m,y_m");
    CHECK(epm_trace_convert((work / "raw.csv").string().c_str(), conv.c_str(), "zzz", 1, 1) ==
          EPM_ERR_PARSE);
}
