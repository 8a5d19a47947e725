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

#include "epochmesh.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "epochmesh/bench.hpp"
#include "epochmesh/ratchet.hpp"
#include "epochmesh/rng.hpp"
#include "epochmesh/sim.hpp"

using namespace epochmesh;

struct epm_rng {
    Drbg drbg;
};
struct epm_public_key {
    ratchet::PublicKey pk;
};
struct epm_secret_key {
    ratchet::SecretKey sk;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

int fail(int code, const std::string& msg) {
    set_error(msg);
    return code;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const ratchet::KeyExhausted& e) {
        return fail(EPM_ERR_EXHAUSTED, e.what());
    } catch (const std::out_of_range& e) {
        return fail(EPM_ERR_RANGE, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(EPM_ERR_CONFIG, e.what());
    } catch (const std::exception& e) {
        return fail(EPM_ERR_INTERNAL, e.what());
    }
}

uint8_t* copy_out(const Bytes& data, size_t* out_len) {
    uint8_t* buf = static_cast<uint8_t*>(std::malloc(data.size() ? data.size() : 1));
    if (buf && !data.empty()) std::memcpy(buf, data.data(), data.size());
    if (out_len) *out_len = data.size();
    return buf;
}

char* copy_out_str(const std::string& s) {
    char* buf = static_cast<char*>(std::malloc(s.size() + 1));
    if (buf) std::memcpy(buf, s.c_str(), s.size() + 1);
    return buf;
}

}  // namespace

extern "C" {

const char* epm_version(void) { return "1.0.0"; }

const char* epm_error_name(int code) {
    switch (code) {
        case EPM_OK: return "ok";
        case EPM_ERR_ARG: return "bad argument";
        case EPM_ERR_CONFIG: return "invalid configuration";
        case EPM_ERR_PARSE: return "malformed input";
        case EPM_ERR_CRYPTO: return "decryption failed";
        case EPM_ERR_EXHAUSTED: return "key lifetime exhausted";
        case EPM_ERR_RANGE: return "epoch out of range";
        case EPM_ERR_IO: return "io error";
        default: return "internal error";
    }
}

const char* epm_last_error(void) { return g_last_error.c_str(); }

void epm_buffer_free(uint8_t* buf) { std::free(buf); }
void epm_string_free(char* str) { std::free(str); }

int epm_rng_seeded(uint64_t seed, epm_rng** out) {
    if (!out) return fail(EPM_ERR_ARG, "out is null");
    return guarded([&] {
        *out = new epm_rng{Drbg(seed)};
        return EPM_OK;
    });
}

int epm_rng_system(epm_rng** out) {
    if (!out) return fail(EPM_ERR_ARG, "out is null");
    return guarded([&] {
        *out = new epm_rng{Drbg::from_system_entropy()};
        return EPM_OK;
    });
}

void epm_rng_free(epm_rng* rng) { delete rng; }

int epm_max_epoch(uint32_t depth, uint64_t* out) {
    if (!out) return fail(EPM_ERR_ARG, "out is null");
    if (depth < 1 || depth > hibe::kMaxDepth) return fail(EPM_ERR_CONFIG, "depth out of range");
    *out = ratchet::max_epoch(depth);
    return EPM_OK;
}

int epm_epoch_identity(uint64_t epoch, uint32_t depth, char** out) {
    if (!out) return fail(EPM_ERR_ARG, "out is null");
    return guarded([&] {
        *out = copy_out_str(ratchet::epoch_to_identity(epoch, depth).to_string());
        return EPM_OK;
    });
}

int epm_keygen(uint32_t depth, epm_rng* rng, epm_public_key** pk, epm_secret_key** sk) {
    if (!rng || !pk || !sk) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        auto [p, s] = ratchet::keygen(depth, rng->drbg);
        *pk = new epm_public_key{std::move(p)};
        *sk = new epm_secret_key{std::move(s)};
        return EPM_OK;
    });
}

void epm_public_key_free(epm_public_key* pk) { delete pk; }
void epm_secret_key_free(epm_secret_key* sk) {
    if (sk) sk->sk.wipe();
    delete sk;
}

int epm_public_key_epoch(const epm_public_key* pk, uint64_t* out) {
    if (!pk || !out) return fail(EPM_ERR_ARG, "null argument");
    *out = pk->pk.epoch();
    return EPM_OK;
}

int epm_public_key_depth(const epm_public_key* pk, uint32_t* out) {
    if (!pk || !out) return fail(EPM_ERR_ARG, "null argument");
    *out = pk->pk.depth();
    return EPM_OK;
}

int epm_public_key_set_epoch(epm_public_key* pk, uint64_t epoch) {
    if (!pk) return fail(EPM_ERR_ARG, "pk is null");
    if (epoch > ratchet::max_epoch(pk->pk.depth()))
        return fail(EPM_ERR_RANGE, "epoch beyond tree capacity");
    pk->pk.set_epoch(epoch);
    return EPM_OK;
}

int epm_secret_key_epoch(const epm_secret_key* sk, uint64_t* out) {
    if (!sk || !out) return fail(EPM_ERR_ARG, "null argument");
    *out = sk->sk.epoch();
    return EPM_OK;
}

int epm_secret_key_depth(const epm_secret_key* sk, uint32_t* out) {
    if (!sk || !out) return fail(EPM_ERR_ARG, "null argument");
    *out = sk->sk.depth();
    return EPM_OK;
}

int epm_secret_key_stack_size(const epm_secret_key* sk, size_t* out) {
    if (!sk || !out) return fail(EPM_ERR_ARG, "null argument");
    *out = sk->sk.stack_size();
    return EPM_OK;
}

int epm_secret_key_update(epm_secret_key* sk, epm_rng* rng) {
    if (!sk || !rng) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        ratchet::update(sk->sk, rng->drbg);
        return EPM_OK;
    });
}

int epm_secret_key_update_to(epm_secret_key* sk, uint64_t epoch, epm_rng* rng) {
    if (!sk || !rng) return fail(EPM_ERR_ARG, "null argument");
    if (epoch < sk->sk.epoch()) return fail(EPM_ERR_RANGE, "ratchet cannot move backwards");
    if (epoch > ratchet::max_epoch(sk->sk.depth()))
        return fail(EPM_ERR_RANGE, "epoch beyond tree capacity");
    return guarded([&] {
        while (sk->sk.epoch() < epoch) ratchet::update(sk->sk, rng->drbg);
        return EPM_OK;
    });
}

int epm_public_key_to_bytes(const epm_public_key* pk, uint8_t** out, size_t* out_len) {
    if (!pk || !out || !out_len) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        *out = copy_out(pk->pk.to_bytes(), out_len);
        return *out ? EPM_OK : fail(EPM_ERR_INTERNAL, "allocation failed");
    });
}

int epm_public_key_from_bytes(const uint8_t* data, size_t len, epm_public_key** out) {
    if (!data || !out) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        auto pk = ratchet::PublicKey::from_bytes(BytesView(data, len));
        if (!pk) return fail(EPM_ERR_PARSE, "not a valid public key encoding");
        *out = new epm_public_key{std::move(*pk)};
        return EPM_OK;
    });
}

int epm_secret_key_to_bytes(const epm_secret_key* sk, uint8_t** out, size_t* out_len) {
    if (!sk || !out || !out_len) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        *out = copy_out(sk->sk.to_bytes(), out_len);
        return *out ? EPM_OK : fail(EPM_ERR_INTERNAL, "allocation failed");
    });
}

int epm_secret_key_from_bytes(const uint8_t* data, size_t len, epm_secret_key** out) {
    if (!data || !out) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        auto sk = ratchet::SecretKey::from_bytes(BytesView(data, len));
        if (!sk) return fail(EPM_ERR_PARSE, "not a valid secret key encoding");
        *out = new epm_secret_key{std::move(*sk)};
        return EPM_OK;
    });
}

int epm_encrypt(const epm_public_key* pk, uint64_t epoch, const uint8_t* msg, size_t msg_len,
                epm_rng* rng, uint8_t** out, size_t* out_len) {
    if (!pk || !rng || !out || !out_len || (!msg && msg_len > 0))
        return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        Bytes wire = ratchet::encrypt(epoch, pk->pk, BytesView(msg, msg_len), rng->drbg);
        *out = copy_out(wire, out_len);
        return *out ? EPM_OK : fail(EPM_ERR_INTERNAL, "allocation failed");
    });
}

int epm_decrypt(const epm_secret_key* sk, const uint8_t* ct, size_t ct_len, uint8_t** out,
                size_t* out_len) {
    if (!sk || !ct || !out || !out_len) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        auto parsed = ratchet::Ciphertext::parse(BytesView(ct, ct_len));
        if (!parsed) return fail(EPM_ERR_PARSE, "malformed ciphertext");
        auto msg = ratchet::decrypt(parsed->epoch, sk->sk, *parsed);
        if (!msg)
            return fail(EPM_ERR_CRYPTO, "not addressed to this key or epoch key deleted");
        *out = copy_out(*msg, out_len);
        return *out ? EPM_OK : fail(EPM_ERR_INTERNAL, "allocation failed");
    });
}

int epm_ciphertext_epoch(const uint8_t* ct, size_t ct_len, uint64_t* out) {
    if (!ct || !out) return fail(EPM_ERR_ARG, "null argument");
    auto parsed = ratchet::Ciphertext::parse(BytesView(ct, ct_len));
    if (!parsed) return fail(EPM_ERR_PARSE, "malformed ciphertext");
    *out = parsed->epoch;
    return EPM_OK;
}

int epm_bench(uint32_t depth, const size_t* sizes, size_t n_sizes, uint32_t iterations,
              char** out_csv) {
    if (!out_csv || (n_sizes > 0 && !sizes)) return fail(EPM_ERR_ARG, "null argument");
    if (depth < 1 || depth > hibe::kMaxDepth) return fail(EPM_ERR_CONFIG, "depth out of range");
    return guarded([&] {
        std::vector<size_t> szs(sizes, sizes + n_sizes);
        if (szs.empty()) szs = {512, 1024, 10240};
        auto report = bench::run(depth, szs, iterations);
        *out_csv = copy_out_str(report.to_csv());
        return EPM_OK;
    });
}

int epm_simulate(const char* config_path, const char* out_dir, uint32_t jobs) {
    if (!config_path || !out_dir) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        sim::SimConfig cfg;
        try {
            cfg = sim::load_config(config_path);
        } catch (const std::invalid_argument& e) {
            return fail(EPM_ERR_CONFIG, e.what());
        }
        if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
        auto results = sim::run_campaign(cfg, jobs);
        try {
            sim::write_outputs(results, out_dir);
        } catch (const std::runtime_error& e) {
            return fail(EPM_ERR_IO, e.what());
        }
        return EPM_OK;
    });
}

int epm_analyze(const char* runs_csv_path, char** out_summary_csv) {
    if (!runs_csv_path || !out_summary_csv) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        std::ifstream in(runs_csv_path, std::ios::binary);
        if (!in.good()) return fail(EPM_ERR_IO, std::string("cannot open ") + runs_csv_path);
        std::stringstream ss;
        ss << in.rdbuf();
        std::vector<sim::ColumnStats> stats;
        try {
            stats = sim::analyze_runs_csv(ss.str());
        } catch (const std::invalid_argument& e) {
            return fail(EPM_ERR_PARSE, e.what());
        }
        *out_summary_csv = copy_out_str(sim::stats_to_csv(stats));
        return EPM_OK;
    });
}

int epm_trace_convert(const char* in_path, const char* out_path, const char* schema,
                      double time_scale, double pos_scale) {
    if (!in_path || !out_path || !schema) return fail(EPM_ERR_ARG, "null argument");
    return guarded([&] {
        std::ifstream in(in_path, std::ios::binary);
        if (!in.good()) return fail(EPM_ERR_IO, std::string("cannot open ") + in_path);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string converted;
        try {
            converted = sim::trace_convert_text(ss.str(), schema, time_scale, pos_scale);
        } catch (const std::invalid_argument& e) {
            return fail(EPM_ERR_PARSE, e.what());
        }
        std::ofstream out(out_path, std::ios::binary);
        if (!out.good()) return fail(EPM_ERR_IO, std::string("cannot write ") + out_path);
        out << converted;
        return EPM_OK;
    });
}

}  // extern "C"
