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

// Operator front end. Everything goes through the shared library's C
// interface (epochmesh.h). Exit codes: 0 success, 1 usage error, 2 runtime
// failure.

#include <epochmesh.h>

#include <CLI11.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Failure {
    int exit_code;
    std::string message;
};

[[noreturn]] void fail_runtime(const std::string& what, int rc) {
    std::string detail = epm_last_error();
    std::ostringstream msg;
    msg << "error: " << what << ": " << epm_error_name(rc);
    if (!detail.empty()) msg << " (" << detail << ")";
    throw Failure{kExitRuntime, msg.str()};
}

void check(int rc, const std::string& what) {
    if (rc != EPM_OK) fail_runtime(what, rc);
}

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw Failure{kExitRuntime, "error: cannot open " + path};
    return std::vector<uint8_t>((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const uint8_t* data, size_t len) {
    std::ofstream out(path, std::ios::binary);
    if (!out.good()) throw Failure{kExitRuntime, "error: cannot write " + path};
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}

struct Rng {
    epm_rng* handle = nullptr;
    Rng(bool seeded, uint64_t seed) {
        int rc = seeded ? epm_rng_seeded(seed, &handle) : epm_rng_system(&handle);
        check(rc, "initializing randomness");
    }
    ~Rng() { epm_rng_free(handle); }
};

struct PkHandle {
    epm_public_key* pk = nullptr;
    ~PkHandle() { epm_public_key_free(pk); }
};
struct SkHandle {
    epm_secret_key* sk = nullptr;
    ~SkHandle() { epm_secret_key_free(sk); }
};

PkHandle load_pk(const std::string& path) {
    auto bytes = read_file(path);
    PkHandle h;
    check(epm_public_key_from_bytes(bytes.data(), bytes.size(), &h.pk), "parsing " + path);
    return h;
}

SkHandle load_sk(const std::string& path) {
    auto bytes = read_file(path);
    SkHandle h;
    check(epm_secret_key_from_bytes(bytes.data(), bytes.size(), &h.sk), "parsing " + path);
    return h;
}

void save_sk(const std::string& path, const epm_secret_key* sk) {
    uint8_t* buf = nullptr;
    size_t len = 0;
    check(epm_secret_key_to_bytes(sk, &buf, &len), "serializing secret key");
    write_file(path, buf, len);
    epm_buffer_free(buf);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epochmesh: forward-secret mesh messaging toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--seed", seed, "seed for all randomness (env EPOCHMESH_SEED)")
        ->envname("EPOCHMESH_SEED")
        ->each([&seed_set](const std::string&) { seed_set = true; });

    // keygen
    auto* keygen = app.add_subcommand("keygen", "generate a ratchet key pair");
    uint32_t kg_depth = 16;
    std::string kg_pk = "key.pk", kg_sk = "key.sk";
    keygen->add_option("--depth", kg_depth, "key tree depth (epochs = 2^(depth+1)-2)")
        ->check(CLI::Range(1u, 32u));
    keygen->add_option("--pk", kg_pk, "public key output file");
    keygen->add_option("--sk", kg_sk, "secret key output file");

    // ratchet-demo
    auto* demo = app.add_subcommand("ratchet-demo",
                                    "walk the epoch tree; or advance a stored secret key");
    uint32_t demo_depth = 3;
    std::string demo_sk, demo_out;
    uint64_t demo_advance = 1;
    demo->add_option("--depth", demo_depth, "tree depth for the self-contained walk")
        ->check(CLI::Range(1u, 10u));
    demo->add_option("--sk", demo_sk, "advance this secret key file instead");
    demo->add_option("--advance", demo_advance, "number of update steps for --sk");
    demo->add_option("--out", demo_out, "output file for the advanced key (default: in place)");

    // encrypt
    auto* encrypt = app.add_subcommand("encrypt", "encrypt a file to a public key at an epoch");
    std::string enc_pk, enc_in, enc_out = "message.ct";
    uint64_t enc_epoch = 0;
    encrypt->add_option("--pk", enc_pk, "recipient public key file")->required();
    encrypt->add_option("--epoch", enc_epoch, "epoch to encrypt for")->required();
    encrypt->add_option("--in", enc_in, "plaintext file")->required();
    encrypt->add_option("--out", enc_out, "ciphertext output file");

    // decrypt
    auto* decrypt = app.add_subcommand("decrypt", "decrypt a ciphertext file");
    std::string dec_sk, dec_in, dec_out = "message.out";
    decrypt->add_option("--sk", dec_sk, "secret key file")->required();
    decrypt->add_option("--in", dec_in, "ciphertext file")->required();
    decrypt->add_option("--out", dec_out, "plaintext output file");

    // bench
    auto* bench = app.add_subcommand("bench", "microbenchmark the ratchet operations");
    uint32_t bench_depth = 16, bench_iters = 30;
    std::vector<size_t> bench_sizes{512, 1024, 10240};
    std::string bench_out;
    bench->add_option("--depth", bench_depth, "key tree depth")->check(CLI::Range(1u, 32u));
    bench->add_option("--iterations", bench_iters, "iterations per cell (min 30)");
    bench->add_option("--sizes", bench_sizes, "message sizes in bytes");
    bench->add_option("--out", bench_out, "write CSV here instead of stdout");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run a simulation campaign");
    std::string sim_config, sim_out = "sim-out";
    uint32_t sim_jobs = 0;
    simulate->add_option("--config", sim_config, "campaign config file")->required();
    simulate->add_option("--out", sim_out, "output directory");
    simulate->add_option("--jobs", sim_jobs, "parallel runs (0 = one per core)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "summarize a runs.csv");
    std::string an_runs = "runs.csv";
    analyze->add_option("--runs", an_runs, "runs.csv path");

    // trace-convert
    auto* trace = app.add_subcommand("trace-convert", "convert raw motion data to a trace CSV");
    std::string tr_in, tr_out = "trace.csv", tr_schema = "ntxy";
    double tr_tscale = 1.0, tr_pscale = 1.0;
    trace->add_option("--in", tr_in, "raw input CSV")->required();
    trace->add_option("--out", tr_out, "canonical trace output");
    trace->add_option("--schema", tr_schema, "input column order: ntxy or tnxy");
    trace->add_option("--time-scale", tr_tscale, "multiply input times by this");
    trace->add_option("--pos-scale", tr_pscale, "multiply input positions by this");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
            e.get_name() == "CallForVersion") {
            return app.exit(e);
        }
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*keygen) {
            Rng rng(seed_set, seed);
            PkHandle pk;
            SkHandle sk;
            check(epm_keygen(kg_depth, rng.handle, &pk.pk, &sk.sk), "key generation");
            uint8_t* buf = nullptr;
            size_t len = 0;
            check(epm_public_key_to_bytes(pk.pk, &buf, &len), "serializing public key");
            write_file(kg_pk, buf, len);
            size_t pk_len = len;
            epm_buffer_free(buf);
            save_sk(kg_sk, sk.sk);
            uint64_t cap = 0;
            epm_max_epoch(kg_depth, &cap);
            std::cout << "wrote " << kg_pk << " (" << pk_len << " bytes) and " << kg_sk
                      << "; depth " << kg_depth << ", epochs 0.." << cap << "\n";
        } else if (*demo) {
            Rng rng(seed_set, seed);
            if (!demo_sk.empty()) {
                SkHandle sk = load_sk(demo_sk);
                uint64_t epoch = 0;
                for (uint64_t i = 0; i < demo_advance; ++i)
                    check(epm_secret_key_update(sk.sk, rng.handle), "ratchet update");
                check(epm_secret_key_epoch(sk.sk, &epoch), "reading epoch");
                size_t stack = 0;
                epm_secret_key_stack_size(sk.sk, &stack);
                save_sk(demo_out.empty() ? demo_sk : demo_out, sk.sk);
                std::cout << "advanced to epoch " << epoch << " (stack " << stack << ")\n";
            } else {
                uint64_t cap = 0;
                epm_max_epoch(demo_depth, &cap);
                std::cout << "epoch tree, depth " << demo_depth << " (" << cap + 1
                          << " epochs)\n";
                PkHandle pk;
                SkHandle sk;
                check(epm_keygen(demo_depth, rng.handle, &pk.pk, &sk.sk), "key generation");
                const uint8_t probe[] = "probe";
                uint8_t* ct = nullptr;
                size_t ct_len = 0;
                check(epm_encrypt(pk.pk, 0, probe, sizeof(probe), rng.handle, &ct, &ct_len),
                      "encrypting demo message");
                for (uint64_t t = 0; t <= cap; ++t) {
                    char* path = nullptr;
                    check(epm_epoch_identity(t, demo_depth, &path), "mapping epoch");
                    size_t stack = 0;
                    epm_secret_key_stack_size(sk.sk, &stack);
                    std::cout << "epoch " << t << "  identity [" << path << "]  stack " << stack
                              << "\n";
                    epm_string_free(path);
                    if (t < cap) check(epm_secret_key_update(sk.sk, rng.handle), "update");
                }
                uint8_t* out = nullptr;
                size_t out_len = 0;
                int rc = epm_decrypt(sk.sk, ct, ct_len, &out, &out_len);
                std::cout << "decrypting the epoch-0 message with the fully advanced key: "
                          << (rc == EPM_ERR_CRYPTO ? "refused (key deleted)" : "UNEXPECTED")
                          << "\n";
                epm_buffer_free(ct);
                if (rc == EPM_OK) {
                    epm_buffer_free(out);
                    throw Failure{kExitRuntime, "error: forward secrecy violated"};
                }
            }
        } else if (*encrypt) {
            Rng rng(seed_set, seed);
            PkHandle pk = load_pk(enc_pk);
            auto msg = read_file(enc_in);
            uint8_t* ct = nullptr;
            size_t ct_len = 0;
            check(epm_encrypt(pk.pk, enc_epoch, msg.data(), msg.size(), rng.handle, &ct, &ct_len),
                  "encrypting");
            write_file(enc_out, ct, ct_len);
            epm_buffer_free(ct);
            std::cout << "wrote " << enc_out << " (" << ct_len << " bytes, epoch " << enc_epoch
                      << ")\n";
        } else if (*decrypt) {
            SkHandle sk = load_sk(dec_sk);
            auto ct = read_file(dec_in);
            uint8_t* out = nullptr;
            size_t out_len = 0;
            check(epm_decrypt(sk.sk, ct.data(), ct.size(), &out, &out_len), "decrypting");
            write_file(dec_out, out, out_len);
            epm_buffer_free(out);
            std::cout << "wrote " << dec_out << " (" << out_len << " bytes)\n";
        } else if (*bench) {
            char* csv = nullptr;
            check(epm_bench(bench_depth, bench_sizes.data(), bench_sizes.size(), bench_iters,
                            &csv),
                  "benchmarking");
            if (bench_out.empty()) {
                std::cout << csv;
            } else {
                write_file(bench_out, reinterpret_cast<const uint8_t*>(csv), std::strlen(csv));
                std::cout << "wrote " << bench_out << "\n";
            }
            epm_string_free(csv);
        } else if (*simulate) {
            check(epm_simulate(sim_config.c_str(), sim_out.c_str(), sim_jobs), "simulating");
            char* summary = nullptr;
            check(epm_analyze((sim_out + "/runs.csv").c_str(), &summary), "summarizing");
            std::cout << "campaign written to " << sim_out << "\n" << summary;
            epm_string_free(summary);
        } else if (*analyze) {
            char* summary = nullptr;
            check(epm_analyze(an_runs.c_str(), &summary), "analyzing");
            std::cout << summary;
            epm_string_free(summary);
        } else if (*trace) {
            check(epm_trace_convert(tr_in.c_str(), tr_out.c_str(), tr_schema.c_str(), tr_tscale,
                                    tr_pscale),
                  "converting trace");
            std::cout << "wrote " << tr_out << "\n";
        }
    } catch (const Failure& f) {
        std::cerr << f.message << "\n";
        return f.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
