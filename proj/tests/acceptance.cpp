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

// End-to-end acceptance runs. Each numbered check prints one PASS/FAIL line;
// the process exits with the number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "epochmesh/bench.hpp"
#include "epochmesh/ratchet.hpp"
#include "epochmesh/sim.hpp"
#include "epochmesh/timesync.hpp"

using namespace epochmesh;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s  %2d. %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void run(int number, const std::string& name,
         const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        auto [ok, detail] = fn();
        report(number, name, ok, detail);
    } catch (const std::exception& e) {
        report(number, name, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// 1. Every epoch of a depth-6 tree encrypts and then decrypts with the key
// advanced to exactly that epoch. Real crypto throughout.
std::pair<bool, std::string> criterion_correctness_sweep() {
    auto start = std::chrono::steady_clock::now();
    const uint32_t depth = 6;
    Drbg rng(101);
    auto [pk, sk] = ratchet::keygen(depth, rng);
    Bytes msg(96, 0x42);
    uint64_t checked = 0;
    for (uint64_t t = 0; t <= ratchet::max_epoch(depth); ++t) {
        Bytes wire = ratchet::encrypt(t, pk, msg, rng);
        auto ct = ratchet::Ciphertext::parse(wire);
        if (!ct) return {false, fmt("parse failed at epoch %llu", (unsigned long long)t)};
        auto out = ratchet::decrypt(t, sk, *ct);
        if (!out || *out != msg)
            return {false, fmt("roundtrip failed at epoch %llu", (unsigned long long)t)};
        ++checked;
        if (t < ratchet::max_epoch(depth)) ratchet::update(sk, rng);
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > 300.0) return {false, fmt("took %.1f s (budget 300 s)", secs)};
    return {true, fmt("%llu epochs, %.1f s", (unsigned long long)checked, secs)};
}

// 2. For every pair i < j in a depth-4 tree, the key advanced to j can no
// longer decrypt epoch i, and nothing on the stack is an ancestor-or-equal
// of identity(i). Exhaustive, zero tolerance.
std::pair<bool, std::string> criterion_forward_secrecy() {
    const uint32_t depth = 4;
    Drbg rng(202);
    auto [pk, sk] = ratchet::keygen(depth, rng);
    const uint64_t cap = ratchet::max_epoch(depth);
    Bytes msg(32, 0x5e);
    std::vector<ratchet::Ciphertext> cts;
    for (uint64_t t = 0; t <= cap; ++t) {
        auto ct = ratchet::Ciphertext::parse(ratchet::encrypt(t, pk, msg, rng));
        cts.push_back(*ct);
    }
    uint64_t pairs = 0;
    for (uint64_t j = 1; j <= cap; ++j) {
        ratchet::update(sk, rng);
        for (uint64_t i = 0; i < j; ++i) {
            if (ratchet::decrypt(i, sk, cts[i]).has_value())
                return {false, fmt("sk at %llu decrypted epoch %llu", (unsigned long long)j,
                                   (unsigned long long)i)};
            hibe::Identity past = ratchet::epoch_to_identity(i, depth);
            for (const auto& key : sk.stack())
                if (key.id.is_prefix_of(past))
                    return {false, fmt("stack holds ancestor of epoch %llu at state %llu",
                                       (unsigned long long)i, (unsigned long long)j)};
            ++pairs;
        }
        if (!ratchet::decrypt(j, sk, cts[j]).has_value())
            return {false, fmt("current epoch %llu stopped decrypting", (unsigned long long)j)};
    }
    return {true, fmt("%llu ordered pairs checked", (unsigned long long)pairs)};
}

// 3. Exactly 2^(L+1)-2 updates before exhaustion and stack <= L+1, L = 1..6.
std::pair<bool, std::string> criterion_traversal() {
    for (uint32_t depth = 1; depth <= 6; ++depth) {
        Drbg rng(300 + depth);
        auto [pk, sk] = ratchet::keygen(depth, rng);
        uint64_t updates = 0;
        while (true) {
            if (sk.stack_size() < 1 || sk.stack_size() > depth + 1)
                return {false, fmt("stack bound violated at depth %u", depth)};
            try {
                ratchet::update(sk, rng);
            } catch (const ratchet::KeyExhausted&) {
                break;
            }
            ++updates;
        }
        if (updates != ratchet::max_epoch(depth))
            return {false, fmt("depth %u: %llu updates, expected %llu", depth,
                               (unsigned long long)updates,
                               (unsigned long long)ratchet::max_epoch(depth))};
    }
    return {true, "depths 1..6 exhaustive"};
}

// 4. The depth-2 preorder table.
std::pair<bool, std::string> criterion_epoch_kat() {
    const char* expect[] = {"", "0", "00", "01", "1", "10", "11"};
    for (uint64_t t = 0; t <= 6; ++t) {
        if (ratchet::epoch_to_identity(t, 2).to_string() != expect[t])
            return {false, fmt("epoch %llu mapped wrong", (unsigned long long)t)};
    }
    try {
        ratchet::epoch_to_identity(7, 2);
        return {false, "epoch 7 accepted at depth 2"};
    } catch (const std::out_of_range&) {
    }
    return {true, "7 entries match"};
}

// 5. Over 100 independent keypairs, same (epoch, message length) gives
// byte-identical ciphertext length and component arity, and the wire layout
// accounts for every byte with no recipient-identifying field.
std::pair<bool, std::string> criterion_key_privacy() {
    Drbg rng(505);
    const uint32_t depth = 4;
    const uint64_t epoch = 3;
    const uint32_t id_len = ratchet::epoch_to_identity(epoch, depth).length;
    Bytes msg(512, 0x7a);
    size_t want_len = 0, want_arity = 0;
    for (int i = 0; i < 100; ++i) {
        auto [pk, sk] = ratchet::keygen(depth, rng);
        Bytes wire = ratchet::encrypt(epoch, pk, msg, rng);
        auto ct = ratchet::Ciphertext::parse(wire);
        if (!ct) return {false, "parse failure"};
        if (i == 0) {
            want_len = wire.size();
            want_arity = ct->enc.c.size();
        }
        if (wire.size() != want_len || ct->enc.c.size() != want_arity)
            return {false, fmt("shape diverged at keypair %d", i)};
        // layout audit: fixed fields account for every byte of the wire
        size_t accounted = 1 + 8 + 1 + ct->enc.c.size() * 48 + 12 + msg.size() + 16;
        if (wire.size() != accounted) return {false, "unaccounted bytes in the wire format"};
        if (ct->to_bytes() != wire) return {false, "re-serialization changed bytes"};
    }
    size_t formula = ratchet::Ciphertext::encoded_size(id_len, msg.size());
    if (want_len != formula) return {false, "length formula mismatch"};
    if (want_arity != 2 + id_len) return {false, "arity formula mismatch"};
    return {true, fmt("100 keypairs, %zu-byte wire, arity %zu", want_len, want_arity)};
}

// 6. Monte Carlo vote distribution vs the 27-draw enumeration, +-0.02.
std::pair<bool, std::string> criterion_vote_distribution() {
    const std::vector<double> cand{1000.0, 700000.0, 3000000.0};  // pairwise far
    const double eps = 100.0;
    // enumeration oracle: all 27 ordered draws, rule applied literally
    std::map<double, double> oracle;
    for (double v : cand) oracle[v] = 0.0;
    for (double ti : cand)
        for (double tj : cand)
            for (double tk : cand) {
                if (std::abs(ti - tj) < eps || std::abs(ti - tk) < eps) oracle[ti] += 1.0;
                else if (std::abs(tj - tk) < eps) oracle[tj] += 1.0;
                else {
                    oracle[ti] += 1.0 / 3.0;
                    oracle[tj] += 1.0 / 3.0;
                    oracle[tk] += 1.0 / 3.0;
                }
            }
    for (auto& [v, f] : oracle) f /= 27.0;

    SimRng rng(606);
    std::map<double, int> hits;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i)
        hits[timesync::three_majority_vote(cand, eps, rng)] += 1;
    double worst = 0.0;
    for (const auto& [v, expect] : oracle) {
        double got = hits[v] / double(trials);
        worst = std::max(worst, std::abs(got - expect));
    }
    if (worst > 0.02) return {false, fmt("max deviation %.4f > 0.02", worst)};
    return {true, fmt("max deviation %.4f over 10^4 votes", worst)};
}

sim::SimConfig grid100_config() {
    sim::SimConfig cfg;
    cfg.users = 100;
    cfg.density = 1.0;
    cfg.radius_m = 10.0;
    cfg.clock_offset_s = 300.0;  // +-5 minutes
    cfg.crypto = sim::CryptoMode::Mock;
    return cfg;
}

// 7. 100 honest users on a static grid reach 90% epoch agreement within
// 10 simulated minutes in at least 14 of 16 seeds.
std::pair<bool, std::string> criterion_sync_convergence() {
    sim::SimConfig cfg = grid100_config();
    cfg.message_interval_s = 0;  // synchronization only
    cfg.duration_s = 660.0;
    cfg.runs = 16;
    cfg.seed = 1;
    auto results = sim::run_campaign(cfg, 2);
    int ok = 0;
    double worst = 0;
    for (const auto& r : results) {
        if (r.summary.time_to_sync_s >= 0 && r.summary.time_to_sync_s <= 600.0) ++ok;
        worst = std::max(worst, r.summary.time_to_sync_s);
    }
    if (ok < 14) return {false, fmt("only %d/16 seeds within 10 min", ok)};
    return {true, fmt("%d/16 seeds, slowest %.0f s", ok, worst)};
}

// 8. Same scenario with traffic: mean success ratio >= 0.90 over 8 seeds
// without attackers, and strictly lower with 10% attackers.
std::pair<bool, std::string> criterion_message_success() {
    sim::SimConfig cfg = grid100_config();
    cfg.duration_s = 3600.0;
    cfg.stabilization_s = 300.0;
    cfg.runs = 8;
    cfg.seed = 21;

    auto honest = sim::run_campaign(cfg, 2);
    double mean_honest = 0;
    for (const auto& r : honest) {
        if (r.summary.success_ratio < 0) return {false, "run produced no counted messages"};
        mean_honest += r.summary.success_ratio;
    }
    mean_honest /= honest.size();

    cfg.attackers = 10;
    auto attacked = sim::run_campaign(cfg, 2);
    double mean_attacked = 0;
    for (const auto& r : attacked) mean_attacked += r.summary.success_ratio;
    mean_attacked /= attacked.size();

    if (mean_honest < 0.90) return {false, fmt("honest mean %.4f < 0.90", mean_honest)};
    if (!(mean_attacked < mean_honest))
        return {false, fmt("attacked mean %.4f not below honest %.4f", mean_attacked,
                           mean_honest)};
    return {true, fmt("honest %.4f, with 10%% attackers %.4f", mean_honest, mean_attacked)};
}

// 9. Identical campaign configuration produces byte-identical CSV files.
std::pair<bool, std::string> criterion_determinism() {
    namespace fs = std::filesystem;
    sim::SimConfig cfg = grid100_config();
    cfg.users = 36;
    cfg.duration_s = 600.0;
    cfg.stabilization_s = 120.0;
    cfg.runs = 3;
    cfg.seed = 77;

    fs::path d1 = fs::temp_directory_path() / "epochmesh_acc_a";
    fs::path d2 = fs::temp_directory_path() / "epochmesh_acc_b";
    fs::remove_all(d1);
    fs::remove_all(d2);
    sim::write_outputs(sim::run_campaign(cfg, 2), d1.string());
    sim::write_outputs(sim::run_campaign(cfg, 1), d2.string());

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };
    for (const char* name : {"runs.csv", "timeline_77.csv", "timeline_78.csv",
                             "timeline_79.csv"}) {
        std::string a = slurp(d1 / name), b = slurp(d2 / name);
        if (a.empty() || a != b) return {false, fmt("%s differs between reruns", name)};
    }
    return {true, "runs.csv and 3 timelines byte-identical"};
}

// 10. Microbenchmarks within the operational envelope, plus the converging
// model synchronizing slower than static at equal user count.
std::pair<bool, std::string> criterion_performance() {
    auto report = bench::run(16, {512, 10240}, 30);
    const auto* keygen = report.find("keygen");
    const auto* pub = report.find("public_ratchet");
    const auto* priv = report.find("private_ratchet");
    const auto* enc512 = report.find("encrypt", 512);
    const auto* enc10k = report.find("encrypt", 10240);
    const auto* dec512 = report.find("decrypt", 512);
    const auto* dec10k = report.find("decrypt", 10240);
    if (!keygen || !pub || !priv || !enc512 || !enc10k || !dec512 || !dec10k)
        return {false, "missing benchmark cells"};

    const double ms = 1e6;
    if (enc512->mean_ns > 50 * ms || enc10k->mean_ns > 50 * ms)
        return {false, fmt("encrypt %.2f/%.2f ms exceeds 50 ms", enc512->mean_ns / ms,
                           enc10k->mean_ns / ms)};
    if (dec512->mean_ns > 50 * ms || dec10k->mean_ns > 50 * ms)
        return {false, fmt("decrypt %.2f/%.2f ms exceeds 50 ms", dec512->mean_ns / ms,
                           dec10k->mean_ns / ms)};
    if (priv->mean_ns > 200 * ms)
        return {false, fmt("private ratchet %.2f ms exceeds 200 ms", priv->mean_ns / ms)};
    if (priv->mean_ns < 1e4 * pub->mean_ns)
        return {false, fmt("public ratchet only %.0fx faster than private",
                           priv->mean_ns / pub->mean_ns)};
    // message size barely moves encryption cost: the asymmetric part is fixed
    if (enc10k->mean_ns >= 3.0 * enc512->mean_ns)
        return {false, fmt("encrypt(10KiB)/encrypt(512) ratio %.2f not below 3",
                           enc10k->mean_ns / enc512->mean_ns)};

    // converging vs static ordering on a 2-group, 50-user run
    sim::SimConfig stat;
    stat.users = 50;
    stat.density = 1.0;
    stat.radius_m = 10.0;
    stat.clock_offset_s = 300.0;
    stat.message_interval_s = 0;
    stat.duration_s = 1800.0;
    stat.runs = 8;
    stat.seed = 31;
    sim::SimConfig conv = stat;
    conv.movement = sim::MovementModel::Converging;
    conv.groups = 2;
    conv.dwell_s = 600.0;
    conv.spawn_distance_m = 60.0;
    conv.speed_mps = 1.4;

    auto rs = sim::run_campaign(stat, 2);
    auto rc = sim::run_campaign(conv, 2);
    double mean_static = 0, mean_conv = 0;
    for (const auto& r : rs)
        mean_static += r.summary.time_to_sync_s < 0 ? stat.duration_s : r.summary.time_to_sync_s;
    for (const auto& r : rc)
        mean_conv += r.summary.time_to_sync_s < 0 ? conv.duration_s : r.summary.time_to_sync_s;
    mean_static /= rs.size();
    mean_conv /= rc.size();
    if (!(mean_conv > mean_static))
        return {false, fmt("converging %.0f s not slower than static %.0f s", mean_conv,
                           mean_static)};

    return {true, fmt("enc %.1f ms, dec %.1f ms, priv %.1f ms, pub %.1f ns; "
                      "tts static %.0f s vs converging %.0f s",
                      enc10k->mean_ns / ms, dec10k->mean_ns / ms, priv->mean_ns / ms,
                      pub->mean_ns, mean_static, mean_conv)};
}

}  // namespace

int main() {
    std::printf("epochmesh acceptance suite\n");
    run(1, "ratchet correctness sweep, depth 6, every epoch", criterion_correctness_sweep);
    run(2, "forward secrecy, depth 4, all ordered pairs", criterion_forward_secrecy);
    run(3, "traversal arithmetic, depths 1..6", criterion_traversal);
    run(4, "epoch-to-identity known answers, depth 2", criterion_epoch_kat);
    run(5, "structural key privacy over 100 keypairs", criterion_key_privacy);
    run(6, "three-majority distribution vs enumeration", criterion_vote_distribution);
    run(7, "time-sync convergence, 100-user grid", criterion_sync_convergence);
    run(8, "message success ratio, honest and attacked", criterion_message_success);
    run(9, "campaign determinism, byte-identical CSVs", criterion_determinism);
    run(10, "microbenchmarks and converging-vs-static ordering", criterion_performance);
    if (g_failures == 0)
        std::printf("all acceptance checks passed\n");
    else
        std::printf("%d acceptance check(s) failed\n", g_failures);
    return g_failures;
}
