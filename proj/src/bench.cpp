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

#include "epochmesh/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "epochmesh/ratchet.hpp"

namespace epochmesh::bench {

namespace {

using Clock = std::chrono::steady_clock;

double now_ns() {
    return std::chrono::duration<double, std::nano>(Clock::now().time_since_epoch()).count();
}

Cell summarize(const std::string& op, size_t size, std::vector<double> samples) {
    // 10% trimmed mean and stddev
    std::sort(samples.begin(), samples.end());
    size_t trim = samples.size() / 10;
    std::vector<double> kept(samples.begin() + trim, samples.end() - trim);
    double mean = 0;
    for (double s : kept) mean += s;
    mean /= kept.size();
    double var = 0;
    for (double s : kept) var += (s - mean) * (s - mean);
    var = kept.size() > 1 ? var / (kept.size() - 1) : 0.0;
    return {op, size, static_cast<uint32_t>(samples.size()), mean, std::sqrt(var)};
}

}  // namespace

const Cell* Report::find(const std::string& op, size_t size) const {
    for (const auto& c : cells)
        if (c.operation == op && c.size_bytes == size) return &c;
    return nullptr;
}

std::string Report::to_csv() const {
    std::ostringstream out;
    out << "operation,size_bytes,iterations,mean_ns,stddev_ns\n";
    char buf[160];
    for (const auto& c : cells) {
        std::snprintf(buf, sizeof(buf), "%s,%zu,%u,%.1f,%.1f\n", c.operation.c_str(),
                      c.size_bytes, c.iterations, c.mean_ns, c.stddev_ns);
        out << buf;
    }
    return out.str();
}

Report run(uint32_t depth, const std::vector<size_t>& message_sizes, uint32_t iterations) {
    if (iterations < 30) iterations = 30;  // noise floor
    Report report;
    Drbg rng(0x424e4348);

    // keygen
    {
        std::vector<double> samples;
        ratchet::keygen(depth, rng);  // warmup
        for (uint32_t i = 0; i < iterations; ++i) {
            double t0 = now_ns();
            auto kp = ratchet::keygen(depth, rng);
            samples.push_back(now_ns() - t0);
        }
        report.cells.push_back(summarize("keygen", 0, samples));
    }

    auto [pk, sk] = ratchet::keygen(depth, rng);

    // public ratchet: advancing the epoch counter on the public key. Far too
    // fast for one-shot timing, so measure batches and divide.
    {
        std::vector<double> samples;
        const uint32_t batch = 1000000;
        for (uint32_t i = 0; i < iterations; ++i) {
            double t0 = now_ns();
            for (uint32_t j = 0; j < batch; ++j)
                pk.set_epoch((pk.epoch() + 1) % ratchet::max_epoch(depth));
            samples.push_back((now_ns() - t0) / batch);
        }
        pk.set_epoch(0);
        report.cells.push_back(summarize("public_ratchet", 0, samples));
    }

    // private ratchet: successive updates along the tree (regenerate when the
    // key runs out)
    {
        std::vector<double> samples;
        Drbg krng(0x5052495633);
        auto [bpk, bsk] = ratchet::keygen(depth, krng);
        for (uint32_t i = 0; i < iterations; ++i) {
            if (bsk.epoch() >= ratchet::max_epoch(depth)) {
                std::tie(bpk, bsk) = ratchet::keygen(depth, krng);
            }
            double t0 = now_ns();
            ratchet::update(bsk, krng);
            samples.push_back(now_ns() - t0);
        }
        report.cells.push_back(summarize("private_ratchet", 0, samples));
    }

    // encrypt / decrypt per message size, at a mid-tree epoch so the
    // encapsulation carries a realistic component count
    uint64_t epoch = std::min<uint64_t>(depth, ratchet::max_epoch(depth));
    for (size_t size : message_sizes) {
        Bytes msg = rng.bytes(size);
        std::vector<double> enc_samples, dec_samples;
        Bytes wire = ratchet::encrypt(epoch, pk, msg, rng);
        for (uint32_t i = 0; i < iterations; ++i) {
            double t0 = now_ns();
            Bytes w = ratchet::encrypt(epoch, pk, msg, rng);
            enc_samples.push_back(now_ns() - t0);
            wire = std::move(w);
        }
        report.cells.push_back(summarize("encrypt", size, enc_samples));

        // advance a copy of the key to the bench epoch once
        Drbg drng(0x444543);
        auto [dpk, dsk] = ratchet::keygen(depth, drng);
        while (dsk.epoch() < epoch) ratchet::update(dsk, drng);
        Bytes dwire = ratchet::encrypt(epoch, dpk, msg, drng);
        auto ct = ratchet::Ciphertext::parse(dwire);
        for (uint32_t i = 0; i < iterations; ++i) {
            double t0 = now_ns();
            auto out = ratchet::decrypt(epoch, dsk, *ct);
            dec_samples.push_back(now_ns() - t0);
            if (!out.has_value()) throw std::logic_error("bench decrypt failed");
        }
        report.cells.push_back(summarize("decrypt", size, dec_samples));
    }

    return report;
}

}  // namespace epochmesh::bench
