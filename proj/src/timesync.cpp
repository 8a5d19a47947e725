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

#include "epochmesh/timesync.hpp"

#include <algorithm>
#include <cmath>

namespace epochmesh::timesync {

void NeighborClockTable::record(uint32_t neighbor, double clock_value_ms,
                                double local_uptime_ms) {
    entries_[neighbor] = Entry{clock_value_ms, local_uptime_ms};
}

std::vector<double> NeighborClockTable::candidates(double local_uptime_ms) const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_)
        out.push_back(e.value_ms + (local_uptime_ms - e.receipt_uptime_ms));
    return out;
}

double three_majority_vote(const std::vector<double>& candidates, double epsilon_ms,
                           SimRng& rng) {
    if (candidates.empty()) return 0.0;
    const size_t n = candidates.size();
    double ti = candidates[rng.uniform(n)];
    double tj = candidates[rng.uniform(n)];
    double tk = candidates[rng.uniform(n)];
    if (std::abs(ti - tj) < epsilon_ms || std::abs(ti - tk) < epsilon_ms) return ti;
    if (std::abs(tj - tk) < epsilon_ms) return tj;
    switch (rng.uniform(3)) {
        case 0: return ti;
        case 1: return tj;
        default: return tk;
    }
}

Bytes make_time_broadcast(double clock_value_ms) {
    Bytes out;
    out.reserve(kTimeBroadcastSize);
    out.push_back(kTimeBroadcastTag);
    double clamped = std::max(0.0, clock_value_ms);
    put_u64be(out, static_cast<uint64_t>(std::llround(clamped)));
    return out;
}

std::optional<double> parse_time_broadcast(BytesView data) {
    if (data.size() != kTimeBroadcastSize || data[0] != kTimeBroadcastTag) return std::nullopt;
    return static_cast<double>(get_u64be(data.data() + 1));
}

double share_within_epsilon(std::vector<double> clocks, double epsilon_ms) {
    if (clocks.empty()) return 0.0;
    std::sort(clocks.begin(), clocks.end());
    size_t best = 1, lo = 0;
    for (size_t hi = 0; hi < clocks.size(); ++hi) {
        while (clocks[hi] - clocks[lo] > epsilon_ms) ++lo;
        best = std::max(best, hi - lo + 1);
    }
    return static_cast<double>(best) / static_cast<double>(clocks.size());
}

}  // namespace epochmesh::timesync
