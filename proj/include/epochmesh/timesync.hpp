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

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "epochmesh/bytes.hpp"
#include "epochmesh/rng.hpp"

// Decentralized clock agreement: every vote period a node draws three clock
// values (with replacement) from its latest neighbor broadcasts plus its own
// clock, adopts a value held by an agreeing pair if one is drawn, otherwise a
// uniformly random one of the three, then clears the table and broadcasts the
// adopted value.

namespace epochmesh::timesync {

struct ClockState {
    double value_ms = 0.0;          // the clock itself; votes may move it either way
    double drift_ms_per_min = 0.0;  // oscillator error

    // Advance by elapsed true time (ms); the clock runs fast or slow by its
    // drift rate.
    void advance(double elapsed_true_ms) {
        value_ms += elapsed_true_ms * (1.0 + drift_ms_per_min / 60000.0);
    }
};

// Latest clock broadcast per neighbor, stamped with the local uptime at
// receipt so stale entries stay comparable when the vote fires.
class NeighborClockTable {
  public:
    void record(uint32_t neighbor, double clock_value_ms, double local_uptime_ms);
    // Entry values aged to "now": value + (now - receipt).
    std::vector<double> candidates(double local_uptime_ms) const;
    size_t size() const { return entries_.size(); }
    void clear() { entries_.clear(); }

  private:
    struct Entry {
        double value_ms;
        double receipt_uptime_ms;
    };
    std::map<uint32_t, Entry> entries_;
};

struct SyncConfig {
    double vote_period_s = 30.0;
    double epsilon_ms = 100.0;
    double phase_s = 0.0;  // per-node random offset of the first vote
};

// One three-majority vote over the given candidate multiset (neighbor values
// plus own clock). Fewer than three candidates are handled by the
// with-replacement draw. Returns the adopted clock value, always an element
// of the drawn multiset.
double three_majority_vote(const std::vector<double>& candidates, double epsilon_ms, SimRng& rng);

// Wire form of a clock broadcast: type tag 0x10 followed by the clock value
// in milliseconds as an 8-byte big-endian unsigned integer.
constexpr uint8_t kTimeBroadcastTag = 0x10;
constexpr size_t kTimeBroadcastSize = 9;

Bytes make_time_broadcast(double clock_value_ms);
std::optional<double> parse_time_broadcast(BytesView data);

// Largest fraction of clocks that fit in one epsilon-wide window.
double share_within_epsilon(std::vector<double> clocks, double epsilon_ms);

}  // namespace epochmesh::timesync
