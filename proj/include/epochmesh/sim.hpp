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

#include <string>
#include <vector>

#include "epochmesh/bytes.hpp"

// Deterministic discrete-event simulation of the whole protocol: movement,
// radio broadcast with per-sender serialization and a bandwidth cap, the
// three-majority time synchronization, smart-broadcast flooding and the epoch
// ratchet (real pairing crypto or a size-faithful stand-in). One run is one
// single-threaded event loop; identical config and seed give identical
// outputs byte for byte.

namespace epochmesh::sim {

enum class MovementModel { Static, Converging, Trace };
enum class CryptoMode { Mock, Real };

struct SimConfig {
    // population
    uint32_t users = 625;
    uint32_t attackers = 0;

    // radio
    double density = 1.0;  // users per square meter; defines the area
    double radius_m = 10.0;
    double bandwidth_bps = 1.4e6;

    // epochs
    double epoch_s = 60.0;
    bool smooth_rollover = true;
    uint32_t tree_depth = 0;       // 0 = sized automatically from the run
    double genesis_margin_s = 600.0;  // clocks start this far after genesis

    // time synchronization
    double vote_period_s = 30.0;
    double epsilon_ms = 100.0;
    double clock_offset_s = 300.0;  // initial offsets uniform in +- this
    double drift_ms_per_min = 1.0;  // per-node drift uniform in +- this

    // traffic
    double message_interval_s = 30.0;  // 0 turns chat traffic off
    uint32_t message_size = 512;

    // movement
    MovementModel movement = MovementModel::Static;
    uint32_t groups = 5;
    double speed_mps = 1.4;
    double dwell_s = 3600.0;
    double spawn_distance_m = 0.0;  // 0 = automatic
    std::string trace_file;

    // run control
    double duration_s = 5.0 * 3600.0;
    double stabilization_s = 300.0;
    uint32_t runs = 16;
    uint64_t seed = 1;
    double sample_period_s = 10.0;
    CryptoMode crypto = CryptoMode::Mock;

    // dissemination cadence
    double heartbeat_s = 5.0;
    double announce_coalesce_s = 1.0;

    void validate() const;  // throws std::invalid_argument
    uint32_t effective_depth() const;
};

SimConfig parse_config_text(const std::string& text);  // throws with line numbers
SimConfig load_config(const std::string& path);

// ---- movement & geometry ----

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct TraceSample {
    uint32_t node;
    double t_s;
    double x_m;
    double y_m;
};

struct TraceData {
    std::vector<std::vector<TraceSample>> per_node;  // sorted by time
    uint32_t node_count() const { return static_cast<uint32_t>(per_node.size()); }
};

TraceData load_trace(const std::string& path);          // throws with line numbers
TraceData parse_trace_text(const std::string& text);

double area_side_m(const SimConfig& cfg);
// Node positions at simulated time t. For the trace model, present[i] is
// false outside a node's recorded span and the node drops out of the graph.
std::vector<Vec2> positions_at(const SimConfig& cfg, const TraceData* trace, double t_s,
                               std::vector<bool>* present = nullptr);
// Undirected neighbor lists: edge iff Euclidean distance <= radius.
std::vector<std::vector<uint32_t>> connectivity(const std::vector<Vec2>& pos, double radius_m,
                                                const std::vector<bool>* present = nullptr);
// Airtime of one datagram at the configured link rate.
double transmission_delay_s(size_t bytes, double bandwidth_bps);

// ---- results ----

struct TimelineSample {
    double t_s;
    double sync_share;
    double arrived_share;
    double successful_share;
};

struct RunSummary {
    uint64_t seed = 0;
    double time_to_sync_s = -1.0;  // -1 = not reached
    double success_ratio = -1.0;   // -1 = no counted messages
    double arrived_ratio = -1.0;
    uint64_t sent_counted = 0;
    uint64_t malformed = 0;
};

struct RunResult {
    RunSummary summary;
    std::vector<TimelineSample> timeline;
};

// First sampled instant at which the modal-epoch share reaches the
// threshold; -1 when never.
double time_to_sync(const std::vector<TimelineSample>& timeline, double threshold = 0.9);

RunResult run_single(const SimConfig& cfg, uint64_t seed, const TraceData* trace);
// All runs of the campaign (seeds seed..seed+runs-1); jobs > 1 fans runs out
// over worker threads with no effect on the results.
std::vector<RunResult> run_campaign(const SimConfig& cfg, uint32_t jobs);

// Writes runs.csv plus one timeline_<seed>.csv per run.
void write_outputs(const std::vector<RunResult>& results, const std::string& out_dir);

// ---- runs.csv analysis ----

struct ColumnStats {
    std::string name;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    size_t count = 0;  // valid (non-negative) samples
};

std::vector<ColumnStats> analyze_runs_csv(const std::string& text);  // throws on bad input
std::string stats_to_csv(const std::vector<ColumnStats>& stats);

// ---- trace conversion ----

// Converts raw motion CSV into canonical "node_id,time_s,x_m,y_m". schema
// names the input column order: "ntxy" (canonical) or "tnxy". Scales apply
// to time and position columns. Throws with a line number on malformed rows.
std::string trace_convert_text(const std::string& text, const std::string& schema,
                               double time_scale, double pos_scale);

}  // namespace epochmesh::sim
