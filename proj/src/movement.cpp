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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epochmesh/sim.hpp"

namespace epochmesh::sim {

double area_side_m(const SimConfig& cfg) { return std::sqrt(cfg.users / cfg.density); }

double transmission_delay_s(size_t bytes, double bandwidth_bps) {
    return static_cast<double>(bytes) * 8.0 / bandwidth_bps;
}

namespace {

std::vector<Vec2> grid_positions(uint32_t count, double spacing, Vec2 origin) {
    uint32_t cols = static_cast<uint32_t>(std::ceil(std::sqrt(static_cast<double>(count))));
    std::vector<Vec2> out(count);
    for (uint32_t i = 0; i < count; ++i) {
        uint32_t row = i / cols, col = i % cols;
        out[i] = {origin.x + col * spacing, origin.y + row * spacing};
    }
    return out;
}

struct ConvergingPlan {
    std::vector<uint32_t> group_of;
    std::vector<Vec2> spawn_center;
    Vec2 center;
    double dwell_start, dwell_end;
    double spawn_dist;
};

ConvergingPlan converging_plan(const SimConfig& cfg) {
    ConvergingPlan plan;
    double side = area_side_m(cfg);
    plan.center = {side / 2.0, side / 2.0};
    plan.spawn_dist = cfg.spawn_distance_m > 0
                          ? cfg.spawn_distance_m
                          : std::max(0.45 * side, 3.0 * cfg.radius_m);
    double dwell = std::min(cfg.dwell_s, cfg.duration_s);
    double mid = cfg.duration_s / 2.0;
    plan.dwell_start = mid - dwell / 2.0;
    plan.dwell_end = mid + dwell / 2.0;

    uint32_t g = std::max(1u, cfg.groups);
    uint32_t per = (cfg.users + g - 1) / g;
    plan.group_of.resize(cfg.users);
    plan.spawn_center.resize(g);
    for (uint32_t i = 0; i < cfg.users; ++i) plan.group_of[i] = std::min(i / per, g - 1);
    for (uint32_t k = 0; k < g; ++k) {
        double ang = 2.0 * M_PI * k / g;
        plan.spawn_center[k] = {plan.center.x + plan.spawn_dist * std::cos(ang),
                                plan.center.y + plan.spawn_dist * std::sin(ang)};
    }
    return plan;
}

}  // namespace

std::vector<Vec2> positions_at(const SimConfig& cfg, const TraceData* trace, double t_s,
                               std::vector<bool>* present) {
    if (present) present->assign(cfg.users, true);
    double spacing = 1.0 / std::sqrt(cfg.density);

    switch (cfg.movement) {
        case MovementModel::Static:
            return grid_positions(cfg.users, spacing, {0.0, 0.0});

        case MovementModel::Converging: {
            ConvergingPlan plan = converging_plan(cfg);
            // members sit in a small grid around their group anchor
            std::vector<Vec2> out(cfg.users);
            uint32_t g = static_cast<uint32_t>(plan.spawn_center.size());
            std::vector<uint32_t> index_in_group(cfg.users);
            std::vector<uint32_t> seen(g, 0);
            for (uint32_t i = 0; i < cfg.users; ++i) index_in_group[i] = seen[plan.group_of[i]]++;

            for (uint32_t i = 0; i < cfg.users; ++i) {
                Vec2 spawn = plan.spawn_center[plan.group_of[i]];
                Vec2 dir{plan.center.x - spawn.x, plan.center.y - spawn.y};
                double dist = std::hypot(dir.x, dir.y);
                Vec2 unit = dist > 0 ? Vec2{dir.x / dist, dir.y / dist} : Vec2{0, 0};
                double travel_time = cfg.speed_mps > 0 ? dist / cfg.speed_mps : 0.0;
                double depart = std::max(0.0, plan.dwell_start - travel_time);

                double progress;
                if (t_s < depart) {
                    progress = 0.0;
                } else if (t_s < plan.dwell_end) {
                    progress = std::min(dist, cfg.speed_mps * (t_s - depart));
                } else {
                    // diverge: walk back the same way
                    double back = cfg.speed_mps * (t_s - plan.dwell_end);
                    progress = std::max(0.0, dist - back);
                }
                Vec2 anchor{spawn.x + unit.x * progress, spawn.y + unit.y * progress};
                uint32_t cols = static_cast<uint32_t>(
                    std::ceil(std::sqrt(static_cast<double>(seen[plan.group_of[i]]))));
                uint32_t row = index_in_group[i] / std::max(1u, cols);
                uint32_t col = index_in_group[i] % std::max(1u, cols);
                out[i] = {anchor.x + col * spacing, anchor.y + row * spacing};
            }
            return out;
        }

        case MovementModel::Trace: {
            if (trace == nullptr) throw std::invalid_argument("trace model requires trace data");
            std::vector<Vec2> out(cfg.users);
            for (uint32_t i = 0; i < cfg.users; ++i) {
                if (i >= trace->per_node.size() || trace->per_node[i].empty()) {
                    if (present) (*present)[i] = false;
                    continue;
                }
                const auto& samples = trace->per_node[i];
                if (t_s < samples.front().t_s || t_s > samples.back().t_s) {
                    if (present) (*present)[i] = false;
                    continue;
                }
                auto it = std::lower_bound(
                    samples.begin(), samples.end(), t_s,
                    [](const TraceSample& s, double t) { return s.t_s < t; });
                if (it == samples.begin()) {
                    out[i] = {it->x_m, it->y_m};
                } else if (it == samples.end()) {
                    out[i] = {samples.back().x_m, samples.back().y_m};
                } else {
                    const TraceSample& hi = *it;
                    const TraceSample& lo = *(it - 1);
                    double span = hi.t_s - lo.t_s;
                    double f = span > 0 ? (t_s - lo.t_s) / span : 0.0;
                    out[i] = {lo.x_m + f * (hi.x_m - lo.x_m), lo.y_m + f * (hi.y_m - lo.y_m)};
                }
            }
            return out;
        }
    }
    throw std::logic_error("unknown movement model");
}

std::vector<std::vector<uint32_t>> connectivity(const std::vector<Vec2>& pos, double radius_m,
                                                const std::vector<bool>* present) {
    const size_t n = pos.size();
    std::vector<std::vector<uint32_t>> adj(n);
    const double r2 = radius_m * radius_m;
    for (size_t i = 0; i < n; ++i) {
        if (present && !(*present)[i]) continue;
        for (size_t j = i + 1; j < n; ++j) {
            if (present && !(*present)[j]) continue;
            double dx = pos[i].x - pos[j].x;
            double dy = pos[i].y - pos[j].y;
            if (dx * dx + dy * dy <= r2) {  // boundary distance counts as connected
                adj[i].push_back(static_cast<uint32_t>(j));
                adj[j].push_back(static_cast<uint32_t>(i));
            }
        }
    }
    return adj;
}

}  // namespace epochmesh::sim
