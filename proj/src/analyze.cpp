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

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "epochmesh/sim.hpp"

namespace epochmesh::sim {

namespace {
std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}
}  // namespace

std::vector<ColumnStats> analyze_runs_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw std::invalid_argument("empty runs csv");
    auto header = split(line);
    if (header.size() < 2) throw std::invalid_argument("runs csv header too short");

    std::vector<ColumnStats> stats;
    for (size_t c = 1; c < header.size(); ++c) stats.push_back({header[c], 0, 0, 0, 0});

    size_t rows = 0;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != header.size())
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": column count mismatch");
        ++rows;
        for (size_t c = 1; c < f.size(); ++c) {
            double v = 0;
            try {
                v = std::stod(f[c]);
            } catch (...) {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": bad number '" + f[c] + "'");
            }
            // negative values mark "not reached / undefined" and are skipped
            if (v < 0) continue;
            ColumnStats& s = stats[c - 1];
            if (s.count == 0) {
                s.min = s.max = v;
            } else {
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
            }
            s.mean += v;
            s.count += 1;
        }
    }
    if (rows == 0) throw std::invalid_argument("runs csv has no data rows");
    for (auto& s : stats)
        if (s.count > 0) s.mean /= static_cast<double>(s.count);
    return stats;
}

std::string stats_to_csv(const std::vector<ColumnStats>& stats) {
    std::ostringstream out;
    out << "metric,mean,min,max,count\n";
    char buf[160];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%zu\n", s.name.c_str(), s.mean, s.min,
                      s.max, s.count);
        out << buf;
    }
    return out.str();
}

}  // namespace epochmesh::sim
