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
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "epochmesh/sim.hpp"

namespace epochmesh::sim {

namespace {

[[noreturn]] void fail_line(size_t line_no, const std::string& why) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + why);
}

std::vector<std::string> split_csv(const std::string& line) {
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

bool parse_double(const std::string& s, double& out) {
    try {
        size_t used = 0;
        out = std::stod(s, &used);
        while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
        return used == s.size();
    } catch (...) {
        return false;
    }
}

bool is_header(const std::vector<std::string>& f) {
    double dummy;
    for (const auto& s : f)
        if (!parse_double(s, dummy)) return true;
    return false;
}

}  // namespace

TraceData parse_trace_text(const std::string& text) {
    TraceData data;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    std::vector<TraceSample> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv(line);
        if (line_no == 1 && is_header(f)) continue;
        if (f.size() != 4) fail_line(line_no, "expected 4 columns (node_id,time_s,x_m,y_m)");
        double node, t, x, y;
        if (!parse_double(f[0], node) || node < 0 || node != std::floor(node))
            fail_line(line_no, "bad node id '" + f[0] + "'");
        if (!parse_double(f[1], t)) fail_line(line_no, "bad time '" + f[1] + "'");
        if (!parse_double(f[2], x)) fail_line(line_no, "bad x '" + f[2] + "'");
        if (!parse_double(f[3], y)) fail_line(line_no, "bad y '" + f[3] + "'");
        rows.push_back({static_cast<uint32_t>(node), t, x, y});
    }
    uint32_t max_node = 0;
    for (const auto& r : rows) max_node = std::max(max_node, r.node);
    if (!rows.empty()) data.per_node.resize(max_node + 1);
    for (const auto& r : rows) data.per_node[r.node].push_back(r);
    for (auto& v : data.per_node)
        std::sort(v.begin(), v.end(),
                  [](const TraceSample& a, const TraceSample& b) { return a.t_s < b.t_s; });
    return data;
}

TraceData load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw std::invalid_argument("cannot open trace file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_trace_text(ss.str());
}

std::string trace_convert_text(const std::string& text, const std::string& schema,
                               double time_scale, double pos_scale) {
    int col_node, col_t, col_x, col_y;
    if (schema == "ntxy") {
        col_node = 0, col_t = 1, col_x = 2, col_y = 3;
    } else if (schema == "tnxy") {
        col_t = 0, col_node = 1, col_x = 2, col_y = 3;
    } else {
        throw std::invalid_argument("unknown trace schema '" + schema + "' (ntxy, tnxy)");
    }

    std::istringstream in(text);
    std::ostringstream out;
    out << "node_id,time_s,x_m,y_m\n";
    std::string line;
    size_t line_no = 0;
    char buf[128];
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv(line);
        if (line_no == 1 && is_header(f)) continue;
        if (f.size() != 4) fail_line(line_no, "expected 4 columns");
        double node, t, x, y;
        if (!parse_double(f[col_node], node) || node < 0 || node != std::floor(node))
            fail_line(line_no, "bad node id '" + f[col_node] + "'");
        if (!parse_double(f[col_t], t)) fail_line(line_no, "bad time '" + f[col_t] + "'");
        if (!parse_double(f[col_x], x)) fail_line(line_no, "bad x '" + f[col_x] + "'");
        if (!parse_double(f[col_y], y)) fail_line(line_no, "bad y '" + f[col_y] + "'");
        std::snprintf(buf, sizeof(buf), "%u,%.3f,%.3f,%.3f\n", static_cast<unsigned>(node),
                      t * time_scale, x * pos_scale, y * pos_scale);
        out << buf;
    }
    return out.str();
}

}  // namespace epochmesh::sim
