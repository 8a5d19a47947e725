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

namespace epochmesh::bench {

struct Cell {
    std::string operation;  // keygen, public_ratchet, private_ratchet, encrypt, decrypt
    size_t size_bytes;      // 0 where not applicable
    uint32_t iterations;
    double mean_ns;
    double stddev_ns;
};

struct Report {
    std::vector<Cell> cells;
    const Cell* find(const std::string& op, size_t size = 0) const;
    std::string to_csv() const;
};

// Times the five ratchet operations at the given tree depth. Encrypt and
// decrypt run once per message size; warmup plus a 10% trimmed mean keep
// scheduler noise out of the figures.
Report run(uint32_t depth, const std::vector<size_t>& message_sizes, uint32_t iterations);

}  // namespace epochmesh::bench
