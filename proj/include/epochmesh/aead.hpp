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

#include <array>
#include <optional>

#include "epochmesh/bytes.hpp"

namespace epochmesh::aead {

// AES-256-GCM. Seal appends the 16-byte tag to the ciphertext; open fails
// cleanly on any mismatch of key, nonce, aad, ciphertext or tag.

constexpr size_t kKeySize = 32;
constexpr size_t kNonceSize = 12;
constexpr size_t kTagSize = 16;

using Key = std::array<uint8_t, kKeySize>;
using Nonce = std::array<uint8_t, kNonceSize>;

Bytes seal(const Key& key, const Nonce& nonce, BytesView plaintext, BytesView aad);
std::optional<Bytes> open(const Key& key, const Nonce& nonce, BytesView sealed, BytesView aad);

}  // namespace epochmesh::aead
