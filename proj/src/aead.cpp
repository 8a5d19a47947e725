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

#include "epochmesh/aead.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace epochmesh::aead {

namespace {
struct CtxFree {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using Ctx = std::unique_ptr<EVP_CIPHER_CTX, CtxFree>;
}  // namespace

Bytes seal(const Key& key, const Nonce& nonce, BytesView plaintext, BytesView aad) {
    Ctx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("aead ctx alloc failed");
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
        throw std::runtime_error("aead init failed");

    int len = 0;
    if (!aad.empty() &&
        EVP_EncryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
        throw std::runtime_error("aead aad failed");

    Bytes out(plaintext.size() + kTagSize);
    if (!plaintext.empty() &&
        EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        throw std::runtime_error("aead encrypt failed");

    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
        throw std::runtime_error("aead final failed");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagSize,
                            out.data() + plaintext.size()) != 1)
        throw std::runtime_error("aead tag failed");
    return out;
}

std::optional<Bytes> open(const Key& key, const Nonce& nonce, BytesView sealed, BytesView aad) {
    if (sealed.size() < kTagSize) return std::nullopt;
    const size_t ct_len = sealed.size() - kTagSize;

    Ctx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw std::runtime_error("aead ctx alloc failed");
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(), nonce.data()) != 1)
        throw std::runtime_error("aead init failed");

    int len = 0;
    if (!aad.empty() &&
        EVP_DecryptUpdate(ctx.get(), nullptr, &len, aad.data(), static_cast<int>(aad.size())) != 1)
        return std::nullopt;

    Bytes out(ct_len);
    if (ct_len > 0 &&
        EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(), static_cast<int>(ct_len)) != 1)
        return std::nullopt;

    uint8_t tag[kTagSize];
    std::memcpy(tag, sealed.data() + ct_len, kTagSize);
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagSize, tag) != 1)
        return std::nullopt;

    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1) return std::nullopt;
    return out;
}

}  // namespace epochmesh::aead
