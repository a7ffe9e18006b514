// Copyright 2026 The bftswap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "bftswap/codec.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>

namespace bftswap {

using Digest = std::array<std::uint8_t, 32>;
using PublicKey = std::array<std::uint8_t, 32>;
using Signature = std::array<std::uint8_t, 64>;
using Seed = std::array<std::uint8_t, 32>;

// Initializes libsodium once; safe to call repeatedly.
void ensure_crypto_initialized();

Digest sha256(ByteSpan data);

// SHA-256 over the canonical encoding of `value`.
template <typename T>
Digest digest_of(const T& value) {
    return sha256(to_bytes(value));
}

std::string short_hex(const Digest& d);

// Ed25519 key pair. Signing is deterministic, which makes re-signing the
// same payload produce the identical signature (idempotent votes).
class KeyPair {
public:
    static KeyPair from_seed(const Seed& seed);
    // Deterministic test/simulation key derived from a label.
    static KeyPair derive(std::string_view label);

    const PublicKey& public_key() const { return public_key_; }
    Signature sign(ByteSpan message) const;

private:
    PublicKey public_key_{};
    std::array<std::uint8_t, 64> secret_key_{};
};

// Verifies an Ed25519 signature. Successful verifications are memoized per
// thread keyed by (key, message, signature), so the same certificate checked
// by every simulated authority costs one curve operation.
bool verify_signature(const PublicKey& key, ByteSpan message, const Signature& sig);

// Deterministic byte stream (ChaCha20 via libsodium) for key material and
// encryption randomness inside reproducible simulations.
class SeededRng {
public:
    explicit SeededRng(const Seed& seed) : seed_(seed) {}
    explicit SeededRng(std::uint64_t seed);

    void fill(std::span<std::uint8_t> out);
    Seed next_seed();
    std::uint64_t next_u64();

private:
    Seed seed_;
    std::uint64_t counter_ = 0;
};

struct DigestHash {
    std::size_t operator()(const Digest& d) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | d[static_cast<std::size_t>(i)];
        return h;
    }
};

}  // namespace bftswap
