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

/**
 * @file tpke.hpp
 *
 * Threshold public-key encryption over the ristretto255 group.
 *
 * Messages are small integers encrypted "in the exponent":
 *   c = (U, V) = (r*G, m*G + r*PK)
 * together with a Schnorr proof of knowledge of r bound to a caller-chosen
 * label (the auction id), which makes the ciphertext non-malleable and
 * gives authorities a structural well-formedness check.
 *
 * The secret x = log_G(PK) is Shamir-shared with threshold k by a trusted
 * dealer. Server i answers with mu_i = SK_i * U plus a Chaum-Pedersen proof
 * that log_G(VK_i) = log_U(mu_i). Any k verified shares interpolate x*U,
 * and m is recovered from m*G = V - x*U by baby-step/giant-step search
 * below kMessageBound.
 */
#pragma once

#include "bftswap/codec.hpp"
#include "bftswap/crypto.hpp"
#include "bftswap/result.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bftswap::tpke {

using Point = std::array<std::uint8_t, 32>;
using Scalar = std::array<std::uint8_t, 32>;

inline constexpr std::uint64_t kMessageBound = std::uint64_t{1} << 20;
inline constexpr std::uint32_t kSecurityBits = 128;

struct PublicKey {
    Point key{};
    std::uint32_t servers = 0;
    std::uint32_t threshold = 0;

    BFTSWAP_FIELDS(key, servers, threshold)
    bool operator==(const PublicKey&) const = default;
};

// VK_i = SK_i * G for every server, index i-1.
struct VerificationKey {
    std::vector<Point> shares;

    BFTSWAP_FIELDS(shares)
    bool operator==(const VerificationKey&) const = default;
};

struct KeyShare {
    std::uint32_t index = 0;  // 1-based Shamir x-coordinate
    Scalar secret{};

    BFTSWAP_FIELDS(index, secret)
};

struct System {
    PublicKey public_key;
    VerificationKey verification_key;
    std::vector<KeyShare> key_shares;
};

struct Ciphertext {
    Bytes label;
    Point u{};
    Point v{};
    Scalar challenge{};
    Scalar response{};

    BFTSWAP_FIELDS(label, u, v, challenge, response)
    bool operator==(const Ciphertext&) const = default;
};

struct ShareProof {
    Point value{};  // SK_i * U
    Scalar challenge{};
    Scalar response{};

    BFTSWAP_FIELDS(value, challenge, response)
    bool operator==(const ShareProof&) const = default;
};

// (i, mu_hat) or (i, bottom) when the ciphertext was malformed.
struct DecryptionShare {
    std::uint32_t index = 0;
    std::optional<ShareProof> share;

    BFTSWAP_FIELDS(index, share)
    bool operator==(const DecryptionShare&) const = default;
};

Result<System> setup(std::uint32_t servers, std::uint32_t threshold, SeededRng& rng,
                     std::uint32_t security_bits = kSecurityBits);

Result<Ciphertext> encrypt(const PublicKey& pk, std::uint64_t message, ByteSpan label, SeededRng& rng);

// Point encodings valid and the proof of knowledge verifies under c.label.
bool is_well_formed(const Ciphertext& c);

DecryptionShare share_decrypt(const PublicKey& pk, const KeyShare& key, const Ciphertext& c);

bool share_verify(const PublicKey& pk, const VerificationKey& vk, const Ciphertext& c,
                  const DecryptionShare& share);

// Filters out invalid and duplicate shares; nullopt if fewer than k remain
// or the plaintext is outside [0, kMessageBound).
std::optional<std::uint64_t> combine(const PublicKey& pk, const VerificationKey& vk, const Ciphertext& c,
                                     std::span<const DecryptionShare> shares);

}  // namespace bftswap::tpke
