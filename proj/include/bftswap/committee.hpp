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
 * @file committee.hpp
 *
 * Committee membership, votes and quorum certificates.
 *
 * A vote is an authority's Ed25519 signature over the payload digest of a
 * value: SHA-256 of (sign-kind byte || canonical encoding). The sign-kind
 * byte separates value types that could otherwise share an encoding, and
 * client authentications use the kind with the high bit set so a client
 * signature can never be replayed as an authority vote.
 *
 * A certificate is a value together with votes from at least 2f+1 distinct
 * members of a committee of n = 3f+1.
 */
#pragma once

#include "bftswap/codec.hpp"
#include "bftswap/crypto.hpp"
#include "bftswap/result.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace bftswap {

using AuthorityIndex = std::uint32_t;

enum class SignKind : std::uint8_t {
    Request = 1,
    PreCommit = 2,
    Commit = 3,
    Proposal = 4,
    AssetBinding = 5,
    AssetRequest = 6,
    BidSubmission = 7,
    EndOfBidding = 8,
    EndOfAuction = 9,
    Test = 0x7f,
};

template <typename T>
concept Signable = Record<T> && requires {
    { T::kSignKind } -> std::convertible_to<SignKind>;
};

template <Signable T>
Digest payload_digest(const T& value) {
    Encoder e;
    e.u8(static_cast<std::uint8_t>(T::kSignKind));
    encode(e, value);
    return sha256(e.data());
}

// Digest signed by a client authenticating `value` with its own key.
template <Signable T>
Digest client_payload_digest(const T& value) {
    Encoder e;
    e.u8(static_cast<std::uint8_t>(T::kSignKind) | 0x80);
    encode(e, value);
    return sha256(e.data());
}

class Committee {
public:
    Committee() = default;
    // Throws ConfigError unless n = 3f+1 with f >= 1 and keys are distinct.
    explicit Committee(std::vector<PublicKey> authorities);

    std::size_t size() const { return authorities_.size(); }
    std::size_t max_faults() const { return (authorities_.size() - 1) / 3; }
    std::size_t quorum() const { return 2 * max_faults() + 1; }
    // Any set this large contains at least one honest member.
    std::size_t validity_threshold() const { return max_faults() + 1; }

    const PublicKey& key(AuthorityIndex i) const { return authorities_.at(i); }
    const std::vector<PublicKey>& keys() const { return authorities_; }
    std::optional<AuthorityIndex> index_of(const PublicKey& key) const;

    bool operator==(const Committee&) const = default;

private:
    std::vector<PublicKey> authorities_;
};

struct Vote {
    AuthorityIndex signer = 0;
    Digest payload{};
    Signature signature{};

    BFTSWAP_FIELDS(signer, payload, signature)
    bool operator==(const Vote&) const = default;
};

Vote sign_payload(const KeyPair& key, AuthorityIndex signer, const Digest& payload);

template <Signable T>
Vote make_vote(const KeyPair& key, AuthorityIndex signer, const T& value) {
    return sign_payload(key, signer, payload_digest(value));
}

// True iff the vote is by a committee member over `payload` and verifies.
bool check_vote(const Committee& committee, const Vote& vote, const Digest& payload);

template <Signable T>
struct Certificate {
    T value{};
    std::vector<Vote> votes;

    BFTSWAP_FIELDS(value, votes)
    bool operator==(const Certificate&) const = default;

    Digest value_digest() const { return payload_digest(value); }
    std::set<AuthorityIndex> signers() const {
        std::set<AuthorityIndex> out;
        for (const auto& v : votes) out.insert(v.signer);
        return out;
    }
};

// Keeps only votes that verify over `payload`, one per signer, ordered by
// signer index.
std::vector<Vote> filter_valid_votes(const Committee& committee, const Digest& payload,
                                     std::span<const Vote> votes);

template <Signable T>
Result<Certificate<T>> aggregate_certificate(const Committee& committee, const T& value,
                                             std::span<const Vote> votes) {
    auto valid = filter_valid_votes(committee, payload_digest(value), votes);
    if (valid.size() < committee.quorum()) return Error::QuorumNotReached;
    return Certificate<T>{value, std::move(valid)};
}

bool check_certificate_votes(const Committee& committee, const Digest& payload,
                             std::span<const Vote> votes);

template <Signable T>
bool check_certificate(const Committee& committee, const Certificate<T>& cert) {
    return check_certificate_votes(committee, payload_digest(cert.value), cert.votes);
}

// A value signed by a client key (auth_pk[value]).
template <Signable T>
struct Authenticated {
    T value{};
    PublicKey key{};
    Signature signature{};

    BFTSWAP_FIELDS(value, key, signature)
    bool operator==(const Authenticated&) const = default;

    bool verify() const {
        auto d = client_payload_digest(value);
        return verify_signature(key, d, signature);
    }
};

template <Signable T>
Authenticated<T> authenticate(const KeyPair& key, T value) {
    auto d = client_payload_digest(value);
    auto sig = key.sign(d);
    return Authenticated<T>{std::move(value), key.public_key(), sig};
}

}  // namespace bftswap
