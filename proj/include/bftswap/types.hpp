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

// Protocol value types shared by every service: identifiers, account
// operations and requests, consensus proposals, asset bindings, auction
// messages and the cross-shard effects authorities send to themselves.
#pragma once

#include "bftswap/codec.hpp"
#include "bftswap/committee.hpp"
#include "bftswap/crypto.hpp"
#include "bftswap/tpke.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bftswap {

using Amount = std::int64_t;
using SequenceNumber = std::uint64_t;
using RoundNumber = std::uint64_t;
using Time = std::uint64_t;

// Hierarchical, never-reused identifier. A child `id :: n` extends the
// parent's path with the sequence number at which it was derived.
struct AccountId {
    std::vector<std::uint64_t> path;

    BFTSWAP_FIELDS(path)
    auto operator<=>(const AccountId&) const = default;
    bool operator==(const AccountId&) const = default;

    static AccountId root(std::uint64_t tag) { return AccountId{{tag}}; }
    AccountId child(std::uint64_t n) const {
        AccountId out = *this;
        out.path.push_back(n);
        return out;
    }
    bool valid() const { return !path.empty(); }
    std::string to_string() const;
    static AccountId parse(std::string_view text);
};

// ---------------------------------------------------------------------------
// Account operations

struct OpenAccount {
    AccountId id;
    PublicKey key{};
    BFTSWAP_FIELDS(id, key)
    bool operator==(const OpenAccount&) const = default;
};

struct Transfer {
    AccountId recipient;
    Amount amount = 0;
    BFTSWAP_FIELDS(recipient, amount)
    bool operator==(const Transfer&) const = default;
};

struct ChangeKey {
    PublicKey key{};
    BFTSWAP_FIELDS(key)
    bool operator==(const ChangeKey&) const = default;
};

struct StartConsensusInstance {
    AccountId swid;
    AccountId id1;
    SequenceNumber n1 = 0;
    AccountId id2;
    SequenceNumber n2 = 0;
    BFTSWAP_FIELDS(swid, id1, n1, id2, n2)
    bool operator==(const StartConsensusInstance&) const = default;
};

// Locks the sending account into `swid` under role 1 or 2. `key` is the
// proposer key for the instance and the key handed to the other account on
// success.
struct LockInto {
    AccountId swid;
    std::uint8_t role = 1;
    PublicKey key{};
    BFTSWAP_FIELDS(swid, role, key)
    bool operator==(const LockInto&) const = default;
};

// Deactivates the account for good, committing to transmutation parameters.
struct Spend {
    Digest commitment{};
    BFTSWAP_FIELDS(commitment)
    bool operator==(const Spend&) const = default;
};

enum class PriceRule : std::uint8_t { FirstPrice = 0, SecondPrice = 1 };

// Locks the item account into a new auction `auction_id`; proceeds go to
// `payout` and `seller` authenticates the seller's later phase messages.
struct OpenAuction {
    AccountId auction_id;
    PriceRule rule = PriceRule::SecondPrice;
    AccountId payout;
    PublicKey seller{};
    BFTSWAP_FIELDS(auction_id, rule, payout, seller)
    bool operator==(const OpenAuction&) const = default;
};

using Operation = std::variant<OpenAccount, Transfer, ChangeKey, StartConsensusInstance, LockInto, Spend, OpenAuction>;

inline bool is_locking(const Operation& op) {
    return std::holds_alternative<LockInto>(op) || std::holds_alternative<OpenAuction>(op);
}

enum class RequestKind : std::uint8_t { Execute = 0, Lock = 1 };

struct Request {
    static constexpr SignKind kSignKind = SignKind::Request;

    RequestKind kind = RequestKind::Execute;
    AccountId id;
    SequenceNumber sequence = 0;
    Operation operation;

    BFTSWAP_FIELDS(kind, id, sequence, operation)
    bool operator==(const Request&) const = default;
};

using RequestCertificate = Certificate<Request>;
using AuthenticatedRequest = Authenticated<Request>;

// ---------------------------------------------------------------------------
// One-shot consensus

enum class Decision : std::uint8_t { Confirm = 0, Abort = 1 };

inline const char* to_string(Decision d) { return d == Decision::Confirm ? "Confirm" : "Abort"; }

struct Proposal {
    static constexpr SignKind kSignKind = SignKind::Proposal;

    AccountId swid;
    RoundNumber round = 0;
    Decision decision = Decision::Abort;

    BFTSWAP_FIELDS(swid, round, decision)
    bool operator==(const Proposal&) const = default;
};

struct PreCommit {
    static constexpr SignKind kSignKind = SignKind::PreCommit;
    Proposal proposal;
    BFTSWAP_FIELDS(proposal)
    bool operator==(const PreCommit&) const = default;
};

struct Commit {
    static constexpr SignKind kSignKind = SignKind::Commit;
    Proposal proposal;
    BFTSWAP_FIELDS(proposal)
    bool operator==(const Commit&) const = default;
};

using AuthenticatedProposal = Authenticated<Proposal>;
using PreCommitCertificate = Certificate<PreCommit>;
using CommitCertificate = Certificate<Commit>;

// ---------------------------------------------------------------------------
// Off-chain assets

struct AssetBinding {
    static constexpr SignKind kSignKind = SignKind::AssetBinding;
    AccountId id;
    Bytes data;
    BFTSWAP_FIELDS(id, data)
    bool operator==(const AssetBinding&) const = default;
};

using Asset = Certificate<AssetBinding>;

// Owner's request to bind `data` to its account at the current sequence.
struct AssetRequest {
    static constexpr SignKind kSignKind = SignKind::AssetRequest;
    AccountId id;
    SequenceNumber sequence = 0;
    Bytes data;
    BFTSWAP_FIELDS(id, sequence, data)
    bool operator==(const AssetRequest&) const = default;
};

// ---------------------------------------------------------------------------
// Sealed-bid auctions

struct BidSubmission {
    static constexpr SignKind kSignKind = SignKind::BidSubmission;
    AccountId auction_id;
    AccountId bidder;
    PublicKey item_key{};  // key set on the item account if this bid wins
    tpke::Ciphertext ciphertext;
    Amount deposit = 0;
    Digest deposit_certificate{};  // value digest of the escrow transfer
    BFTSWAP_FIELDS(auction_id, bidder, item_key, ciphertext, deposit, deposit_certificate)
    bool operator==(const BidSubmission&) const = default;
};

using BidCertificate = Certificate<BidSubmission>;

struct EndOfBidding {
    static constexpr SignKind kSignKind = SignKind::EndOfBidding;
    AccountId auction_id;
    std::vector<BidSubmission> bids;  // sorted by payload digest, no duplicates
    BFTSWAP_FIELDS(auction_id, bids)
    bool operator==(const EndOfBidding&) const = default;
};

using EndOfBiddingCertificate = Certificate<EndOfBidding>;

struct BidOutcome {
    Digest bid{};
    std::optional<std::uint64_t> value;  // nullopt: ciphertext did not decrypt
    BFTSWAP_FIELDS(bid, value)
    bool operator==(const BidOutcome&) const = default;
};

struct EndOfAuction {
    static constexpr SignKind kSignKind = SignKind::EndOfAuction;
    AccountId auction_id;
    Digest end_of_bidding{};
    std::vector<BidOutcome> outcomes;  // same order as EndOfBidding::bids
    BFTSWAP_FIELDS(auction_id, end_of_bidding, outcomes)
    bool operator==(const EndOfAuction&) const = default;
};

using EndOfAuctionCertificate = Certificate<EndOfAuction>;

// Certificates that can appear in account logs.
using AnyCertificate = std::variant<RequestCertificate, CommitCertificate, EndOfAuctionCertificate>;

inline Digest value_digest(const AnyCertificate& cert) {
    return std::visit([](const auto& c) { return c.value_digest(); }, cert);
}

// ---------------------------------------------------------------------------
// Cross-shard effects. Every handler is idempotent under redelivery.

struct InitAccountEffect {
    AccountId id;
    std::optional<PublicKey> key;
    RequestCertificate certificate;
    BFTSWAP_FIELDS(id, key, certificate)
    bool operator==(const InitAccountEffect&) const = default;
};

struct CreditEffect {
    AccountId target;
    Amount amount = 0;
    AccountId source;
    AnyCertificate certificate;
    std::uint32_t index = 0;  // distinguishes several credits under one certificate
    BFTSWAP_FIELDS(target, amount, source, certificate, index)
    bool operator==(const CreditEffect&) const = default;

    Digest dedup_key() const;
};

struct InitInstanceEffect {
    AccountId swid;
    AccountId id1;
    SequenceNumber n1 = 0;
    AccountId id2;
    SequenceNumber n2 = 0;
    RequestCertificate certificate;
    BFTSWAP_FIELDS(swid, id1, n1, id2, n2, certificate)
    bool operator==(const InitInstanceEffect&) const = default;
};

// Guarded by next_sequence == sequence; optionally rekeys the account.
struct UnlockEffect {
    AccountId target;
    SequenceNumber sequence = 0;
    std::optional<PublicKey> new_key;
    AnyCertificate certificate;
    BFTSWAP_FIELDS(target, sequence, new_key, certificate)
    bool operator==(const UnlockEffect&) const = default;
};

// Opens an account for a transmutation output.
struct OpenOutputEffect {
    AccountId id;
    PublicKey key{};
    Digest origin{};
    BFTSWAP_FIELDS(id, key, origin)
    bool operator==(const OpenOutputEffect&) const = default;
};

// Key under which a credit is applied at most once.
Digest credit_key(const Digest& certificate_value, std::uint32_t index, const AccountId& target);

using CrossShardEffect = std::variant<InitAccountEffect, CreditEffect, InitInstanceEffect, UnlockEffect, OpenOutputEffect>;

struct CrossShardRequest {
    AccountId target;
    CrossShardEffect effect;
    BFTSWAP_FIELDS(target, effect)
    bool operator==(const CrossShardRequest&) const = default;
};

}  // namespace bftswap
