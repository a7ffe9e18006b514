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

#include "bftswap/committee.hpp"

#include <map>

namespace bftswap {

Committee::Committee(std::vector<PublicKey> authorities) : authorities_(std::move(authorities)) {
    const auto n = authorities_.size();
    if (n < 4 || (n - 1) % 3 != 0) {
        throw ConfigError("committee size must be 3f+1 with f >= 1, got " + std::to_string(n));
    }
    std::set<PublicKey> distinct(authorities_.begin(), authorities_.end());
    if (distinct.size() != n) {
        throw ConfigError("committee keys must be pairwise distinct");
    }
}

std::optional<AuthorityIndex> Committee::index_of(const PublicKey& key) const {
    for (std::size_t i = 0; i < authorities_.size(); ++i) {
        if (authorities_[i] == key) return static_cast<AuthorityIndex>(i);
    }
    return std::nullopt;
}

Vote sign_payload(const KeyPair& key, AuthorityIndex signer, const Digest& payload) {
    return Vote{signer, payload, key.sign(payload)};
}

bool check_vote(const Committee& committee, const Vote& vote, const Digest& payload) {
    if (vote.signer >= committee.size()) return false;
    if (vote.payload != payload) return false;
    return verify_signature(committee.key(vote.signer), vote.payload, vote.signature);
}

std::vector<Vote> filter_valid_votes(const Committee& committee, const Digest& payload,
                                     std::span<const Vote> votes) {
    std::map<AuthorityIndex, Vote> by_signer;
    for (const auto& v : votes) {
        if (by_signer.contains(v.signer)) continue;
        if (!check_vote(committee, v, payload)) continue;
        by_signer.emplace(v.signer, v);
    }
    std::vector<Vote> out;
    out.reserve(by_signer.size());
    for (auto& [_, v] : by_signer) out.push_back(v);
    return out;
}

bool check_certificate_votes(const Committee& committee, const Digest& payload,
                             std::span<const Vote> votes) {
    std::set<AuthorityIndex> seen;
    for (const auto& v : votes) {
        if (!seen.insert(v.signer).second) return false;
        if (!check_vote(committee, v, payload)) return false;
    }
    return seen.size() >= committee.quorum();
}

std::string_view to_string(Error error) {
    switch (error) {
        case Error::QuorumNotReached: return "QuorumNotReached";
        case Error::BadSignature: return "BadSignature";
        case Error::BadCertificate: return "BadCertificate";
        case Error::AlreadyExists: return "AlreadyExists";
        case Error::InsufficientFunds: return "InsufficientFunds";
        case Error::BadDerivedId: return "BadDerivedId";
        case Error::SameAccountSwap: return "SameAccountSwap";
        case Error::BadValue: return "BadValue";
        case Error::InactiveAccount: return "InactiveAccount";
        case Error::BadAuth: return "BadAuth";
        case Error::SequenceMismatch: return "SequenceMismatch";
        case Error::AccountBusy: return "AccountBusy";
        case Error::LockNotAllowed: return "LockNotAllowed";
        case Error::UnknownAccount: return "UnknownAccount";
        case Error::BadRole: return "BadRole";
        case Error::UnknownInstance: return "UnknownInstance";
        case Error::BadLockCert: return "BadLockCert";
        case Error::NotALockedOwner: return "NotALockedOwner";
        case Error::InvalidConfirm: return "InvalidConfirm";
        case Error::RoundUnavailable: return "RoundUnavailable";
        case Error::Unsafe: return "Unsafe";
        case Error::NotRoundLeader: return "NotRoundLeader";
        case Error::MissingLockCertificate: return "MissingLockCertificate";
        case Error::Stalled: return "Stalled";
        case Error::ConflictObserved: return "ConflictObserved";
        case Error::UndefinedExecution: return "UndefinedExecution";
        case Error::CommitmentMismatch: return "CommitmentMismatch";
        case Error::InputInactive: return "InputInactive";
        case Error::UnknownExecutionFunction: return "UnknownExecutionFunction";
        case Error::BadAsset: return "BadAsset";
        case Error::UnsafeRemote: return "UnsafeRemote";
        case Error::InvalidLocalResult: return "InvalidLocalResult";
        case Error::RateExceeded: return "RateExceeded";
        case Error::BadThreshold: return "BadThreshold";
        case Error::MessageOutOfRange: return "MessageOutOfRange";
        case Error::WrongPhase: return "WrongPhase";
        case Error::BadEvidence: return "BadEvidence";
        case Error::NotSeller: return "NotSeller";
        case Error::BadBidCert: return "BadBidCert";
        case Error::DecryptionMismatch: return "DecryptionMismatch";
        case Error::UnknownAuction: return "UnknownAuction";
        case Error::ConfigError: return "ConfigError";
        case Error::BudgetExceeded: return "BudgetExceeded";
        case Error::BoundsTooLarge: return "BoundsTooLarge";
    }
    return "Unknown";
}

}  // namespace bftswap
