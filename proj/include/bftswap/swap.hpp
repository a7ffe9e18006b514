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
 * @file swap.hpp
 *
 * One-shot binary consensus instances for atomic swaps.
 *
 * An instance `swid` decides Confirm (exchange the owner keys of two locked
 * accounts) or Abort (unlock both unchanged). Round leaders are the owners
 * of the locked accounts, not authorities. Each authority votes in two
 * steps, PreCommit(P) on a proposal and Commit(P) on a pre-commit
 * certificate, and only when the request is safe:
 *
 *   (a) a proposal P != proposed must have round(P) > round(proposed)
 *   (b) with a locked pre-commit C0, round(P) > round(C0) and
 *       decision(P) == decision(C0)
 *   (c) a pre-commit certificate C must have round(C) >= round(proposed)
 *   (d) and round(C) >= round(locked)
 *
 * The rules are pure functions of (proposed, locked) so the bounded model
 * checker can share them and ablate them one at a time.
 */
#pragma once

#include "bftswap/committee.hpp"
#include "bftswap/result.hpp"
#include "bftswap/types.hpp"

#include <array>
#include <optional>
#include <vector>

namespace bftswap {

struct SwapParams {
    Time round_interval = 1000;  // one simulated second
    RoundNumber escalation_round = 8;
    bool parity_leader = false;
};

// Time after instance creation at which round k becomes available: linear
// up to the escalation round, then the gap doubles every round.
Time round_release_offset(RoundNumber k, const SwapParams& params);
bool is_round_available(RoundNumber k, Time elapsed, const SwapParams& params);

struct SafetyRules {
    bool a = true;
    bool b = true;
    bool c = true;
    bool d = true;

    static SafetyRules without(char rule);
};

bool is_safe_proposal(const std::optional<Proposal>& proposed, const std::optional<Proposal>& locked,
                      const Proposal& p, const SafetyRules& rules = {});
bool is_safe_pre_commit(const std::optional<Proposal>& proposed, const std::optional<Proposal>& locked,
                        const Proposal& c, const SafetyRules& rules = {});

struct LockInfo {
    AccountId id;
    SequenceNumber sequence = 0;
    PublicKey key{};
};

// Returns the locked account data if `cert` is a valid certificate over
// Lock(id, n, LockInto(swid, role, pk)).
std::optional<LockInfo> read_lock_certificate(const Committee& committee, const RequestCertificate& cert,
                                              const AccountId& swid, std::uint8_t role);

struct SwapInstance {
    AccountId swid;
    std::array<AccountId, 2> ids;
    std::array<SequenceNumber, 2> sequences{};
    std::array<std::optional<PublicKey>, 2> keys;
    std::optional<Proposal> proposed;
    std::optional<PreCommitCertificate> locked;
    RequestCertificate received;
    Time created_at = 0;

    BFTSWAP_FIELDS(swid, ids, sequences, keys, proposed, locked, received, created_at)

    std::optional<Proposal> locked_proposal() const {
        if (!locked) return std::nullopt;
        return locked->value.proposal;
    }
};

SwapInstance init_instance(const InitInstanceEffect& effect, Time now);

struct SwapContext {
    const Committee& committee;
    Time now = 0;
    SwapParams params;
    SafetyRules rules;
};

// Runs HandleProposal up to the vote; on success the caller signs
// PreCommit(P). Valid lock certificates are recorded even when the proposal
// is then rejected.
Status handle_proposal(SwapInstance& inst, const SwapContext& ctx, const AuthenticatedProposal& auth,
                       const std::optional<RequestCertificate>& l1, const std::optional<RequestCertificate>& l2);

// Runs HandlePreCommit up to the vote; on success the caller signs Commit(P).
Status handle_pre_commit(SwapInstance& inst, const SwapContext& ctx, const PreCommitCertificate& cert);

// Unlock effects for HandleCommit. `inst` is null when the instance was
// already deleted. The caller deletes the instance afterwards.
Result<std::vector<UnlockEffect>> commit_effects(const SwapInstance* inst, const Committee& committee,
                                                 const CommitCertificate& cert,
                                                 const std::optional<RequestCertificate>& l1,
                                                 const std::optional<RequestCertificate>& l2);

}  // namespace bftswap
