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

#include "bftswap/result.hpp"
#include "bftswap/types.hpp"

#include <optional>
#include <set>
#include <vector>

namespace bftswap {

// One account as seen by one authority.
struct AccountState {
    std::optional<PublicKey> owner;  // nullopt: credit-only, cannot issue requests
    SequenceNumber next_sequence = 0;
    Amount balance = 0;
    std::optional<Request> pending;
    std::vector<AnyCertificate> confirmed;
    std::vector<AnyCertificate> received;
    std::set<Digest> applied_credits;  // CreditEffect::dedup_key of every credit applied
    std::vector<UnlockEffect> deferred_unlocks;  // arrived before this authority caught up

    bool active() const { return owner.has_value(); }
};

AccountState init_account(std::optional<PublicKey> owner, Amount initial_balance = 0);

// Checks `op` for account `id` at its current state and builds the request
// the owner should have signed at sequence `n`.
Result<Request> validate_operation(const AccountState& state, const AccountId& id, SequenceNumber n,
                                   const Operation& op);

// Request-level checks shared by every authenticated request: the request
// kind matches its operation, the account is active, the key is the owner's
// and the sequence number is current.
Status check_request_gate(const AccountState& state, const AuthenticatedRequest& auth);

// Sum of all amounts moving out of the account for an Execute request.
Amount debit_of(const Operation& op);

}  // namespace bftswap
