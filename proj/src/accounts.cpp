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

#include "bftswap/accounts.hpp"

namespace bftswap {

AccountState init_account(std::optional<PublicKey> owner, Amount initial_balance) {
    AccountState state;
    state.owner = owner;
    state.balance = initial_balance;
    return state;
}

Result<Request> validate_operation(const AccountState& state, const AccountId& id, SequenceNumber n,
                                   const Operation& op) {
    const AccountId derived = id.child(state.next_sequence);
    Status check = std::visit(
        [&](const auto& o) -> Status {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, OpenAccount>) {
                if (o.id != derived) return Error::BadDerivedId;
            } else if constexpr (std::is_same_v<T, Transfer>) {
                if (o.amount <= 0) return Error::BadValue;
                if (o.amount > state.balance) return Error::InsufficientFunds;
                if (!o.recipient.valid()) return Error::BadValue;
            } else if constexpr (std::is_same_v<T, StartConsensusInstance>) {
                if (o.swid != derived) return Error::BadDerivedId;
                if (o.id1 == o.id2) return Error::SameAccountSwap;
                if (!o.id1.valid() || !o.id2.valid()) return Error::BadValue;
            } else if constexpr (std::is_same_v<T, Spend>) {
                // Deactivation must not destroy money.
                if (state.balance != 0) return Error::BadValue;
            } else if constexpr (std::is_same_v<T, LockInto>) {
                if (o.role != 1 && o.role != 2) return Error::BadRole;
            } else if constexpr (std::is_same_v<T, OpenAuction>) {
                if (o.auction_id != derived) return Error::BadDerivedId;
                if (!o.payout.valid() || o.payout == id) return Error::BadValue;
            }
            return {};
        },
        op);
    if (!check) return check.error();
    return Request{is_locking(op) ? RequestKind::Lock : RequestKind::Execute, id, n, op};
}

Status check_request_gate(const AccountState& state, const AuthenticatedRequest& auth) {
    const Request& r = auth.value;
    if (!state.active()) return Error::InactiveAccount;
    if (*state.owner != auth.key || !auth.verify()) return Error::BadAuth;
    if (r.kind != (is_locking(r.operation) ? RequestKind::Lock : RequestKind::Execute)) return Error::BadValue;
    if (r.sequence != state.next_sequence) return Error::SequenceMismatch;
    return {};
}

Amount debit_of(const Operation& op) {
    if (const auto* t = std::get_if<Transfer>(&op)) return t->amount;
    return 0;
}

}  // namespace bftswap
