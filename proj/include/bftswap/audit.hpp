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
 * @file audit.hpp
 *
 * Invariant audits over a finished run: the trace with its message store
 * and the final per-authority snapshots. Audits only report; they never
 * fail a run.
 */
#pragma once

#include "bftswap/trace.hpp"

#include <json.hpp>

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bftswap {

struct AuditInput {
    const Trace* trace = nullptr;
    std::size_t n = 4;
    std::set<AuthorityIndex> honest;
    std::set<ActorId> faulty_clients;
    // Full snapshots, indexed by authority; null for missing ones.
    std::vector<nlohmann::ordered_json> snapshots;
    Amount initial_supply = 0;
    bool quiescent = true;
};

struct Violation {
    std::optional<std::size_t> event;  // index into the trace
    std::string message;
};

struct AuditCheck {
    std::string name;
    std::vector<Violation> violations;
    std::string note;  // why a check did not apply, if so
    bool passed() const { return violations.empty(); }
};

struct AuditReport {
    std::vector<AuditCheck> checks;

    bool passed() const;
    const AuditCheck* find(const std::string& name) const;
    nlohmann::ordered_json to_json() const;
    std::string to_text() const;
};

// Check names, in report order.
inline constexpr const char* kAuditChecks[] = {
    "agreement",         "double_sign",   "monotonicity",   "unforgeability",
    "conservation",      "eventual_consistency", "unlock_liveness", "auction_phase",
    "escrow_zero",       "non_negative_balances", "honest_client_proposals",
};

AuditReport audit_run(const AuditInput& input);

// Snapshot reduced to what honest authorities must agree on.
nlohmann::ordered_json consistency_view(const nlohmann::ordered_json& snapshot);

}  // namespace bftswap
