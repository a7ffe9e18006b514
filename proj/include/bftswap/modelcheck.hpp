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
 * @file modelcheck.hpp
 *
 * Exhaustive check of one consensus instance with n = 4: three honest
 * authorities and one Byzantine authority that votes for everything.
 * Clients are unconstrained and may send any proposal, or any pre-commit
 * certificate that exists, to any honest authority in any order. Honest
 * authorities decide with the production safety predicates. A violation is
 * a state holding commit certificates for both decisions.
 */
#pragma once

#include "bftswap/result.hpp"
#include "bftswap/swap.hpp"

#include <optional>
#include <string>
#include <vector>

namespace bftswap {

inline constexpr RoundNumber kModelCheckMaxRound = 3;

struct ModelCheckOptions {
    RoundNumber max_round = 2;  // rounds 0..max_round
    SafetyRules rules;
    std::size_t max_states = 20'000'000;
};

struct ModelStep {
    enum class Kind : std::uint8_t { Propose, PreCommit };
    Kind kind = Kind::Propose;
    AuthorityIndex authority = 0;
    RoundNumber round = 0;
    Decision decision = Decision::Confirm;

    std::string to_string() const;
};

struct ModelCheckResult {
    std::size_t states = 0;
    std::size_t transitions = 0;
    bool violation = false;
    std::vector<ModelStep> counterexample;  // shortest, when violated

    std::string to_text() const;
};

// BoundsTooLarge above kModelCheckMaxRound; BudgetExceeded past max_states.
Result<ModelCheckResult> model_check(const ModelCheckOptions& options);

}  // namespace bftswap
