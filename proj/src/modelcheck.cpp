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

#include "bftswap/modelcheck.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace bftswap {

namespace {

constexpr std::size_t kHonest = 3;
// With the Byzantine vote, two honest votes make a quorum of three.
constexpr int kHonestVotesForCertificate = 2;

// One honest authority in 24 bits: proposed slot (4), locked slot (4),
// pre-commit votes (8), commit votes (8). Slot 0 is empty, slot k+1 is
// proposal k = 2 * round + decision.
using Word = std::uint32_t;
using State = std::array<Word, kHonest>;

Word proposed_of(Word w) { return w & 0xF; }
Word locked_of(Word w) { return (w >> 4) & 0xF; }
Word pre_votes(Word w) { return (w >> 8) & 0xFF; }
Word commit_votes(Word w) { return (w >> 16) & 0xFF; }
Word with_proposed(Word w, Word slot) { return (w & ~Word{0xF}) | slot | (Word{1} << (8 + slot - 1)); }
Word with_locked(Word w, Word slot) { return (w & ~Word{0xF0}) | (slot << 4) | (Word{1} << (16 + slot - 1)); }

struct StateHash {
    std::size_t operator()(const State& s) const {
        std::uint64_t h = 0x9e37'79b9'7f4a'7c15ULL;
        for (Word w : s) h = (h ^ w) * 0x100'0000'01b3ULL;
        return static_cast<std::size_t>(h ^ (h >> 29));
    }
};

State canonical(State s) {
    std::sort(s.begin(), s.end());
    return s;
}

bool has_certificate(const State& s, std::size_t k, bool commit) {
    int votes = 0;
    for (Word w : s) votes += ((commit ? commit_votes(w) : pre_votes(w)) >> k) & 1;
    return votes >= kHonestVotesForCertificate;
}

bool violated(const State& s, std::size_t pairs) {
    bool confirm = false;
    bool abort = false;
    for (std::size_t k = 0; k < pairs; ++k) {
        if (!has_certificate(s, k, true)) continue;
        (k % 2 == 0 ? confirm : abort) = true;
    }
    return confirm && abort;
}

struct Edge {
    State parent;
    ModelStep::Kind kind;
    Word before;  // the acting authority's word in the parent
    std::size_t pair;
};

}  // namespace

std::string ModelStep::to_string() const {
    std::ostringstream out;
    out << (kind == Kind::Propose ? "propose" : "pre-commit") << " (round " << round << ", "
        << bftswap::to_string(decision) << ") to authority " << authority;
    return out.str();
}

std::string ModelCheckResult::to_text() const {
    std::ostringstream out;
    out << "states: " << states << "\ntransitions: " << transitions << "\n";
    out << (violation ? "VIOLATION: commit certificates for both decisions" : "no violation") << "\n";
    for (std::size_t i = 0; i < counterexample.size(); ++i) {
        out << "  " << (i + 1) << ". " << counterexample[i].to_string() << "\n";
    }
    return out.str();
}

Result<ModelCheckResult> model_check(const ModelCheckOptions& options) {
    if (options.max_round > kModelCheckMaxRound) return Error::BoundsTooLarge;
    const std::size_t pairs = 2 * (options.max_round + 1);
    const std::size_t slots = pairs + 1;

    // Safety predicates tabulated once per (proposed, locked, candidate).
    std::vector<Proposal> proposals;
    for (std::size_t k = 0; k < pairs; ++k) {
        proposals.push_back(Proposal{AccountId::root(1), k / 2, k % 2 == 0 ? Decision::Confirm : Decision::Abort});
    }
    auto slot_value = [&](Word slot) -> std::optional<Proposal> {
        if (slot == 0) return std::nullopt;
        return proposals[slot - 1];
    };
    std::vector<std::uint8_t> safe_propose(slots * slots * pairs);
    std::vector<std::uint8_t> safe_lock(slots * slots * pairs);
    for (Word p = 0; p < slots; ++p) {
        for (Word l = 0; l < slots; ++l) {
            for (std::size_t k = 0; k < pairs; ++k) {
                const std::size_t at = (p * slots + l) * pairs + k;
                safe_propose[at] = is_safe_proposal(slot_value(p), slot_value(l), proposals[k], options.rules);
                safe_lock[at] = is_safe_pre_commit(slot_value(p), slot_value(l), proposals[k], options.rules);
            }
        }
    }

    ModelCheckResult result;
    std::unordered_map<State, std::optional<Edge>, StateHash> seen;
    std::deque<State> frontier;
    const State initial{};
    seen.emplace(initial, std::nullopt);
    frontier.push_back(initial);

    std::optional<State> bad;
    while (!frontier.empty() && !bad) {
        const State s = frontier.front();
        frontier.pop_front();
        for (std::size_t h = 0; h < kHonest && !bad; ++h) {
            if (h > 0 && s[h] == s[h - 1]) continue;  // same successors as its twin
            const Word w = s[h];
            for (std::size_t k = 0; k < pairs && !bad; ++k) {
                const Word slot = static_cast<Word>(k + 1);
                const std::size_t at = (proposed_of(w) * slots + locked_of(w)) * pairs + k;
                for (auto kind : {ModelStep::Kind::Propose, ModelStep::Kind::PreCommit}) {
                    Word next = w;
                    if (kind == ModelStep::Kind::Propose) {
                        if (proposed_of(w) == slot || !safe_propose[at]) continue;
                        next = with_proposed(w, slot);
                    } else {
                        if (!has_certificate(s, k, false)) continue;
                        if (locked_of(w) == slot || !safe_lock[at]) continue;
                        next = with_locked(w, slot);
                    }
                    ++result.transitions;
                    State t = s;
                    t[h] = next;
                    t = canonical(t);
                    if (!seen.emplace(t, Edge{s, kind, w, k}).second) continue;
                    if (seen.size() > options.max_states) return Error::BudgetExceeded;
                    if (violated(t, pairs)) {
                        bad = t;
                        break;
                    }
                    frontier.push_back(t);
                }
            }
        }
    }
    result.states = seen.size();
    if (!bad) return result;

    result.violation = true;
    std::vector<Edge> path;
    for (State cur = *bad; seen.at(cur);) {
        path.push_back(*seen.at(cur));
        cur = path.back().parent;
    }
    std::reverse(path.begin(), path.end());
    // Replay on concrete authority indices.
    State concrete{};
    for (const Edge& e : path) {
        AuthorityIndex who = 0;
        while (concrete[who] != e.before) ++who;
        concrete[who] = e.kind == ModelStep::Kind::Propose ? with_proposed(e.before, static_cast<Word>(e.pair + 1))
                                                           : with_locked(e.before, static_cast<Word>(e.pair + 1));
        result.counterexample.push_back(ModelStep{e.kind, who, e.pair / 2,
                                                  e.pair % 2 == 0 ? Decision::Confirm : Decision::Abort});
    }
    return result;
}

}  // namespace bftswap
