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

// Independent oracles and generators shared by the unit tests and the
// acceptance binary. Nothing here calls into the library under test except
// for the types it generates.
#pragma once

#include "bftswap/algebra.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bftswap::oracle {

using Rng = std::mt19937_64;

inline std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// ---------------------------------------------------------------------------
// Algebra generators

template <typename A>
struct Gen;

template <>
struct Gen<algebra::Balance> {
    static std::int64_t state(Rng& rng) { return uniform(rng, -1000, 1000); }
    static std::int64_t valid_state(Rng& rng) { return uniform(rng, 0, 1000); }
    static std::int64_t update(Rng& rng) { return uniform(rng, -1000, 1000); }
    static std::int64_t safe_update(Rng& rng) { return uniform(rng, 0, 1000); }
};

template <>
struct Gen<algebra::Nft> {
    static std::int64_t state(Rng& rng) { return uniform(rng, -1, 1); }
    static std::int64_t valid_state(Rng& rng) { return uniform(rng, 0, 1); }
    static std::int64_t update(Rng& rng) { return uniform(rng, 0, 1) ? 1 : -1; }
    static std::int64_t safe_update(Rng&) { return 1; }
};

template <typename L, typename R>
struct Gen<algebra::Product<L, R>> {
    using P = algebra::Product<L, R>;
    static typename P::State state(Rng& rng) { return {Gen<L>::state(rng), Gen<R>::state(rng)}; }
    static typename P::State valid_state(Rng& rng) { return {Gen<L>::valid_state(rng), Gen<R>::valid_state(rng)}; }
    static typename P::Update update(Rng& rng) {
        if (uniform(rng, 0, 1)) return typename P::Left{Gen<L>::update(rng)};
        return typename P::Right{Gen<R>::update(rng)};
    }
    static typename P::Update safe_update(Rng& rng) {
        if (uniform(rng, 0, 1)) return typename P::Left{Gen<L>::safe_update(rng)};
        return typename P::Right{Gen<R>::safe_update(rng)};
    }
};

template <>
struct Gen<algebra::Multiset> {
    using M = algebra::Multiset;
    static constexpr std::uint32_t kObjects = 8;

    static M::State state(Rng& rng) {
        M::State s;
        s.coins = uniform(rng, -5, 20);
        for (std::uint32_t x = 0; x < kObjects; ++x) {
            const auto c = uniform(rng, -1, 2);
            if (c != 0) s.objects[x] = c;
        }
        return s;
    }
    // Built top-down so every owned object has an owned parent.
    static M::State valid_state(Rng& rng) {
        M::State s;
        s.coins = uniform(rng, 0, 20);
        for (std::uint32_t x = 0; x < kObjects; ++x) {
            const bool parent_owned = x < 2 || s.objects.contains(x / 2);
            const bool may_own = x < 2 || (parent_owned && s.coins >= 3);
            if (may_own && uniform(rng, 0, 1)) s.objects[x] = uniform(rng, 1, 2);
        }
        return s;
    }
    static M::Update update(Rng& rng) {
        M::Update u;
        u.coins = uniform(rng, -10, 10);
        for (std::uint32_t x = 0; x < kObjects; ++x) {
            const auto d = uniform(rng, -1, 1);
            if (d != 0 && uniform(rng, 0, 2) == 0) u.objects[x] = d;
        }
        return u;
    }
    static M::Update safe_update(Rng& rng) {
        M::Update u;
        u.coins = uniform(rng, 0, 10);
        for (std::uint32_t x = 0; x < 2; ++x) {
            if (uniform(rng, 0, 1)) u.objects[x] = uniform(rng, 1, 2);
        }
        return u;
    }
};

struct AxiomCounts {
    int commutes = 0;
    int preserves = 0;
    int trials = 0;
};

// Axiom 1 on arbitrary triples and axiom 2 on (valid s, safe u) pairs.
template <typename A>
AxiomCounts check_axioms(Rng& rng, int trials) {
    AxiomCounts c;
    c.trials = trials;
    for (int i = 0; i < trials; ++i) {
        const auto s = Gen<A>::state(rng);
        const auto u1 = Gen<A>::update(rng);
        const auto u2 = Gen<A>::update(rng);
        if (A::apply(A::apply(s, u1), u2) == A::apply(A::apply(s, u2), u1)) ++c.commutes;
        const auto v = Gen<A>::valid_state(rng);
        const auto w = Gen<A>::safe_update(rng);
        if (A::is_valid(v) && A::is_safe(w) && A::is_valid(A::apply(v, w))) ++c.preserves;
    }
    return c;
}

// ---------------------------------------------------------------------------
// Auction settlement

struct OracleBid {
    std::uint64_t bidder = 0;  // orders ties
    std::int64_t deposit = 0;
    std::optional<std::uint64_t> value;
};

struct OracleOutcome {
    std::optional<std::size_t> winner;
    std::int64_t price = 0;
    std::vector<std::int64_t> refunds;
};

// Sorts the eligible bids by (value desc, bidder asc, position asc); the
// head wins and pays its own value or the runner-up's (0 if alone).
inline OracleOutcome settle(const std::vector<OracleBid>& bids, bool second_price) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        const auto& b = bids[i];
        if (b.value && static_cast<std::int64_t>(*b.value) <= b.deposit) eligible.push_back(i);
    }
    std::stable_sort(eligible.begin(), eligible.end(), [&](std::size_t x, std::size_t y) {
        if (*bids[x].value != *bids[y].value) return *bids[x].value > *bids[y].value;
        return bids[x].bidder < bids[y].bidder;
    });
    OracleOutcome out;
    for (const auto& b : bids) out.refunds.push_back(b.deposit);
    if (eligible.empty()) return out;
    out.winner = eligible[0];
    if (!second_price) {
        out.price = static_cast<std::int64_t>(*bids[eligible[0]].value);
    } else if (eligible.size() > 1) {
        out.price = static_cast<std::int64_t>(*bids[eligible[1]].value);
    }
    out.refunds[eligible[0]] -= out.price;
    return out;
}

}  // namespace bftswap::oracle
