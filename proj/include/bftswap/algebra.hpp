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
 * @file algebra.hpp
 *
 * Generalized account states.
 *
 * An algebra is (S, U, is_valid, is_safe, .) with
 *
 *   1. s . u1 . u2 == s . u2 . u1            (updates commute)
 *   2. is_valid(s) && is_safe(u) => is_valid(s . u)
 *
 * An owner may issue Apply(id', u-, u+) when is_safe(u+) and
 * is_valid(state . u-): u- is applied locally and u+ travels to id' like a
 * credit. Because remote updates commute and are safe, a replica that
 * receives them in any order, any time, stays valid and converges.
 */
#pragma once

#include "bftswap/codec.hpp"
#include "bftswap/crypto.hpp"
#include "bftswap/result.hpp"
#include "bftswap/types.hpp"

#include <concepts>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <variant>

namespace bftswap::algebra {

template <typename A>
concept StateAlgebra = requires(const typename A::State& s, const typename A::Update& u) {
    { A::apply(s, u) } -> std::same_as<typename A::State>;
    { A::is_valid(s) } -> std::same_as<bool>;
    { A::is_safe(u) } -> std::same_as<bool>;
};

// Fungible balance: integers, valid when non-negative, credits are safe.
struct Balance {
    using State = std::int64_t;
    using Update = std::int64_t;
    static State apply(State s, Update u) { return s + u; }
    static bool is_valid(State s) { return s >= 0; }
    static bool is_safe(Update u) { return u >= 0; }
};

// A single non-fungible token: 1 owned, 0 not owned. Receiving (+1) is safe,
// giving away (-1) must be checked against the local state.
struct Nft {
    using State = std::int64_t;
    using Update = std::int64_t;  // +1 or -1
    static State apply(State s, Update u) { return s + u; }
    static bool is_valid(State s) { return s >= 0; }
    static bool is_safe(Update u) { return u == 1; }
};

template <StateAlgebra L, StateAlgebra R>
struct Product {
    using State = std::pair<typename L::State, typename R::State>;

    struct Left {
        typename L::Update u{};
        BFTSWAP_FIELDS(u)
        bool operator==(const Left&) const = default;
    };
    struct Right {
        typename R::Update u{};
        BFTSWAP_FIELDS(u)
        bool operator==(const Right&) const = default;
    };
    using Update = std::variant<Left, Right>;

    static State apply(const State& s, const Update& u) {
        State out = s;
        if (const auto* l = std::get_if<Left>(&u)) {
            out.first = L::apply(s.first, l->u);
        } else {
            out.second = R::apply(s.second, std::get<Right>(u).u);
        }
        return out;
    }
    static bool is_valid(const State& s) { return L::is_valid(s.first) && R::is_valid(s.second); }
    static bool is_safe(const Update& u) {
        if (const auto* l = std::get_if<Left>(&u)) return L::is_safe(l->u);
        return R::is_safe(std::get<Right>(u).u);
    }
};

// Counted objects arranged in a tree (parent(x) = x / 2, roots are 0 and
// 1) plus a coin balance. Owning a non-root object requires owning its
// parent and at least three coins. Safe updates only add coins or roots.
struct Multiset {
    struct State {
        std::int64_t coins = 0;
        std::map<std::uint32_t, std::int64_t> objects;
        BFTSWAP_FIELDS(coins, objects)
        bool operator==(const State&) const = default;
    };
    struct Update {
        std::int64_t coins = 0;
        std::map<std::uint32_t, std::int64_t> objects;
        BFTSWAP_FIELDS(coins, objects)
        bool operator==(const Update&) const = default;
    };

    static constexpr std::int64_t kCoinsPerObject = 3;

    static bool is_root(std::uint32_t x) { return x < 2; }
    static std::uint32_t parent(std::uint32_t x) { return x / 2; }
    static std::int64_t count(const State& s, std::uint32_t x) {
        auto it = s.objects.find(x);
        return it == s.objects.end() ? 0 : it->second;
    }

    static State apply(const State& s, const Update& u) {
        State out = s;
        out.coins += u.coins;
        for (const auto& [x, d] : u.objects) {
            auto& c = out.objects[x];
            c += d;
            if (c == 0) out.objects.erase(x);
        }
        return out;
    }
    static bool is_valid(const State& s) {
        if (s.coins < 0) return false;
        for (const auto& [x, c] : s.objects) {
            if (c < 0) return false;
            if (c == 0 || is_root(x)) continue;
            if (count(s, parent(x)) <= 0 || s.coins < kCoinsPerObject) return false;
        }
        return true;
    }
    static bool is_safe(const Update& u) {
        if (u.coins < 0) return false;
        for (const auto& [x, d] : u.objects) {
            if (d < 0 || (d > 0 && !is_root(x))) return false;
        }
        return true;
    }
};

// Apply(id', u-, u+).
template <StateAlgebra A>
struct ApplyOperation {
    AccountId target;
    typename A::Update minus{};
    typename A::Update plus{};
};

template <StateAlgebra A>
Status validate_apply(const typename A::State& state, const ApplyOperation<A>& op) {
    if (!A::is_safe(op.plus)) return Error::UnsafeRemote;
    if (!A::is_valid(A::apply(state, op.minus))) return Error::InvalidLocalResult;
    return {};
}

// Static exchange rates between the two sides of a two-currency product:
// an Apply whose u- is in one unit and u+ in the other is accepted when
// |u+| * den <= |u-| * num for that direction.
struct RateTable {
    struct Rate {
        std::int64_t num = 1;
        std::int64_t den = 1;
    };
    std::map<std::pair<int, int>, Rate> rates;  // (from unit, to unit)
};

template <typename U>
int unit_of(const U& u) {
    return static_cast<int>(u.index());
}

template <typename U>
std::int64_t magnitude_of(const U& u) {
    return std::visit([](const auto& side) { return side.u < 0 ? -side.u : side.u; }, u);
}

template <typename U>
Status check_rate(const RateTable& table, const U& minus, const U& plus) {
    const int from = unit_of(minus);
    const int to = unit_of(plus);
    if (from == to) {
        return magnitude_of(plus) <= magnitude_of(minus) ? Status{} : Status{Error::RateExceeded};
    }
    auto it = table.rates.find({from, to});
    if (it == table.rates.end()) return Error::RateExceeded;
    const auto [num, den] = it->second;
    if (magnitude_of(plus) * den > magnitude_of(minus) * num) return Error::RateExceeded;
    return {};
}

// A set of accounts over one algebra with Apply as the only operation.
// Remote updates are delivered at least once and applied exactly once.
template <StateAlgebra A>
class Ledger {
public:
    struct RemoteUpdate {
        AccountId target;
        typename A::Update update{};
        Digest origin{};  // unique per certified Apply
    };

    void open(const AccountId& id, typename A::State initial) { states_[id] = std::move(initial); }

    const typename A::State& state(const AccountId& id) const { return states_.at(id); }
    const std::map<AccountId, typename A::State>& states() const { return states_; }

    Status validate(const AccountId& source, const ApplyOperation<A>& op) const {
        auto it = states_.find(source);
        if (it == states_.end()) return Error::UnknownAccount;
        return validate_apply<A>(it->second, op);
    }

    // Executes a validated Apply at the source; the returned update must be
    // delivered to the target.
    RemoteUpdate execute(const AccountId& source, const ApplyOperation<A>& op, const Digest& origin) {
        auto& s = states_.at(source);
        s = A::apply(s, op.minus);
        return RemoteUpdate{op.target, op.plus, origin};
    }

    void deliver(const RemoteUpdate& m) {
        if (!delivered_.insert({m.origin, m.target}).second) return;
        auto [it, _] = states_.try_emplace(m.target, typename A::State{});
        it->second = A::apply(it->second, m.update);
    }

    bool all_valid() const {
        for (const auto& [_, s] : states_) {
            if (!A::is_valid(s)) return false;
        }
        return true;
    }

private:
    std::map<AccountId, typename A::State> states_;
    std::set<std::pair<Digest, AccountId>> delivered_;
};

}  // namespace bftswap::algebra
