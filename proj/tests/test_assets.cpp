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

#include "bftswap/assets.hpp"

#include "support.hpp"

#include <random>

using namespace bftswap;
using namespace bftswap::testing;

namespace {

const AccountId kAlice = AccountId::root(1);
const AccountId kBob = AccountId::root(2);
const AccountId kCarol = AccountId::root(3);

Bytes text(std::string_view s) { return Bytes(s.begin(), s.end()); }

Bytes le(std::uint64_t v, std::size_t width) {
    Bytes out;
    for (std::size_t i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    return out;
}

std::uint64_t from_le(const Bytes& b) {
    std::uint64_t v = 0;
    for (std::size_t i = b.size(); i-- > 0;) v = (v << 8) | b[i];
    return v;
}

struct AssetFixture {
    Cluster cluster{options()};
    KeyPair alice = user_key("alice");
    KeyPair bob = user_key("bob");
    KeyPair carol = user_key("carol");
    ExecutionRegistry registry = ExecutionRegistry::builtin();

    static ClusterOptions options() {
        ClusterOptions o;
        o.genesis = {{kAlice, user_key("alice").public_key(), 5}, {kBob, user_key("bob").public_key(), 0},
                     {kCarol, user_key("carol").public_key(), 0}};
        return o;
    }

    Result<Asset> bind(const KeyPair& owner, const AccountId& id, SequenceNumber n, const Bytes& data) {
        return cluster.certify(AssetRequestMsg{authenticate(owner, AssetRequest{id, n, data})}, AssetBinding{id, data});
    }

    TransmuteRequest transmute(std::string fn, Bytes params, std::vector<Asset> inputs, std::size_t outputs) {
        TransmuteRequest t{std::move(fn), std::move(params), std::move(inputs), {}};
        for (std::size_t i = 0; i < outputs; ++i) {
            t.output_owners.push_back(user_key("out/" + std::to_string(i)).public_key());
        }
        return t;
    }

    // Spends every input; `owners[i]` signs input i at sequence `seqs[i]`.
    Result<std::vector<RequestCertificate>> spend(const TransmuteRequest& t, const std::vector<KeyPair>& owners,
                                                  const std::vector<SequenceNumber>& seqs) {
        std::vector<RequestCertificate> out;
        const Digest commitment = transmute_commitment(t);
        for (std::size_t i = 0; i < t.inputs.size(); ++i) {
            Request r{RequestKind::Execute, t.inputs[i].value.id, seqs[i], Spend{commitment}};
            auto c = cluster.certify(SpendMsg{authenticate(owners[i], r), t}, r);
            if (!c) return c.error();
            cluster.broadcast(ConfirmationMsg{*c});
            out.push_back(*c);
        }
        return out;
    }

    Result<std::vector<Asset>> outputs(const TransmuteRequest& t, const std::vector<RequestCertificate>& spends) {
        auto expected = transmute_outputs(cluster.committee, registry, t, spends);
        if (!expected) return expected.error();
        auto replies = cluster.broadcast(OutputBindingMsg{t, spends});
        std::vector<Asset> out;
        for (const auto& b : *expected) {
            auto votes = cluster.votes_for(replies, b);
            auto c = aggregate_certificate(cluster.committee, b, std::span<const Vote>(votes));
            if (!c) return c.error();
            out.push_back(*c);
        }
        return out;
    }
};

}  // namespace

TEST_CASE("bind_asset") {
    AssetFixture fx;
    auto a = fx.bind(fx.alice, kAlice, 0, text("nft:42"));
    REQUIRE(a);
    CHECK(verify_asset(fx.cluster.committee, *a));
    CHECK(a->value.id == kAlice);
    // Authorities keep no asset state.
    CHECK(fx.cluster.account(0, kAlice).next_sequence == 0);

    SUBCASE("second asset at the next sequence") {
        REQUIRE(fx.cluster.execute(fx.alice, Request{RequestKind::Execute, kAlice, 0, Transfer{kBob, 1}}));
        CHECK(error_of(fx.cluster.send(0, AssetRequestMsg{authenticate(fx.alice, AssetRequest{kAlice, 0, text("b")})})) ==
              Error::SequenceMismatch);
        auto b = fx.bind(fx.alice, kAlice, 1, text("nft:43"));
        REQUIRE(b);
        CHECK(verify_asset(fx.cluster.committee, *a));
        CHECK(verify_asset(fx.cluster.committee, *b));
    }
    SUBCASE("wrong owner") {
        CHECK(all_errors(fx.cluster.broadcast(AssetRequestMsg{authenticate(fx.bob, AssetRequest{kAlice, 0, text("x")})}),
                         Error::BadAuth));
    }
}

TEST_CASE("verify_asset") {
    AssetFixture fx;
    auto a = fx.bind(fx.alice, kAlice, 0, text("x"));
    REQUIRE(a);
    Asset forged = fx.cluster.forge(AssetBinding{kAlice, text("x")}, {0, 1});
    CHECK_FALSE(verify_asset(fx.cluster.committee, forged));
    Asset tampered = *a;
    tampered.value.data = text("y");
    CHECK_FALSE(verify_asset(fx.cluster.committee, tampered));
    Asset no_id = fx.cluster.forge(AssetBinding{AccountId{}, text("x")}, {0, 1, 2});
    CHECK_FALSE(verify_asset(fx.cluster.committee, no_id));
}

TEST_CASE("identity transmutation and replay") {
    AssetFixture fx;
    auto a = fx.bind(fx.bob, kBob, 0, text("nft:42"));
    REQUIRE(a);
    auto t = fx.transmute("identity", {}, {*a}, 1);
    auto spends = fx.spend(t, {fx.bob}, {0});
    REQUIRE(spends);
    auto out = fx.outputs(t, *spends);
    REQUIRE(out);
    REQUIRE(out->size() == 1);
    CHECK((*out)[0].value.data == text("nft:42"));
    CHECK((*out)[0].value.id == kBob.child(0).child(0));
    CHECK(verify_asset(fx.cluster.committee, (*out)[0]));

    for (AuthorityIndex i = 0; i < 4; ++i) {
        CHECK(fx.cluster.at(i).account(kBob) == nullptr);
        const AccountState* o = fx.cluster.at(i).account(kBob.child(0).child(0));
        REQUIRE(o != nullptr);
        CHECK(o->owner == user_key("out/0").public_key());
    }
    // The input was deactivated but its certificate is still valid history.
    CHECK(verify_asset(fx.cluster.committee, *a));
    CHECK(error_of(fx.cluster.send(0, AssetRequestMsg{authenticate(fx.bob, AssetRequest{kBob, 1, text("z")})})) ==
          Error::InactiveAccount);

    auto replay = fx.outputs(t, *spends);
    REQUIRE(replay);
    CHECK(to_bytes((*replay)[0].value) == to_bytes((*out)[0].value));

    SUBCASE("a spent input cannot be spent again") {
        auto again = fx.transmute("identity", {}, {*a}, 1);
        Request r{RequestKind::Execute, kBob, 1, Spend{transmute_commitment(again)}};
        CHECK(all_errors(fx.cluster.broadcast(SpendMsg{authenticate(fx.bob, r), again}), Error::InputInactive));
    }
}

TEST_CASE("undefined execution withholds votes before deactivation") {
    AssetFixture fx;
    auto a = fx.bind(fx.bob, kBob, 0, text("not an amount"));
    REQUIRE(a);
    auto t = fx.transmute("split", le(2, 4), {*a}, 2);
    CHECK(check_transmute(fx.cluster.committee, fx.registry, t).error() == Error::UndefinedExecution);
    auto spends = fx.spend(t, {fx.bob}, {0});
    REQUIRE_FALSE(spends);
    CHECK(spends.error() == Error::QuorumNotReached);
    for (AuthorityIndex i = 0; i < 4; ++i) {
        const AccountState* s = fx.cluster.at(i).account(kBob);
        REQUIRE(s != nullptr);
        CHECK(s->active());
        CHECK_FALSE(s->pending);
    }
}

TEST_CASE("spend checks") {
    AssetFixture fx;
    auto a = fx.bind(fx.bob, kBob, 0, le(10, 8));
    REQUIRE(a);
    auto t = fx.transmute("split", le(2, 4), {*a}, 2);
    SUBCASE("commitment must match the request") {
        auto other = fx.transmute("split", le(5, 4), {*a}, 5);
        Request r{RequestKind::Execute, kBob, 0, Spend{transmute_commitment(other)}};
        CHECK(all_errors(fx.cluster.broadcast(SpendMsg{authenticate(fx.bob, r), t}), Error::CommitmentMismatch));
    }
    SUBCASE("unknown function") {
        auto u = fx.transmute("nope", {}, {*a}, 1);
        Request r{RequestKind::Execute, kBob, 0, Spend{transmute_commitment(u)}};
        CHECK(all_errors(fx.cluster.broadcast(SpendMsg{authenticate(fx.bob, r), u}), Error::UnknownExecutionFunction));
    }
    SUBCASE("spent account must be one of the inputs") {
        Request r{RequestKind::Execute, kAlice, 0, Spend{transmute_commitment(t)}};
        CHECK(all_errors(fx.cluster.broadcast(SpendMsg{authenticate(fx.alice, r), t}), Error::BadAsset));
    }
    SUBCASE("spending a funded account is refused") {
        auto funded = fx.bind(fx.alice, kAlice, 0, le(3, 8));
        REQUIRE(funded);
        auto m = fx.transmute("merge", {}, {*funded, *a}, 1);
        Request r{RequestKind::Execute, kAlice, 0, Spend{transmute_commitment(m)}};
        CHECK(all_errors(fx.cluster.broadcast(SpendMsg{authenticate(fx.alice, r), m}), Error::BadValue));
    }
    SUBCASE("duplicate inputs") {
        auto d = fx.transmute("merge", {}, {*a, *a}, 1);
        CHECK(check_transmute(fx.cluster.committee, fx.registry, d).error() == Error::BadAsset);
    }
    SUBCASE("outputs need all spend certificates") {
        CHECK(transmute_outputs(fx.cluster.committee, fx.registry, t, {}).error() == Error::InputInactive);
    }
}

TEST_CASE("merge of two owners' inputs") {
    AssetFixture fx;
    auto b = fx.bind(fx.bob, kBob, 0, le(35, 8));
    REQUIRE(b);
    auto c = fx.bind(fx.carol, kCarol, 0, le(7, 8));
    REQUIRE(c);
    auto t = fx.transmute("merge", {}, {*b, *c}, 1);
    auto spends = fx.spend(t, {fx.bob, fx.carol}, {0, 0});
    REQUIRE(spends);
    auto out = fx.outputs(t, *spends);
    REQUIRE(out);
    REQUIRE(out->size() == 1);
    CHECK(from_le((*out)[0].value.data) == 42);
    CHECK((*out)[0].value.id == kBob.child(0).child(0));
    for (AuthorityIndex i = 0; i < 4; ++i) {
        CHECK(fx.cluster.at(i).account(kBob) == nullptr);
        CHECK(fx.cluster.at(i).account(kCarol) == nullptr);
    }
}

TEST_CASE("builtin functions against oracles") {
    const auto reg = ExecutionRegistry::builtin();
    const auto* split = reg.find("split");
    const auto* merge = reg.find("merge");
    const auto* concat = reg.find("concat");
    const auto* identity = reg.find("identity");
    REQUIRE(split);
    REQUIRE(merge);
    REQUIRE(concat);
    REQUIRE(identity);
    CHECK(reg.names() == std::vector<std::string>{"concat", "identity", "merge", "split"});

    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint64_t total = rng() % 100000;
        const std::uint32_t parts = 1 + static_cast<std::uint32_t>(rng() % 9);
        auto out = split->eval(le(parts, 4), {le(total, 8)});
        if (total < parts) {
            CHECK_FALSE(out);
            continue;
        }
        REQUIRE(out);
        REQUIRE(out->size() == parts);
        std::uint64_t sum = 0;
        std::uint64_t lo = UINT64_MAX;
        std::uint64_t hi = 0;
        for (const auto& x : *out) {
            REQUIRE(x.size() == 8);
            const auto v = from_le(x);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(sum == total);
        CHECK(hi - lo <= 1);
        auto merged = merge->eval({}, *out);
        REQUIRE(merged);
        CHECK(from_le(merged->at(0)) == total);
    }
    CHECK_FALSE(split->eval(le(0, 4), {le(10, 8)}));
    CHECK_FALSE(split->eval(le(2, 8), {le(10, 8)}));
    CHECK_FALSE(merge->eval({}, {le(UINT64_MAX, 8), le(1, 8)}));
    CHECK_FALSE(merge->eval(le(1, 1), {le(1, 8)}));
    CHECK(concat->eval(text("-"), {text("a"), text("b"), text("c")}) == std::vector<Bytes>{text("a-b-c")});
    CHECK_FALSE(concat->eval(text("-"), {text("a")}));
    CHECK(identity->eval({}, {text("a"), text("b")}) == std::vector<Bytes>{text("a"), text("b")});
    CHECK_FALSE(identity->eval(text("p"), {text("a")}));
}
