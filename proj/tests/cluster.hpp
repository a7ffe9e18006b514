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

// In-process committee for tests and the acceptance binary: messages are
// handed to authorities directly and cross-shard effects are applied
// immediately.
#pragma once

#include "bftswap/authority.hpp"

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace bftswap::testing {

inline KeyPair user_key(const std::string& name) { return KeyPair::derive("test/user/" + name); }

struct ClusterOptions {
    std::uint32_t n = 4;
    std::vector<GenesisAccount> genesis;
    SwapParams swap;
    SafetyRules rules;
    std::uint64_t tpke_seed = 99;
};

class Cluster {
public:
    explicit Cluster(ClusterOptions options = {}) {
        std::vector<PublicKey> pks;
        for (std::uint32_t i = 0; i < options.n; ++i) {
            keys.push_back(KeyPair::derive("test/authority/" + std::to_string(i)));
            pks.push_back(keys.back().public_key());
        }
        committee = Committee(pks);
        SeededRng rng(options.tpke_seed);
        system = tpke::setup(options.n, static_cast<std::uint32_t>(committee.validity_threshold()), rng).value();
        auto registry = std::make_shared<const ExecutionRegistry>(ExecutionRegistry::builtin());
        for (std::uint32_t i = 0; i < options.n; ++i) {
            AuthorityConfig cfg;
            cfg.index = i;
            cfg.committee = committee;
            cfg.key = keys[i];
            cfg.swap = options.swap;
            cfg.rules = options.rules;
            cfg.registry = registry;
            cfg.tpke = TpkeMaterial{system.public_key, system.verification_key, system.key_shares[i]};
            cfg.genesis = options.genesis;
            authorities.push_back(std::make_unique<Authority>(std::move(cfg)));
        }
    }

    Authority& at(AuthorityIndex i) { return *authorities.at(i); }
    std::size_t size() const { return authorities.size(); }

    void set_clock(Time t) {
        for (auto& a : authorities) a->set_clock(t);
    }

    // Applies queued cross-shard effects of authority i until none remain.
    void pump(AuthorityIndex i) {
        while (!at(i).outbox_empty()) {
            for (const auto& r : at(i).take_outbox()) at(i).apply(r);
        }
    }

    Reply send(AuthorityIndex i, const ClientMessage& msg) {
        Reply r = at(i).handle(msg);
        pump(i);
        return r;
    }

    std::vector<Reply> broadcast(const ClientMessage& msg, const std::set<AuthorityIndex>& to = {}) {
        std::vector<Reply> out;
        for (AuthorityIndex i = 0; i < size(); ++i) {
            if (!to.empty() && !to.contains(i)) continue;
            out.push_back(send(i, msg));
        }
        return out;
    }

    // Votes over `value` found in the replies.
    template <Signable T>
    std::vector<Vote> votes_for(const std::vector<Reply>& replies, const T& value) const {
        std::vector<Vote> out;
        const Digest d = payload_digest(value);
        for (const auto& r : replies) {
            if (const auto* v = std::get_if<VotesReply>(&r)) {
                for (const auto& vote : v->votes) {
                    if (vote.payload == d) out.push_back(vote);
                }
            }
        }
        return out;
    }

    template <Signable T>
    Result<Certificate<T>> certify(const ClientMessage& msg, const T& value, const std::set<AuthorityIndex>& to = {}) {
        auto votes = votes_for(broadcast(msg, to), value);
        return aggregate_certificate(committee, value, std::span<const Vote>(votes));
    }

    // Certificate signed directly by the authority keys, bypassing checks.
    template <Signable T>
    Certificate<T> forge(const T& value, const std::set<AuthorityIndex>& signers) const {
        Certificate<T> c{value, {}};
        for (AuthorityIndex i : signers) c.votes.push_back(make_vote(keys[i], i, value));
        return c;
    }

    Result<RequestCertificate> order(const KeyPair& owner, const Request& req) {
        return certify(RequestMsg{authenticate(owner, req)}, req);
    }

    // Votes, certificate and confirmation at every authority.
    Result<RequestCertificate> execute(const KeyPair& owner, const Request& req) {
        auto cert = order(owner, req);
        if (cert) broadcast(ConfirmationMsg{*cert});
        return cert;
    }

    const AccountState& account(AuthorityIndex i, const AccountId& id) {
        const AccountState* s = at(i).account(id);
        if (!s) throw std::runtime_error("authority " + std::to_string(i) + " has no account " + id.to_string());
        return *s;
    }

    std::vector<KeyPair> keys;
    Committee committee;
    tpke::System system;
    std::vector<std::unique_ptr<Authority>> authorities;
};

inline std::optional<Error> error_of(const Reply& r) {
    if (const auto* e = std::get_if<ErrorReply>(&r)) return e->error;
    return std::nullopt;
}

inline bool all_errors(const std::vector<Reply>& replies, Error e) {
    for (const auto& r : replies) {
        if (error_of(r) != e) return false;
    }
    return true;
}

}  // namespace bftswap::testing
