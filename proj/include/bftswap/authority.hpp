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
 * @file authority.hpp
 *
 * One authority: a set of shards holding accounts, swap instances and
 * auctions, plus the request handlers of the account, consensus, asset and
 * auction services.
 *
 * Handlers never touch another shard directly. Effects on other objects,
 * even on the same shard, are queued as CrossShardRequest messages in the
 * outbox; the host delivers them back through apply() at least once, in any
 * order. Every effect handler is idempotent.
 */
#pragma once

#include "bftswap/accounts.hpp"
#include "bftswap/assets.hpp"
#include "bftswap/auction.hpp"
#include "bftswap/committee.hpp"
#include "bftswap/messages.hpp"
#include "bftswap/swap.hpp"
#include "bftswap/tpke.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace bftswap {

enum class AuthorityBehavior : std::uint8_t {
    Honest = 0,
    // Signs whatever it is asked to sign, with its own key, and keeps no
    // state for it.
    ArbitrarySigner = 1,
};

struct TpkeMaterial {
    tpke::PublicKey public_key;
    tpke::VerificationKey verification_key;
    tpke::KeyShare share;
};

struct GenesisAccount {
    AccountId id;
    std::optional<PublicKey> owner;
    Amount balance = 0;
};

struct AuthorityConfig {
    AuthorityIndex index = 0;
    Committee committee;
    KeyPair key;
    std::uint32_t shard_count = 4;
    SwapParams swap;
    SafetyRules rules;
    std::shared_ptr<const ExecutionRegistry> registry;
    std::optional<TpkeMaterial> tpke;
    std::vector<GenesisAccount> genesis;
    AuthorityBehavior behavior = AuthorityBehavior::Honest;
};

// A signature an authority produced, for trace audits.
struct SignRecord {
    AuthorityIndex signer = 0;
    SignKind kind = SignKind::Test;
    Bytes value;  // canonical encoding of the signed value

    BFTSWAP_FIELDS(signer, kind, value)
};

struct Shard {
    std::map<AccountId, AccountState> accounts;
    std::set<AccountId> deactivated;
    std::map<AccountId, SwapInstance> swaps;
    std::map<AccountId, std::optional<CommitCertificate>> deleted_swaps;
    std::map<AccountId, AuctionState> auctions;
};

std::uint32_t shard_of(const AccountId& id, std::uint32_t shard_count);

class Authority {
public:
    explicit Authority(AuthorityConfig config);

    AuthorityIndex index() const { return config_.index; }
    const AuthorityConfig& config() const { return config_; }
    bool honest() const { return config_.behavior == AuthorityBehavior::Honest; }

    void set_clock(Time now) { now_ = now; }
    Time clock() const { return now_; }

    Reply handle(const ClientMessage& msg);
    void apply(const CrossShardRequest& request);

    std::vector<CrossShardRequest> take_outbox();
    bool outbox_empty() const { return outbox_.empty(); }

    using SignObserver = std::function<void(const SignRecord&)>;
    void set_sign_observer(SignObserver observer) { observer_ = std::move(observer); }

    using LogSink = std::function<void(const std::string&)>;
    void set_log_sink(LogSink sink) { log_ = std::move(sink); }

    const AccountState* account(const AccountId& id) const;
    bool deactivated(const AccountId& id) const;
    const SwapInstance* instance(const AccountId& swid) const;
    const AuctionState* auction(const AccountId& auction_id) const;
    const std::vector<Shard>& shards() const { return shards_; }

    // Full state dump. With `consistency_only`, per-authority transient
    // state is left out (pending requests, deferred effects, instances and
    // auction bookkeeping), leaving what honest authorities must agree on.
    nlohmann::ordered_json snapshot(bool consistency_only = false) const;

    Amount total_balance() const;

private:
    Shard& shard(const AccountId& id) { return shards_[shard_of(id, config_.shard_count)]; }
    const Shard& shard(const AccountId& id) const { return shards_[shard_of(id, config_.shard_count)]; }

    template <Signable T>
    Vote sign(const T& value) {
        Vote v = make_vote(config_.key, config_.index, value);
        if (observer_) observer_(SignRecord{config_.index, T::kSignKind, to_bytes(value)});
        return v;
    }

    void emit(AccountId target, CrossShardEffect effect);
    void warn(const std::string& message);

    Reply arbitrary(const ClientMessage& msg);

    Reply on(const RequestMsg& m);
    Reply on(const ConfirmationMsg& m);
    Reply on(const QueryAccountMsg& m);
    Reply on(const ProposalMsg& m);
    Reply on(const PreCommitMsg& m);
    Reply on(const CommitMsg& m);
    Reply on(const QueryInstanceMsg& m);
    Reply on(const AssetRequestMsg& m);
    Reply on(const SpendMsg& m);
    Reply on(const OutputBindingMsg& m);
    Reply on(const OpenAuctionMsg& m);
    Reply on(const SubmitBidMsg& m);
    Reply on(const EndOfBiddingMsg& m);
    Reply on(const RequestSharesMsg& m);
    Reply on(const EndOfAuctionMsg& m);
    Reply on(const SettleMsg& m);
    Reply on(const QueryAuctionMsg& m);

    Reply vote_on_request(const AuthenticatedRequest& auth);
    void execute(const AccountId& id, AccountState& state, const RequestCertificate& cert);
    void run_deferred(const AccountId& id, AccountState& state);

    void on_effect(const AccountId& target, const InitAccountEffect& e);
    void on_effect(const AccountId& target, const CreditEffect& e);
    void on_effect(const AccountId& target, const InitInstanceEffect& e);
    void on_effect(const AccountId& target, const UnlockEffect& e);
    void on_effect(const AccountId& target, const OpenOutputEffect& e);

    void try_settle(AuctionState& auction);
    void refund_late_credit(const AccountId& escrow, const CreditEffect& e);

    AuthorityConfig config_;
    std::vector<Shard> shards_;
    std::vector<CrossShardRequest> outbox_;
    Time now_ = 0;
    SignObserver observer_;
    LogSink log_;
};

}  // namespace bftswap
