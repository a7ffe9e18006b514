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
 * @file client.hpp
 *
 * Client drivers running inside the simulator: vote collection, account
 * operations, the swap session (broker, locks, round leadership,
 * finalization), asset certification and transmutation, and the auction
 * roles.
 *
 * Every driver is a chain of callbacks on simulator events. Messages are
 * broadcast to all authorities and resent to the ones that have not
 * answered every `retry` ticks until `patience` runs out.
 */
#pragma once

#include "bftswap/simulator.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bftswap {

// Client-side key material for one account.
struct Wallet {
    std::string name;
    AccountId id;
    KeyPair key;
    SequenceNumber next = 0;
};

using WalletPtr = std::shared_ptr<Wallet>;

struct ClientOptions {
    Time retry = 400;
    Time patience = 200000;
};

// Errors a lagging or not-yet-ready authority may return; the request is
// resent later instead of counted as a rejection.
bool is_retryable(Error e);

enum class Verdict : std::uint8_t { Accept, Retry, Reject };

struct GatherSpec {
    ClientMessage message;
    std::size_t need = 0;
    std::function<Verdict(AuthorityIndex, const Reply&)> on_reply;
    std::function<void(Status)> done;
    // Keep resending to authorities that have not accepted after `done`.
    bool persist = false;
};

class Client {
public:
    Client(Simulator& sim, std::string name, ClientOptions options = {});

    Simulator& sim() { return sim_; }
    ActorId actor() const { return actor_; }
    const std::string& name() const { return name_; }
    const ClientOptions& options() const { return options_; }

    // Sends to every authority until `need` accept. Fails with the most
    // recent rejection once the remaining authorities cannot make up
    // `need`, or with Stalled when patience runs out.
    void gather(GatherSpec spec);

    // Collects a certificate for each of `values` from votes in replies
    // to `message`.
    template <Signable T>
    void collect(ClientMessage message, std::vector<T> values,
                 std::function<void(Result<std::vector<Certificate<T>>>)> done);

    template <Signable T>
    void collect_one(ClientMessage message, T value, std::function<void(Result<Certificate<T>>)> done) {
        collect<T>(std::move(message), {std::move(value)},
                   [done = std::move(done)](Result<std::vector<Certificate<T>>> r) {
                       if (!r) return done(r.error());
                       done(std::move(r->front()));
                   });
    }

    // Broadcasts until a quorum acknowledges; keeps retrying the rest.
    void acknowledge(ClientMessage message, std::function<void(Status)> done);

    // Execute request: votes, certificate, confirmation.
    void execute(const WalletPtr& w, Operation op, std::function<void(Result<RequestCertificate>)> done);
    // Lock request: votes and certificate, never confirmed.
    void lock(const WalletPtr& w, Operation op, std::function<void(Result<RequestCertificate>)> done);

    // Certificate over (id, data) at the account's current sequence.
    void certify_asset(const WalletPtr& w, Bytes data, std::function<void(Result<Asset>)> done);

    struct TransmuteResult {
        std::vector<RequestCertificate> spends;
        std::vector<Asset> outputs;
    };
    // Spends every input account, then collects the output bindings.
    void transmute(std::vector<WalletPtr> inputs, TransmuteRequest request,
                   std::function<void(Result<TransmuteResult>)> done);
    // Re-requests the output bindings of an already spent transmutation.
    void replay_outputs(const TransmuteRequest& request, const std::vector<RequestCertificate>& spends,
                        std::function<void(Result<std::vector<Asset>>)> done);

private:
    void confirm(const WalletPtr& w, const RequestCertificate& cert,
                 std::function<void(Result<RequestCertificate>)> done);
    void vote_request(const WalletPtr& w, ClientMessage message, Request request,
                      std::function<void(Result<RequestCertificate>)> done);

    Simulator& sim_;
    std::string name_;
    ClientOptions options_;
    ActorId actor_;
};

template <Signable T>
void Client::collect(ClientMessage message, std::vector<T> values,
                     std::function<void(Result<std::vector<Certificate<T>>>)> done) {
    struct State {
        std::vector<T> values;
        std::vector<Digest> payloads;
        std::vector<std::vector<Vote>> votes;
    };
    auto st = std::make_shared<State>();
    st->values = std::move(values);
    for (const auto& v : st->values) st->payloads.push_back(payload_digest(v));
    st->votes.resize(st->values.size());

    const Committee& committee = sim_.committee();
    GatherSpec spec;
    spec.message = std::move(message);
    spec.need = committee.quorum();
    spec.on_reply = [st, &committee](AuthorityIndex from, const Reply& reply) {
        if (const auto* err = std::get_if<ErrorReply>(&reply)) {
            return is_retryable(err->error) ? Verdict::Retry : Verdict::Reject;
        }
        const auto* vr = std::get_if<VotesReply>(&reply);
        if (!vr) return Verdict::Reject;
        std::vector<const Vote*> matched(st->payloads.size(), nullptr);
        for (const auto& v : vr->votes) {
            for (std::size_t i = 0; i < st->payloads.size(); ++i) {
                if (v.signer == from && v.payload == st->payloads[i] && check_vote(committee, v, st->payloads[i])) {
                    matched[i] = &v;
                }
            }
        }
        for (const auto* m : matched) {
            if (!m) return Verdict::Reject;
        }
        for (std::size_t i = 0; i < matched.size(); ++i) st->votes[i].push_back(*matched[i]);
        return Verdict::Accept;
    };
    spec.done = [st, &committee, done = std::move(done)](Status s) {
        if (!s) return done(s.error());
        std::vector<Certificate<T>> certs;
        for (std::size_t i = 0; i < st->values.size(); ++i) {
            auto c = aggregate_certificate(committee, st->values[i], std::span<const Vote>(st->votes[i]));
            if (!c) return done(c.error());
            certs.push_back(std::move(*c));
        }
        done(std::move(certs));
    };
    gather(std::move(spec));
}

// ---------------------------------------------------------------------------
// Swap sessions

enum class ProposerBehavior : std::uint8_t {
    Honest = 0,
    FlipFlop = 1,    // ignores observed pre-commits and alternates V each round
    Equivocate = 2,  // signs both decisions in every round it leads
    Absent = 3,      // locks but never drives a round
};

const char* to_string(ProposerBehavior b);

struct SwapPlan {
    std::array<WalletPtr, 2> owners;
    WalletPtr broker;  // defaults to owners[0]
    std::array<ProposerBehavior, 2> behavior{ProposerBehavior::Honest, ProposerBehavior::Honest};
    std::array<bool, 2> lock{true, true};
    std::array<Time, 2> lock_delay{0, 0};
    std::array<std::optional<Decision>, 2> desired;  // nullopt: Confirm iff both locks held
    Time delta = 0;                                  // 0: twice the round-trip bound
};

struct SwapOutcome {
    AccountId swid;
    bool started = false;
    std::array<std::optional<RequestCertificate>, 2> locks;
    std::array<SequenceNumber, 2> sequences{};
    std::optional<CommitCertificate> commit;
    bool finalized = false;
    std::optional<Error> error;
    std::vector<Error> observed;  // ConflictObserved and similar notes
};

class SwapSession : public std::enable_shared_from_this<SwapSession> {
public:
    static std::shared_ptr<SwapSession> start(Simulator& sim, SwapPlan plan, ClientOptions options = {},
                                              std::function<void(const SwapOutcome&)> done = {});

    const SwapOutcome& outcome() const { return outcome_; }

private:
    SwapSession(Simulator& sim, SwapPlan plan, ClientOptions options, std::function<void(const SwapOutcome&)> done);

    void begin();
    void lock_owner(std::size_t i);
    void schedule_round(std::size_t i, Time delay);
    void drive_round(std::size_t i);
    void propose(std::size_t i, RoundNumber round, Decision v);
    void pre_commit(std::size_t i, const PreCommitCertificate& cert);
    void finalize(std::size_t i, const CommitCertificate& cert);
    void settle_wallets(const CommitCertificate& cert);
    void finish(std::optional<Error> error);
    Decision desired(std::size_t i, RoundNumber round) const;
    bool leads(std::size_t i, RoundNumber round) const;

    Simulator& sim_;
    SwapPlan plan_;
    ClientOptions options_;
    std::function<void(const SwapOutcome&)> done_;
    std::unique_ptr<Client> broker_;
    std::array<std::unique_ptr<Client>, 2> drivers_;
    std::array<std::optional<KeyPair>, 2> handover_;
    std::array<std::map<RoundNumber, Proposal>, 2> signed_;
    std::array<bool, 2> driving_{false, false};
    std::array<std::size_t, 2> attempts_{0, 0};
    Time deadline_ = 0;
    bool wallets_settled_ = false;
    bool finished_ = false;
    SwapOutcome outcome_;
};

// ---------------------------------------------------------------------------
// Auctions

enum class SellerBehavior : std::uint8_t { Honest = 0, Withhold = 1, Misreport = 2 };

const char* to_string(SellerBehavior b);

struct BidPlan {
    WalletPtr bidder;
    std::uint64_t value = 0;
    Amount deposit = 0;
    bool included = true;  // seller lists the bid at end of bidding
    Time delay = 0;
};

struct AuctionPlan {
    WalletPtr item;    // seller's item account
    WalletPtr payout;  // receives the price
    PriceRule rule = PriceRule::SecondPrice;
    std::vector<BidPlan> bids;
    SellerBehavior seller = SellerBehavior::Honest;
    Time bidding_window = 3000;
};

struct AuctionOutcome {
    AccountId auction_id;
    bool opened = false;
    std::vector<std::optional<BidCertificate>> bids;  // per plan entry
    std::optional<EndOfBiddingCertificate> closing;
    std::optional<EndOfAuctionCertificate> result;
    bool settled = false;
    std::optional<std::size_t> winner;  // plan index
    Amount price = 0;
    std::optional<Error> error;
};

class AuctionSession : public std::enable_shared_from_this<AuctionSession> {
public:
    static std::shared_ptr<AuctionSession> start(Simulator& sim, AuctionPlan plan, ClientOptions options = {},
                                                 std::function<void(const AuctionOutcome&)> done = {});

    const AuctionOutcome& outcome() const { return outcome_; }

private:
    AuctionSession(Simulator& sim, AuctionPlan plan, ClientOptions options,
                   std::function<void(const AuctionOutcome&)> done);

    void begin();
    void submit_bid(std::size_t i);
    void close_bidding();
    void reveal();
    void end_auction(std::vector<std::vector<tpke::DecryptionShare>> shares);
    void settle();
    void finish(std::optional<Error> error);

    Simulator& sim_;
    AuctionPlan plan_;
    ClientOptions options_;
    std::function<void(const AuctionOutcome&)> done_;
    std::unique_ptr<Client> seller_client_;
    std::vector<std::unique_ptr<Client>> bidder_clients_;
    KeyPair seller_key_;
    std::vector<KeyPair> item_keys_;
    SequenceNumber item_sequence_ = 0;
    bool finished_ = false;
    AuctionOutcome outcome_;
};

}  // namespace bftswap
