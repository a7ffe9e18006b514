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

#include "bftswap/client.hpp"

#include <algorithm>

namespace bftswap {

bool is_retryable(Error e) {
    switch (e) {
        case Error::UnknownInstance:
        case Error::RoundUnavailable:
        case Error::UnknownAccount:
        case Error::SequenceMismatch:
        case Error::UnknownAuction:
        case Error::MissingLockCertificate:
        case Error::InsufficientFunds:
            return true;
        default:
            return false;
    }
}

const char* to_string(ProposerBehavior b) {
    switch (b) {
        case ProposerBehavior::Honest: return "honest";
        case ProposerBehavior::FlipFlop: return "flip_flop";
        case ProposerBehavior::Equivocate: return "equivocate";
        case ProposerBehavior::Absent: return "absent";
    }
    return "unknown";
}

const char* to_string(SellerBehavior b) {
    switch (b) {
        case SellerBehavior::Honest: return "honest";
        case SellerBehavior::Withhold: return "withhold";
        case SellerBehavior::Misreport: return "misreport";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Broadcast with retries

namespace {

enum class Slot : std::uint8_t { Pending, Accepted, Rejected };

struct GatherState {
    GatherSpec spec;
    std::vector<Slot> slots;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    Error last_error = Error::QuorumNotReached;
    bool finished = false;
    Time deadline = 0;
    Time retry = 0;
};

void gather_finish(GatherState& st, Status s) {
    if (st.finished) return;
    st.finished = true;
    if (st.spec.done) st.spec.done(s);
}

void gather_reply(const std::shared_ptr<GatherState>& st, AuthorityIndex from, const Reply& reply) {
    if (st->slots[from] != Slot::Pending) return;
    const Verdict v = st->spec.on_reply(from, reply);
    if (v == Verdict::Accept) {
        st->slots[from] = Slot::Accepted;
        if (++st->accepted >= st->spec.need) gather_finish(*st, {});
    } else if (v == Verdict::Reject) {
        st->slots[from] = Slot::Rejected;
        ++st->rejected;
        if (const auto* e = std::get_if<ErrorReply>(&reply)) st->last_error = e->error;
        if (st->slots.size() - st->rejected < st->spec.need) gather_finish(*st, st->last_error);
    }
}

void gather_tick(Simulator& sim, ActorId actor, const std::shared_ptr<GatherState>& st) {
    if (sim.now() >= st->deadline) {
        gather_finish(*st, Error::Stalled);
        return;
    }
    const bool open = std::any_of(st->slots.begin(), st->slots.end(), [](Slot s) { return s == Slot::Pending; });
    if (!open) return;
    if (st->finished && !st->spec.persist) return;
    for (AuthorityIndex i = 0; i < st->slots.size(); ++i) {
        if (st->slots[i] != Slot::Pending) continue;
        sim.call(actor, i, st->spec.message, [st](AuthorityIndex from, const Reply& r) { gather_reply(st, from, r); });
    }
    sim.after(st->retry, [&sim, actor, st] { gather_tick(sim, actor, st); });
}

}  // namespace

Client::Client(Simulator& sim, std::string name, ClientOptions options)
    : sim_(sim), name_(std::move(name)), options_(options), actor_(sim.add_client(name_)) {}

void Client::gather(GatherSpec spec) {
    auto st = std::make_shared<GatherState>();
    st->spec = std::move(spec);
    st->slots.assign(sim_.size(), Slot::Pending);
    st->deadline = sim_.now() + options_.patience;
    st->retry = options_.retry;
    gather_tick(sim_, actor_, st);
}

void Client::acknowledge(ClientMessage message, std::function<void(Status)> done) {
    GatherSpec spec;
    spec.message = std::move(message);
    spec.need = sim_.committee().quorum();
    spec.persist = true;
    spec.on_reply = [](AuthorityIndex, const Reply& reply) {
        if (std::holds_alternative<Ack>(reply)) return Verdict::Accept;
        if (const auto* e = std::get_if<ErrorReply>(&reply); e && is_retryable(e->error)) return Verdict::Retry;
        return Verdict::Reject;
    };
    spec.done = std::move(done);
    gather(std::move(spec));
}

void Client::vote_request(const WalletPtr&, ClientMessage message, Request request,
                          std::function<void(Result<RequestCertificate>)> done) {
    collect_one<Request>(std::move(message), std::move(request),
                         [this, done = std::move(done)](Result<RequestCertificate> cert) {
                             if (cert) sim_.record_certificate(actor_, *cert);
                             done(std::move(cert));
                         });
}

void Client::confirm(const WalletPtr& w, const RequestCertificate& cert,
                     std::function<void(Result<RequestCertificate>)> done) {
    w->next = cert.value.sequence + 1;
    ClientMessage msg = ConfirmationMsg{cert};
    sim_.add_replayable(msg);
    acknowledge(std::move(msg), [cert, done = std::move(done)](Status s) {
        if (!s) return done(s.error());
        done(cert);
    });
}

void Client::execute(const WalletPtr& w, Operation op, std::function<void(Result<RequestCertificate>)> done) {
    Request r{RequestKind::Execute, w->id, w->next, std::move(op)};
    ClientMessage msg = RequestMsg{authenticate(w->key, r)};
    vote_request(w, std::move(msg), std::move(r),
                 [this, w, done = std::move(done)](Result<RequestCertificate> cert) mutable {
                     if (!cert) return done(cert.error());
                     confirm(w, *cert, std::move(done));
                 });
}

void Client::lock(const WalletPtr& w, Operation op, std::function<void(Result<RequestCertificate>)> done) {
    Request r{RequestKind::Lock, w->id, w->next, std::move(op)};
    ClientMessage msg = RequestMsg{authenticate(w->key, r)};
    vote_request(w, std::move(msg), std::move(r), std::move(done));
}

void Client::certify_asset(const WalletPtr& w, Bytes data, std::function<void(Result<Asset>)> done) {
    AssetRequest req{w->id, w->next, data};
    ClientMessage msg = AssetRequestMsg{authenticate(w->key, req)};
    collect_one<AssetBinding>(std::move(msg), AssetBinding{w->id, std::move(data)},
                              [this, done = std::move(done)](Result<Asset> a) {
                                  if (a) sim_.record_certificate(actor_, *a);
                                  done(std::move(a));
                              });
}

void Client::transmute(std::vector<WalletPtr> inputs, TransmuteRequest request,
                       std::function<void(Result<TransmuteResult>)> done) {
    struct State {
        std::vector<std::optional<RequestCertificate>> spends;
        std::size_t remaining = 0;
        std::optional<Error> error;
    };
    if (inputs.size() != request.inputs.size() || inputs.empty()) return done(Error::UndefinedExecution);
    auto st = std::make_shared<State>();
    st->spends.resize(inputs.size());
    st->remaining = inputs.size();
    auto req = std::make_shared<const TransmuteRequest>(std::move(request));
    auto finish = std::make_shared<std::function<void(Result<TransmuteResult>)>>(std::move(done));
    const Digest commitment = transmute_commitment(*req);

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const WalletPtr& w = inputs[i];
        Request r{RequestKind::Execute, w->id, w->next, Spend{commitment}};
        ClientMessage msg = SpendMsg{authenticate(w->key, r), *req};
        vote_request(w, std::move(msg), std::move(r), [this, w, i, st, req, finish](Result<RequestCertificate> c) {
            auto settle = [this, i, st, req, finish](Result<RequestCertificate> confirmed) {
                if (confirmed) {
                    st->spends[i] = *confirmed;
                } else if (!st->error) {
                    st->error = confirmed.error();
                }
                if (--st->remaining > 0) return;
                if (st->error) return (*finish)(*st->error);
                std::vector<RequestCertificate> spends;
                for (auto& s : st->spends) spends.push_back(*s);
                replay_outputs(*req, spends, [spends, finish](Result<std::vector<Asset>> outs) {
                    if (!outs) return (*finish)(outs.error());
                    (*finish)(TransmuteResult{spends, std::move(*outs)});
                });
            };
            if (!c) return settle(c.error());
            confirm(w, *c, settle);
        });
    }
}

void Client::replay_outputs(const TransmuteRequest& request, const std::vector<RequestCertificate>& spends,
                            std::function<void(Result<std::vector<Asset>>)> done) {
    static const ExecutionRegistry registry = ExecutionRegistry::builtin();
    auto expected = transmute_outputs(sim_.committee(), registry, request, spends);
    if (!expected) return done(expected.error());
    ClientMessage msg = OutputBindingMsg{request, spends};
    sim_.add_replayable(msg);
    collect<AssetBinding>(std::move(msg), std::move(*expected),
                          [this, done = std::move(done)](Result<std::vector<Asset>> outs) {
                              if (outs) {
                                  for (const auto& a : *outs) sim_.record_certificate(actor_, a);
                              }
                              done(std::move(outs));
                          });
}

// ---------------------------------------------------------------------------
// Swap sessions

SwapSession::SwapSession(Simulator& sim, SwapPlan plan, ClientOptions options,
                         std::function<void(const SwapOutcome&)> done)
    : sim_(sim), plan_(std::move(plan)), options_(options), done_(std::move(done)) {}

std::shared_ptr<SwapSession> SwapSession::start(Simulator& sim, SwapPlan plan, ClientOptions options,
                                                std::function<void(const SwapOutcome&)> done) {
    if (!plan.owners[0] || !plan.owners[1]) throw ConfigError("swap needs two owner accounts");
    if (!plan.broker) plan.broker = plan.owners[0];
    if (plan.delta == 0) plan.delta = 4 * sim.setup().network.max_delay;
    std::shared_ptr<SwapSession> s(new SwapSession(sim, std::move(plan), options, std::move(done)));
    sim.after(0, [s] { s->begin(); });
    return s;
}

void SwapSession::begin() {
    const WalletPtr& broker = plan_.broker;
    outcome_.swid = broker->id.child(broker->next);
    for (std::size_t i = 0; i < 2; ++i) {
        outcome_.sequences[i] = plan_.owners[i]->next + (plan_.owners[i] == broker ? 1 : 0);
    }
    broker_ = std::make_unique<Client>(sim_, broker->name + "/broker", options_);
    for (std::size_t i = 0; i < 2; ++i) {
        drivers_[i] = std::make_unique<Client>(sim_, plan_.owners[i]->name + "/driver", options_);
        if (plan_.behavior[i] != ProposerBehavior::Honest) sim_.mark_faulty_client(drivers_[i]->actor());
    }
    StartConsensusInstance op{outcome_.swid, plan_.owners[0]->id, outcome_.sequences[0], plan_.owners[1]->id,
                              outcome_.sequences[1]};
    auto self = shared_from_this();
    broker_->execute(broker, op, [self](Result<RequestCertificate> cert) {
        if (!cert) return self->finish(cert.error());
        self->outcome_.started = true;
        self->deadline_ = self->sim_.now() + self->options_.patience;
        bool any = false;
        for (std::size_t i = 0; i < 2; ++i) {
            if (!self->plan_.lock[i]) continue;
            any = true;
            self->sim_.after(self->plan_.lock_delay[i], [self, i] { self->lock_owner(i); });
        }
        if (!any) self->finish(std::nullopt);
    });
}

void SwapSession::lock_owner(std::size_t i) {
    const WalletPtr& w = plan_.owners[i];
    handover_[i] = KeyPair::derive("bftswap/handover/" + outcome_.swid.to_string() + "/" + std::to_string(i + 1));
    LockInto op{outcome_.swid, static_cast<std::uint8_t>(i + 1), handover_[i]->public_key()};
    auto self = shared_from_this();
    drivers_[i]->lock(w, op, [self, i](Result<RequestCertificate> cert) {
        if (!cert) {
            self->outcome_.observed.push_back(cert.error());
            self->sim_.note(self->drivers_[i]->actor(), "lock failed: " + std::string(to_string(cert.error())));
            self->schedule_round(i, 0);  // lets the session notice it cannot progress
            return;
        }
        self->outcome_.locks[i] = *cert;
        if (self->plan_.behavior[i] == ProposerBehavior::Absent) return;
        self->driving_[i] = true;
        self->schedule_round(i, self->plan_.delta);
    });
}

void SwapSession::schedule_round(std::size_t i, Time delay) {
    if (!outcome_.locks[i] || plan_.behavior[i] == ProposerBehavior::Absent || sim_.now() + delay > deadline_) {
        driving_[i] = false;
        if (!driving_[0] && !driving_[1] && !outcome_.commit) finish(Error::Stalled);
        return;
    }
    auto self = shared_from_this();
    sim_.after(delay, [self, i] { self->drive_round(i); });
}

bool SwapSession::leads(std::size_t i, RoundNumber round) const {
    const SwapParams& p = sim_.setup().swap;
    if (!p.parity_leader || round <= p.escalation_round) return true;
    return (round % 2 == 0) == (i == 0);
}

Decision SwapSession::desired(std::size_t i, RoundNumber round) const {
    if (plan_.behavior[i] == ProposerBehavior::FlipFlop) {
        return round % 2 == 1 ? Decision::Confirm : Decision::Abort;
    }
    if (plan_.desired[i]) return *plan_.desired[i];
    return outcome_.locks[0] && outcome_.locks[1] ? Decision::Confirm : Decision::Abort;
}

void SwapSession::drive_round(std::size_t i) {
    ++attempts_[i];
    struct Views {
        std::optional<CommitCertificate> decided;
        RoundNumber highest = 0;
        std::optional<PreCommitCertificate> locked;
    };
    auto views = std::make_shared<Views>();
    const Committee& committee = sim_.committee();
    GatherSpec spec;
    spec.message = QueryInstanceMsg{outcome_.swid};
    spec.need = committee.quorum();
    spec.on_reply = [views, &committee](AuthorityIndex, const Reply& reply) {
        const auto* v = std::get_if<InstanceView>(&reply);
        if (!v) return Verdict::Retry;
        if (v->decided && check_certificate(committee, *v->decided)) views->decided = *v->decided;
        if (v->proposed) views->highest = std::max(views->highest, v->proposed->round);
        if (v->locked && check_certificate(committee, *v->locked)) {
            const RoundNumber r = v->locked->value.proposal.round;
            views->highest = std::max(views->highest, r);
            if (!views->locked || views->locked->value.proposal.round < r) views->locked = *v->locked;
        }
        return Verdict::Accept;
    };
    auto self = shared_from_this();
    spec.done = [self, i, views](Status s) {
        if (!s) return self->schedule_round(i, self->plan_.delta);
        if (views->decided) return self->finalize(i, *views->decided);
        const ProposerBehavior b = self->plan_.behavior[i];
        if (views->locked && b != ProposerBehavior::FlipFlop) {
            const Proposal& c = views->locked->value.proposal;
            if (c.decision != self->desired(i, c.round)) {
                self->outcome_.observed.push_back(Error::ConflictObserved);
            }
            return self->pre_commit(i, *views->locked);
        }
        RoundNumber r = views->highest + 1;
        while (!self->leads(i, r)) ++r;
        self->propose(i, r, self->desired(i, r));
    };
    drivers_[i]->gather(std::move(spec));
}

void SwapSession::propose(std::size_t i, RoundNumber round, Decision v) {
    auto& mine = signed_[i];
    if (auto it = mine.find(round); it != mine.end() && plan_.behavior[i] != ProposerBehavior::Equivocate) {
        v = it->second.decision;  // never sign a second value for a round
    }
    std::vector<Decision> values{v};
    if (plan_.behavior[i] == ProposerBehavior::Equivocate) {
        values.push_back(v == Decision::Confirm ? Decision::Abort : Decision::Confirm);
    }
    auto self = shared_from_this();
    auto resolved = std::make_shared<std::size_t>(0);
    auto succeeded = std::make_shared<bool>(false);
    for (Decision d : values) {
        Proposal p{outcome_.swid, round, d};
        auto auth = authenticate(*handover_[i], p);
        if (mine.emplace(round, p).second || mine.at(round) != p) {
            sim_.record_client_proposal(drivers_[i]->actor(), auth);
        }
        ClientMessage msg = ProposalMsg{auth, outcome_.locks[0], outcome_.locks[1]};
        const std::size_t total = values.size();
        drivers_[i]->collect_one<PreCommit>(
            std::move(msg), PreCommit{p}, [self, i, resolved, succeeded, total](Result<PreCommitCertificate> c) {
                ++*resolved;
                const bool both = self->plan_.behavior[i] == ProposerBehavior::Equivocate;
                if (c && (!*succeeded || both)) {
                    *succeeded = true;
                    self->sim_.record_certificate(self->drivers_[i]->actor(), *c);
                    return self->pre_commit(i, *c);
                }
                if (*resolved == total && !*succeeded) self->schedule_round(i, self->plan_.delta);
            });
    }
}

void SwapSession::pre_commit(std::size_t i, const PreCommitCertificate& cert) {
    auto self = shared_from_this();
    drivers_[i]->collect_one<Commit>(PreCommitMsg{cert}, Commit{cert.value.proposal},
                                     [self, i](Result<CommitCertificate> c) {
                                         if (!c) return self->schedule_round(i, self->plan_.delta);
                                         self->sim_.record_certificate(self->drivers_[i]->actor(), *c);
                                         self->finalize(i, *c);
                                     });
}

void SwapSession::finalize(std::size_t i, const CommitCertificate& cert) {
    if (!outcome_.commit) outcome_.commit = cert;
    driving_[i] = false;
    ClientMessage msg = CommitMsg{cert, outcome_.locks[0], outcome_.locks[1]};
    sim_.add_replayable(msg);
    auto self = shared_from_this();
    drivers_[i]->acknowledge(std::move(msg), [self, cert](Status s) {
        if (!s) return self->finish(s.error());
        self->outcome_.finalized = true;
        self->settle_wallets(cert);
        self->finish(std::nullopt);
    });
}

void SwapSession::settle_wallets(const CommitCertificate& cert) {
    if (wallets_settled_) return;
    const bool confirm = cert.value.proposal.decision == Decision::Confirm;
    if (confirm) {
        wallets_settled_ = true;
        for (std::size_t i = 0; i < 2; ++i) {
            plan_.owners[i]->key = *handover_[1 - i];
            plan_.owners[i]->next = outcome_.sequences[i] + 1;
        }
        return;
    }
    bool all = true;
    for (std::size_t i = 0; i < 2; ++i) {
        if (outcome_.locks[i]) {
            plan_.owners[i]->next = outcome_.sequences[i] + 1;
        } else if (plan_.lock[i]) {
            all = false;  // a late lock is still to be released
        }
    }
    wallets_settled_ = all;
}

void SwapSession::finish(std::optional<Error> error) {
    if (finished_) return;
    if (error && outcome_.commit && *error == Error::Stalled) return;
    finished_ = true;
    outcome_.error = error;
    if (done_) done_(outcome_);
}

// ---------------------------------------------------------------------------
// Auctions

AuctionSession::AuctionSession(Simulator& sim, AuctionPlan plan, ClientOptions options,
                               std::function<void(const AuctionOutcome&)> done)
    : sim_(sim), plan_(std::move(plan)), options_(options), done_(std::move(done)) {}

std::shared_ptr<AuctionSession> AuctionSession::start(Simulator& sim, AuctionPlan plan, ClientOptions options,
                                                      std::function<void(const AuctionOutcome&)> done) {
    if (!plan.item || !plan.payout) throw ConfigError("auction needs item and payout accounts");
    std::shared_ptr<AuctionSession> s(new AuctionSession(sim, std::move(plan), options, std::move(done)));
    sim.after(0, [s] { s->begin(); });
    return s;
}

void AuctionSession::begin() {
    const WalletPtr& item = plan_.item;
    outcome_.auction_id = item->id.child(item->next);
    outcome_.bids.resize(plan_.bids.size());
    item_sequence_ = item->next;
    const std::string tag = outcome_.auction_id.to_string();
    seller_key_ = KeyPair::derive("bftswap/seller/" + tag);
    seller_client_ = std::make_unique<Client>(sim_, item->name + "/seller", options_);
    for (std::size_t i = 0; i < plan_.bids.size(); ++i) {
        bidder_clients_.push_back(std::make_unique<Client>(sim_, plan_.bids[i].bidder->name + "/bidder", options_));
        item_keys_.push_back(KeyPair::derive("bftswap/item-key/" + tag + "/" + std::to_string(i)));
    }

    OpenAuction op{outcome_.auction_id, plan_.rule, plan_.payout->id, seller_key_.public_key()};
    auto self = shared_from_this();
    seller_client_->lock(item, op, [self](Result<RequestCertificate> lock) {
        if (!lock) return self->finish(lock.error());
        ClientMessage msg = OpenAuctionMsg{*lock};
        self->sim_.add_replayable(msg);
        self->seller_client_->acknowledge(std::move(msg), [self](Status s) {
            if (!s) return self->finish(s.error());
            self->outcome_.opened = true;
            for (std::size_t i = 0; i < self->plan_.bids.size(); ++i) {
                self->sim_.after(self->plan_.bids[i].delay, [self, i] { self->submit_bid(i); });
            }
            self->sim_.after(self->plan_.bidding_window, [self] { self->close_bidding(); });
        });
    });
}

void AuctionSession::submit_bid(std::size_t i) {
    const BidPlan& plan = plan_.bids[i];
    Client& client = *bidder_clients_[i];
    auto self = shared_from_this();
    client.execute(plan.bidder, Transfer{outcome_.auction_id, plan.deposit},
                   [self, i](Result<RequestCertificate> deposit) {
                       if (!deposit) {
                           self->sim_.note(self->bidder_clients_[i]->actor(),
                                           "deposit failed: " + std::string(to_string(deposit.error())));
                           return;
                       }
                       const BidPlan& p = self->plan_.bids[i];
                       SeededRng rng(self->sim_.rand_u64());
                       auto ct = tpke::encrypt(self->sim_.tpke_public_key(), p.value,
                                               bid_label(self->outcome_.auction_id), rng);
                       if (!ct) {
                           self->sim_.note(self->bidder_clients_[i]->actor(), "bid value out of range");
                           return;
                       }
                       BidSubmission bid{self->outcome_.auction_id,    p.bidder->id, self->item_keys_[i].public_key(),
                                         std::move(*ct),              p.deposit,    deposit->value_digest()};
                       self->bidder_clients_[i]->collect_one<BidSubmission>(
                           SubmitBidMsg{bid, *deposit}, bid, [self, i](Result<BidCertificate> cert) {
                               if (!cert) return;
                               self->sim_.record_certificate(self->bidder_clients_[i]->actor(), *cert);
                               self->outcome_.bids[i] = *cert;
                           });
                   });
}

void AuctionSession::close_bidding() {
    if (plan_.seller == SellerBehavior::Withhold) {
        sim_.note(seller_client_->actor(), "seller withholds end of bidding");
        return finish(std::nullopt);
    }
    std::map<Digest, BidCertificate> included;
    for (std::size_t i = 0; i < plan_.bids.size(); ++i) {
        if (plan_.bids[i].included && outcome_.bids[i]) included.emplace(outcome_.bids[i]->value_digest(), *outcome_.bids[i]);
    }
    EndOfBidding eob{outcome_.auction_id, {}};
    std::vector<BidCertificate> certs;
    for (const auto& [_, c] : included) {
        eob.bids.push_back(c.value);
        certs.push_back(c);
    }
    auto self = shared_from_this();
    seller_client_->collect_one<EndOfBidding>(EndOfBiddingMsg{authenticate(seller_key_, eob), certs}, eob,
                                              [self](Result<EndOfBiddingCertificate> c) {
                                                  if (!c) return self->finish(c.error());
                                                  self->sim_.record_certificate(self->seller_client_->actor(), *c);
                                                  self->outcome_.closing = *c;
                                                  self->reveal();
                                              });
}

void AuctionSession::reveal() {
    const std::size_t bids = outcome_.closing->value.bids.size();
    auto shares = std::make_shared<std::vector<std::vector<tpke::DecryptionShare>>>(bids);
    GatherSpec spec;
    spec.message = RequestSharesMsg{*outcome_.closing};
    spec.need = sim_.committee().quorum();
    spec.on_reply = [shares, bids](AuthorityIndex, const Reply& reply) {
        const auto* r = std::get_if<SharesReply>(&reply);
        if (!r) {
            const auto* e = std::get_if<ErrorReply>(&reply);
            return e && is_retryable(e->error) ? Verdict::Retry : Verdict::Reject;
        }
        if (r->shares.size() != bids) return Verdict::Reject;
        for (std::size_t i = 0; i < bids; ++i) (*shares)[i].push_back(r->shares[i]);
        return Verdict::Accept;
    };
    auto self = shared_from_this();
    spec.done = [self, shares](Status s) {
        if (!s) return self->finish(s.error());
        self->end_auction(*shares);  // late replies may still append
    };
    seller_client_->gather(std::move(spec));
}

void AuctionSession::end_auction(std::vector<std::vector<tpke::DecryptionShare>> shares) {
    const auto& closing = *outcome_.closing;
    EndOfAuction eoa{outcome_.auction_id, closing.value_digest(), {}};
    const auto& pk = sim_.tpke_public_key();
    const auto& vk = sim_.tpke_verification_key();
    for (std::size_t i = 0; i < closing.value.bids.size(); ++i) {
        const auto& bid = closing.value.bids[i];
        eoa.outcomes.push_back(BidOutcome{payload_digest(bid), tpke::combine(pk, vk, bid.ciphertext, shares[i])});
    }
    if (plan_.seller == SellerBehavior::Misreport && !eoa.outcomes.empty()) {
        auto& v = eoa.outcomes.front().value;
        v = v ? *v + 1 : 1;
    }
    auto self = shared_from_this();
    seller_client_->collect_one<EndOfAuction>(
        EndOfAuctionMsg{authenticate(seller_key_, eoa), closing, std::move(shares)}, eoa,
        [self](Result<EndOfAuctionCertificate> c) {
            if (!c) return self->finish(c.error());
            self->sim_.record_certificate(self->seller_client_->actor(), *c);
            self->outcome_.result = *c;
            self->settle();
        });
}

void AuctionSession::settle() {
    const auto& closing = *outcome_.closing;
    const auto& result = *outcome_.result;
    ClientMessage msg = SettleMsg{result, closing};
    sim_.add_replayable(msg);

    std::vector<SettlementBid> input;
    for (std::size_t i = 0; i < closing.value.bids.size(); ++i) {
        const auto& b = closing.value.bids[i];
        input.push_back(SettlementBid{b.bidder, b.deposit, result.value.outcomes[i].value});
    }
    const SettlementOutcome s = settle_bids(input, plan_.rule);
    outcome_.price = s.price;
    if (s.winner) {
        const Digest d = closing.value.bids[*s.winner].deposit_certificate;
        for (std::size_t i = 0; i < outcome_.bids.size(); ++i) {
            if (outcome_.bids[i] && outcome_.bids[i]->value.deposit_certificate == d) outcome_.winner = i;
        }
    }

    auto self = shared_from_this();
    seller_client_->acknowledge(std::move(msg), [self](Status st) {
        if (!st) return self->finish(st.error());
        self->outcome_.settled = true;
        WalletPtr& item = self->plan_.item;
        item->next = self->item_sequence_ + 1;
        if (self->outcome_.winner) item->key = self->item_keys_[*self->outcome_.winner];
        self->finish(std::nullopt);
    });
}

void AuctionSession::finish(std::optional<Error> error) {
    if (finished_) return;
    finished_ = true;
    outcome_.error = error;
    if (done_) done_(outcome_);
}

}  // namespace bftswap
