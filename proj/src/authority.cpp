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

#include "bftswap/authority.hpp"

#include <algorithm>

namespace bftswap {
namespace {

Reply error_reply(Error e) { return ErrorReply{e}; }

// Top bit of a credit index marks an automatic refund of that credit.
constexpr std::uint32_t kRefundIndex = 0x80000000u;

std::string hex_key(const PublicKey& k) { return to_hex(k); }

nlohmann::ordered_json optional_key(const std::optional<PublicKey>& k) {
    return k ? nlohmann::ordered_json(hex_key(*k)) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::uint32_t shard_of(const AccountId& id, std::uint32_t shard_count) {
    const Digest d = digest_of(id);
    std::uint64_t h = 0;
    for (int i = 0; i < 8; ++i) h |= static_cast<std::uint64_t>(d[static_cast<std::size_t>(i)]) << (8 * i);
    return static_cast<std::uint32_t>(h % std::max<std::uint32_t>(shard_count, 1));
}

Authority::Authority(AuthorityConfig config) : config_(std::move(config)) {
    if (config_.shard_count == 0) throw ConfigError("shard_count must be positive");
    if (config_.index >= config_.committee.size() ||
        config_.committee.key(config_.index) != config_.key.public_key()) {
        throw ConfigError("authority key does not match its committee slot");
    }
    if (!config_.registry) config_.registry = std::make_shared<ExecutionRegistry>(ExecutionRegistry::builtin());
    shards_.resize(config_.shard_count);
    for (const auto& g : config_.genesis) {
        auto& s = shard(g.id);
        if (!s.accounts.emplace(g.id, init_account(g.owner, g.balance)).second) {
            throw ConfigError("duplicate genesis account " + g.id.to_string());
        }
    }
}

void Authority::emit(AccountId target, CrossShardEffect effect) {
    outbox_.push_back(CrossShardRequest{std::move(target), std::move(effect)});
}

void Authority::warn(const std::string& message) {
    if (log_) log_(message);
}

std::vector<CrossShardRequest> Authority::take_outbox() {
    std::vector<CrossShardRequest> out;
    out.swap(outbox_);
    return out;
}

const AccountState* Authority::account(const AccountId& id) const {
    const auto& s = shard(id);
    auto it = s.accounts.find(id);
    return it == s.accounts.end() ? nullptr : &it->second;
}

bool Authority::deactivated(const AccountId& id) const { return shard(id).deactivated.contains(id); }

const SwapInstance* Authority::instance(const AccountId& swid) const {
    const auto& s = shard(swid);
    auto it = s.swaps.find(swid);
    return it == s.swaps.end() ? nullptr : &it->second;
}

const AuctionState* Authority::auction(const AccountId& auction_id) const {
    const auto& s = shard(auction_id);
    auto it = s.auctions.find(auction_id);
    return it == s.auctions.end() ? nullptr : &it->second;
}

Amount Authority::total_balance() const {
    Amount total = 0;
    for (const auto& s : shards_) {
        for (const auto& [_, a] : s.accounts) total += a.balance;
    }
    return total;
}

Reply Authority::handle(const ClientMessage& msg) {
    if (config_.behavior == AuthorityBehavior::ArbitrarySigner) {
        return arbitrary(msg);
    }
    return std::visit([&](const auto& m) { return on(m); }, msg);
}

// ---------------------------------------------------------------------------
// Byzantine signer

Reply Authority::arbitrary(const ClientMessage& msg) {
    return std::visit(
        [&](const auto& m) -> Reply {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RequestMsg>) {
                return vote_reply(sign(m.request.value));
            } else if constexpr (std::is_same_v<T, SpendMsg>) {
                return vote_reply(sign(m.spend.value));
            } else if constexpr (std::is_same_v<T, ProposalMsg>) {
                return vote_reply(sign(PreCommit{m.proposal.value}));
            } else if constexpr (std::is_same_v<T, PreCommitMsg>) {
                return vote_reply(sign(Commit{m.certificate.value.proposal}));
            } else if constexpr (std::is_same_v<T, AssetRequestMsg>) {
                return vote_reply(sign(AssetBinding{m.request.value.id, m.request.value.data}));
            } else if constexpr (std::is_same_v<T, SubmitBidMsg>) {
                return vote_reply(sign(m.bid));
            } else if constexpr (std::is_same_v<T, EndOfBiddingMsg>) {
                return vote_reply(sign(m.request.value));
            } else if constexpr (std::is_same_v<T, EndOfAuctionMsg>) {
                return vote_reply(sign(m.request.value));
            } else {
                return on(m);
            }
        },
        msg);
}

// ---------------------------------------------------------------------------
// Account service

Reply Authority::vote_on_request(const AuthenticatedRequest& auth) {
    const Request& r = auth.value;
    auto& s = shard(r.id);
    auto it = s.accounts.find(r.id);
    if (it == s.accounts.end()) {
        return error_reply(s.deactivated.contains(r.id) ? Error::InactiveAccount : Error::UnknownAccount);
    }
    AccountState& state = it->second;
    if (state.pending && *state.pending == r) {
        if (!state.owner || *state.owner != auth.key || !auth.verify()) return error_reply(Error::BadAuth);
        return vote_reply(sign(r));
    }
    if (auto gate = check_request_gate(state, auth); !gate) return error_reply(gate.error());
    if (state.pending) return error_reply(Error::AccountBusy);
    auto validated = validate_operation(state, r.id, r.sequence, r.operation);
    if (!validated) return error_reply(validated.error());
    state.pending = r;
    return vote_reply(sign(r));
}

Reply Authority::on(const RequestMsg& m) {
    if (std::holds_alternative<Spend>(m.request.value.operation)) return error_reply(Error::UndefinedExecution);
    return vote_on_request(m.request);
}

Reply Authority::on(const ConfirmationMsg& m) {
    const auto& cert = m.certificate;
    if (!check_certificate(config_.committee, cert)) return error_reply(Error::BadCertificate);
    const Request& r = cert.value;
    if (r.kind == RequestKind::Lock || is_locking(r.operation)) return error_reply(Error::LockNotAllowed);
    auto& s = shard(r.id);
    auto it = s.accounts.find(r.id);
    if (it == s.accounts.end()) {
        // The spend that deactivated the account may be replayed.
        if (s.deactivated.contains(r.id)) return Ack{};
        return error_reply(Error::UnknownAccount);
    }
    AccountState& state = it->second;
    if (state.next_sequence > r.sequence) return Ack{};
    // Earlier certificates have not arrived here yet; the sender retries.
    if (state.next_sequence < r.sequence) return error_reply(Error::SequenceMismatch);
    if (!state.active()) return error_reply(Error::InactiveAccount);
    execute(r.id, state, cert);
    return Ack{};
}

void Authority::execute(const AccountId& id, AccountState& state, const RequestCertificate& cert) {
    const Request& r = cert.value;
    state.next_sequence = r.sequence + 1;
    state.pending.reset();
    state.confirmed.push_back(cert);

    bool spent = false;
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Transfer>) {
                state.balance -= op.amount;
                if (state.balance < 0) {
                    warn("account " + id.to_string() + " transiently negative: credits still in flight");
                }
                emit(op.recipient, CreditEffect{op.recipient, op.amount, id, cert, 0});
            } else if constexpr (std::is_same_v<T, OpenAccount>) {
                emit(op.id, InitAccountEffect{op.id, op.key, cert});
            } else if constexpr (std::is_same_v<T, ChangeKey>) {
                state.owner = op.key;
            } else if constexpr (std::is_same_v<T, StartConsensusInstance>) {
                emit(op.swid, InitInstanceEffect{op.swid, op.id1, op.n1, op.id2, op.n2, cert});
            } else if constexpr (std::is_same_v<T, Spend>) {
                spent = true;
            }
        },
        r.operation);

    if (spent) {
        auto& s = shard(id);
        s.deactivated.insert(id);
        s.accounts.erase(id);
        return;
    }
    run_deferred(id, state);
}

void Authority::run_deferred(const AccountId& id, AccountState& state) {
    bool progressed = true;
    while (progressed && !state.deferred_unlocks.empty()) {
        progressed = false;
        for (std::size_t i = 0; i < state.deferred_unlocks.size(); ++i) {
            if (state.deferred_unlocks[i].sequence != state.next_sequence) continue;
            UnlockEffect e = state.deferred_unlocks[i];
            state.deferred_unlocks.erase(state.deferred_unlocks.begin() + static_cast<std::ptrdiff_t>(i));
            on_effect(id, e);
            progressed = true;
            break;
        }
    }
    std::erase_if(state.deferred_unlocks, [&](const UnlockEffect& e) { return e.sequence < state.next_sequence; });
}

Reply Authority::on(const QueryAccountMsg& m) {
    AccountView view;
    if (const auto* a = account(m.id)) {
        view.exists = true;
        view.owner = a->owner;
        view.next_sequence = a->next_sequence;
        view.balance = a->balance;
        view.pending = a->pending;
    }
    return view;
}

// ---------------------------------------------------------------------------
// Consensus service

Reply Authority::on(const ProposalMsg& m) {
    const AccountId& swid = m.proposal.value.swid;
    auto& s = shard(swid);
    auto it = s.swaps.find(swid);
    if (it == s.swaps.end()) return error_reply(Error::UnknownInstance);
    SwapContext ctx{config_.committee, now_, config_.swap, config_.rules};
    if (auto st = handle_proposal(it->second, ctx, m.proposal, m.lock1, m.lock2); !st) {
        return error_reply(st.error());
    }
    return vote_reply(sign(PreCommit{m.proposal.value}));
}

Reply Authority::on(const PreCommitMsg& m) {
    const AccountId& swid = m.certificate.value.proposal.swid;
    auto& s = shard(swid);
    auto it = s.swaps.find(swid);
    if (it == s.swaps.end()) return error_reply(Error::UnknownInstance);
    SwapContext ctx{config_.committee, now_, config_.swap, config_.rules};
    if (auto st = handle_pre_commit(it->second, ctx, m.certificate); !st) return error_reply(st.error());
    return vote_reply(sign(Commit{m.certificate.value.proposal}));
}

Reply Authority::on(const CommitMsg& m) {
    const Proposal& p = m.certificate.value.proposal;
    auto& s = shard(p.swid);
    auto it = s.swaps.find(p.swid);
    const SwapInstance* inst = it == s.swaps.end() ? nullptr : &it->second;
    const bool deleted = s.deleted_swaps.contains(p.swid);
    if (!inst && !deleted && p.decision == Decision::Confirm) {
        // Not created here yet: a Confirm cannot be applied without the
        // instance, so let the sender retry once InitInstance has arrived.
        if (!check_certificate(config_.committee, m.certificate)) return error_reply(Error::BadCertificate);
        return error_reply(Error::UnknownInstance);
    }
    auto effects = commit_effects(inst, config_.committee, m.certificate, m.lock1, m.lock2);
    if (!effects) return error_reply(effects.error());
    for (auto& e : *effects) {
        AccountId target = e.target;
        emit(std::move(target), std::move(e));
    }
    if (inst) s.swaps.erase(it);
    auto& tomb = s.deleted_swaps[p.swid];
    if (!tomb) tomb = m.certificate;
    return Ack{};
}

Reply Authority::on(const QueryInstanceMsg& m) {
    InstanceView view;
    const auto& s = shard(m.swid);
    if (auto it = s.swaps.find(m.swid); it != s.swaps.end()) {
        view.exists = true;
        view.proposed = it->second.proposed;
        view.locked = it->second.locked;
    }
    if (auto it = s.deleted_swaps.find(m.swid); it != s.deleted_swaps.end()) view.decided = it->second;
    return view;
}

// ---------------------------------------------------------------------------
// Assets

Reply Authority::on(const AssetRequestMsg& m) {
    const AssetRequest& r = m.request.value;
    auto& s = shard(r.id);
    auto it = s.accounts.find(r.id);
    if (it == s.accounts.end()) {
        return error_reply(s.deactivated.contains(r.id) ? Error::InactiveAccount : Error::UnknownAccount);
    }
    const AccountState& state = it->second;
    if (!state.active()) return error_reply(Error::InactiveAccount);
    if (*state.owner != m.request.key || !m.request.verify()) return error_reply(Error::BadAuth);
    if (r.sequence != state.next_sequence) return error_reply(Error::SequenceMismatch);
    return vote_reply(sign(AssetBinding{r.id, r.data}));
}

Reply Authority::on(const SpendMsg& m) {
    const Request& r = m.spend.value;
    const auto* spend = std::get_if<Spend>(&r.operation);
    if (!spend) return error_reply(Error::BadValue);
    const auto& inputs = m.transmute.inputs;
    if (std::none_of(inputs.begin(), inputs.end(), [&](const Asset& a) { return a.value.id == r.id; })) {
        return error_reply(Error::BadAsset);
    }
    if (deactivated(r.id)) return error_reply(Error::InputInactive);
    if (spend->commitment != transmute_commitment(m.transmute)) return error_reply(Error::CommitmentMismatch);
    if (auto st = check_transmute(config_.committee, *config_.registry, m.transmute); !st) {
        return error_reply(st.error());
    }
    return vote_on_request(m.spend);
}

Reply Authority::on(const OutputBindingMsg& m) {
    auto outputs = transmute_outputs(config_.committee, *config_.registry, m.transmute, m.spends);
    if (!outputs) return error_reply(outputs.error());
    const Digest origin = transmute_commitment(m.transmute);
    VotesReply reply;
    for (std::size_t t = 0; t < outputs->size(); ++t) {
        const AssetBinding& b = (*outputs)[t];
        reply.votes.push_back(sign(b));
        emit(b.id, OpenOutputEffect{b.id, m.transmute.output_owners[t], origin});
    }
    return reply;
}

// ---------------------------------------------------------------------------
// Auctions

Reply Authority::on(const OpenAuctionMsg& m) {
    const auto& cert = m.lock;
    if (!check_certificate(config_.committee, cert)) return error_reply(Error::BadCertificate);
    const auto* open = std::get_if<OpenAuction>(&cert.value.operation);
    if (!open || cert.value.kind != RequestKind::Lock) return error_reply(Error::BadValue);
    auto& s = shard(open->auction_id);
    if (s.auctions.contains(open->auction_id)) return Ack{};

    AuctionState a;
    a.id = open->auction_id;
    a.item = cert.value.id;
    a.item_sequence = cert.value.sequence;
    a.rule = open->rule;
    a.payout = open->payout;
    a.seller = open->seller;
    a.opened = cert;
    s.auctions.emplace(a.id, std::move(a));
    // Escrow lives under the auction id and has no owner key.
    s.accounts.try_emplace(open->auction_id, init_account(std::nullopt));
    return Ack{};
}

Reply Authority::on(const SubmitBidMsg& m) {
    const BidSubmission& bid = m.bid;
    auto& s = shard(bid.auction_id);
    auto it = s.auctions.find(bid.auction_id);
    if (it == s.auctions.end()) return error_reply(Error::UnknownAuction);
    AuctionState& a = it->second;
    if (a.phase != AuctionPhase::Bidding) return error_reply(Error::WrongPhase);
    if (bid.deposit <= 0) return error_reply(Error::BadEvidence);

    const Request& r = m.deposit.value;
    const auto* t = std::get_if<Transfer>(&r.operation);
    if (!t || r.kind != RequestKind::Execute || t->recipient != a.id || t->amount != bid.deposit ||
        r.id != bid.bidder || m.deposit.value_digest() != bid.deposit_certificate) {
        return error_reply(Error::BadEvidence);
    }
    if (!check_certificate(config_.committee, m.deposit)) return error_reply(Error::BadEvidence);
    if (bid.ciphertext.label != bid_label(a.id) || !tpke::is_well_formed(bid.ciphertext)) {
        return error_reply(Error::BadEvidence);
    }
    auto [pos, inserted] = a.bids.emplace(bid.deposit_certificate, bid);
    if (!inserted && pos->second != bid) return error_reply(Error::AlreadyExists);
    return vote_reply(sign(bid));
}

Reply Authority::on(const EndOfBiddingMsg& m) {
    const EndOfBidding& eob = m.request.value;
    auto& s = shard(eob.auction_id);
    auto it = s.auctions.find(eob.auction_id);
    if (it == s.auctions.end()) return error_reply(Error::UnknownAuction);
    AuctionState& a = it->second;
    if (m.request.key != a.seller || !m.request.verify()) return error_reply(Error::NotSeller);

    std::map<Digest, BidSubmission> certified;
    for (const auto& c : m.bids) {
        if (c.value.auction_id != a.id || !check_certificate(config_.committee, c)) {
            return error_reply(Error::BadBidCert);
        }
        certified.emplace(c.value_digest(), c.value);
    }
    // The listed bids must be exactly the certified ones, in digest order.
    if (eob.bids.size() != certified.size()) return error_reply(Error::BadBidCert);
    std::size_t i = 0;
    for (const auto& [_, b] : certified) {
        if (eob.bids[i++] != b) return error_reply(Error::BadBidCert);
    }

    const Digest d = payload_digest(eob);
    if (a.end_of_bidding) {
        if (*a.end_of_bidding != d) return error_reply(Error::WrongPhase);
        return vote_reply(sign(eob));
    }
    if (a.phase != AuctionPhase::Bidding) return error_reply(Error::WrongPhase);
    a.end_of_bidding = d;
    a.phase = AuctionPhase::Revealing;
    return vote_reply(sign(eob));
}

Reply Authority::on(const RequestSharesMsg& m) {
    const auto& closing = m.closing;
    if (!check_certificate(config_.committee, closing)) return error_reply(Error::BadCertificate);
    auto& s = shard(closing.value.auction_id);
    auto it = s.auctions.find(closing.value.auction_id);
    if (it == s.auctions.end()) return error_reply(Error::UnknownAuction);
    if (!config_.tpke) return error_reply(Error::BadThreshold);
    AuctionState& a = it->second;
    if (a.phase == AuctionPhase::Bidding) a.phase = AuctionPhase::Revealing;

    // Shares are deterministic, so a repeated query yields identical bytes.
    SharesReply reply;
    for (const auto& b : closing.value.bids) {
        reply.shares.push_back(tpke::share_decrypt(config_.tpke->public_key, config_.tpke->share, b.ciphertext));
    }
    return reply;
}

Reply Authority::on(const EndOfAuctionMsg& m) {
    const EndOfAuction& eoa = m.request.value;
    auto& s = shard(eoa.auction_id);
    auto it = s.auctions.find(eoa.auction_id);
    if (it == s.auctions.end()) return error_reply(Error::UnknownAuction);
    AuctionState& a = it->second;
    if (m.request.key != a.seller || !m.request.verify()) return error_reply(Error::NotSeller);
    if (!config_.tpke) return error_reply(Error::BadThreshold);
    const auto& closing = m.closing;
    if (closing.value.auction_id != a.id || !check_certificate(config_.committee, closing) ||
        eoa.end_of_bidding != closing.value_digest()) {
        return error_reply(Error::BadCertificate);
    }
    const auto& bids = closing.value.bids;
    if (eoa.outcomes.size() != bids.size() || m.shares.size() != bids.size()) {
        return error_reply(Error::DecryptionMismatch);
    }
    const auto& pk = config_.tpke->public_key;
    const auto& vk = config_.tpke->verification_key;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (eoa.outcomes[i].bid != payload_digest(bids[i])) return error_reply(Error::DecryptionMismatch);
        std::vector<tpke::DecryptionShare> shares = m.shares[i];
        shares.push_back(tpke::share_decrypt(pk, config_.tpke->share, bids[i].ciphertext));
        std::set<std::uint32_t> valid;
        for (const auto& sh : shares) {
            if (tpke::share_verify(pk, vk, bids[i].ciphertext, sh)) valid.insert(sh.index);
        }
        if (valid.size() < pk.threshold) return error_reply(Error::DecryptionMismatch);
        if (tpke::combine(pk, vk, bids[i].ciphertext, shares) != eoa.outcomes[i].value) {
            return error_reply(Error::DecryptionMismatch);
        }
    }

    if (a.phase == AuctionPhase::Bidding) a.phase = AuctionPhase::Revealing;
    const Digest d = payload_digest(eoa);
    if (a.end_of_auction && *a.end_of_auction != d) return error_reply(Error::WrongPhase);
    a.end_of_auction = d;
    return vote_reply(sign(eoa));
}

Reply Authority::on(const SettleMsg& m) {
    const auto& result = m.result;
    const auto& closing = m.closing;
    if (!check_certificate(config_.committee, result) || !check_certificate(config_.committee, closing) ||
        result.value.end_of_bidding != closing.value_digest() ||
        result.value.auction_id != closing.value.auction_id ||
        result.value.outcomes.size() != closing.value.bids.size()) {
        return error_reply(Error::BadCertificate);
    }
    auto& s = shard(result.value.auction_id);
    auto it = s.auctions.find(result.value.auction_id);
    if (it == s.auctions.end()) return error_reply(Error::UnknownAuction);
    AuctionState& a = it->second;
    if (a.phase == AuctionPhase::Settled || a.result) return Ack{};
    if (a.phase == AuctionPhase::Bidding) a.phase = AuctionPhase::Revealing;
    a.closing = closing;
    a.result = result;
    try_settle(a);
    return Ack{};
}

Reply Authority::on(const QueryAuctionMsg& m) {
    AuctionView view;
    if (const auto* a = auction(m.auction_id)) {
        view.exists = true;
        view.phase = a->phase;
        view.accepted_bids = static_cast<std::uint32_t>(a->bids.size());
    }
    return view;
}

void Authority::try_settle(AuctionState& a) {
    if (a.phase == AuctionPhase::Settled || !a.result || !a.closing) return;
    auto& s = shard(a.id);
    auto& escrow = s.accounts.at(a.id);
    const auto& bids = a.closing->value.bids;

    // Wait until every included deposit has reached escrow here.
    for (const auto& b : bids) {
        if (!escrow.applied_credits.contains(credit_key(b.deposit_certificate, 0, a.id))) return;
    }

    std::vector<SettlementBid> input;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        input.push_back(SettlementBid{bids[i].bidder, bids[i].deposit, a.result->value.outcomes[i].value});
    }
    const SettlementOutcome outcome = settle_bids(input, a.rule);
    const AnyCertificate cert = *a.result;

    std::set<Digest> included;
    for (std::size_t i = 0; i < bids.size(); ++i) {
        included.insert(bids[i].deposit_certificate);
        const Amount refund = outcome.refunds[i];
        if (refund > 0) {
            escrow.balance -= refund;
            emit(bids[i].bidder, CreditEffect{bids[i].bidder, refund, a.id, cert, static_cast<std::uint32_t>(i)});
        }
    }
    if (outcome.price > 0) {
        escrow.balance -= outcome.price;
        emit(a.payout, CreditEffect{a.payout, outcome.price, a.id, cert, static_cast<std::uint32_t>(bids.size())});
    }
    // Deposits the seller left out go back in full.
    for (const auto& r : escrow.received) {
        const auto* rc = std::get_if<RequestCertificate>(&r);
        if (!rc) continue;
        const auto* t = std::get_if<Transfer>(&rc->value.operation);
        if (!t || included.contains(rc->value_digest())) continue;
        escrow.balance -= t->amount;
        emit(rc->value.id, CreditEffect{rc->value.id, t->amount, a.id, r, kRefundIndex});
    }

    std::optional<PublicKey> new_owner;
    if (outcome.winner) new_owner = bids[*outcome.winner].item_key;
    emit(a.item, UnlockEffect{a.item, a.item_sequence, new_owner, cert});
    a.phase = AuctionPhase::Settled;
    a.bids.clear();
}

void Authority::refund_late_credit(const AccountId& escrow_id, const CreditEffect& e) {
    auto& escrow = shard(escrow_id).accounts.at(escrow_id);
    escrow.balance -= e.amount;
    emit(e.source, CreditEffect{e.source, e.amount, escrow_id, e.certificate, e.index | kRefundIndex});
}

// ---------------------------------------------------------------------------
// Cross-shard effects

void Authority::apply(const CrossShardRequest& request) {
    std::visit([&](const auto& e) { on_effect(request.target, e); }, request.effect);
}

void Authority::on_effect(const AccountId& target, const InitAccountEffect& e) {
    auto& s = shard(target);
    if (s.deactivated.contains(target)) return;
    auto [it, inserted] = s.accounts.try_emplace(target, init_account(e.key));
    // Credits may have auto-created the account first; the derived id can
    // only ever be opened by this one certificate.
    if (!inserted && !it->second.owner && it->second.next_sequence == 0) it->second.owner = e.key;
}

void Authority::on_effect(const AccountId& target, const CreditEffect& e) {
    auto& s = shard(target);
    if (s.deactivated.contains(target)) {
        warn("credit to deactivated account " + target.to_string() + " dropped");
        return;
    }
    auto [it, _] = s.accounts.try_emplace(target, init_account(std::nullopt));
    AccountState& state = it->second;
    if (!state.applied_credits.insert(e.dedup_key()).second) return;
    state.balance += e.amount;
    state.received.push_back(e.certificate);

    if (auto a = s.auctions.find(target); a != s.auctions.end()) {
        if (a->second.phase == AuctionPhase::Settled) {
            refund_late_credit(target, e);
        } else {
            try_settle(a->second);
        }
    }
}

void Authority::on_effect(const AccountId& target, const InitInstanceEffect& e) {
    auto& s = shard(target);
    if (s.swaps.contains(target) || s.deleted_swaps.contains(target)) return;
    s.swaps.emplace(target, init_instance(e, now_));
}

void Authority::on_effect(const AccountId& target, const UnlockEffect& e) {
    auto& s = shard(target);
    auto it = s.accounts.find(target);
    if (it == s.accounts.end()) return;
    AccountState& state = it->second;
    if (state.next_sequence > e.sequence) return;
    if (state.next_sequence < e.sequence) {
        if (std::find(state.deferred_unlocks.begin(), state.deferred_unlocks.end(), e) == state.deferred_unlocks.end()) {
            state.deferred_unlocks.push_back(e);
        }
        return;
    }
    state.next_sequence = e.sequence + 1;
    state.pending.reset();
    if (e.new_key) state.owner = *e.new_key;
    state.confirmed.push_back(e.certificate);
    run_deferred(target, state);
}

void Authority::on_effect(const AccountId& target, const OpenOutputEffect& e) {
    auto& s = shard(target);
    if (s.deactivated.contains(target)) return;
    s.accounts.try_emplace(target, init_account(e.key));
}

// ---------------------------------------------------------------------------
// Snapshots

nlohmann::ordered_json Authority::snapshot(bool consistency_only) const {
    using J = nlohmann::ordered_json;
    std::map<AccountId, const AccountState*> accounts;
    std::set<AccountId> deactivated_ids;
    std::map<AccountId, const SwapInstance*> swaps;
    std::map<AccountId, const std::optional<CommitCertificate>*> deleted;
    std::map<AccountId, const AuctionState*> auctions;
    for (const auto& s : shards_) {
        for (const auto& [id, a] : s.accounts) accounts.emplace(id, &a);
        deactivated_ids.insert(s.deactivated.begin(), s.deactivated.end());
        for (const auto& [id, w] : s.swaps) swaps.emplace(id, &w);
        for (const auto& [id, c] : s.deleted_swaps) deleted.emplace(id, &c);
        for (const auto& [id, a] : s.auctions) auctions.emplace(id, &a);
    }

    J out;
    if (!consistency_only) {
        out["authority"] = config_.index;
        out["behavior"] = honest() ? "honest" : "arbitrary_signer";
    }
    J accs = J::array();
    for (const auto& [id, a] : accounts) {
        J j;
        j["id"] = id.to_string();
        j["owner"] = optional_key(a->owner);
        j["next_sequence"] = a->next_sequence;
        j["balance"] = a->balance;
        if (!consistency_only) {
            j["pending"] = a->pending ? J(to_hex(payload_digest(*a->pending))) : J(nullptr);
            j["deferred_unlocks"] = a->deferred_unlocks.size();
        }
        J confirmed = J::array();
        for (const auto& c : a->confirmed) confirmed.push_back(to_hex(value_digest(c)));
        j["confirmed"] = confirmed;
        // Arrival order differs between authorities; the set does not.
        std::vector<std::string> received;
        for (const auto& k : a->applied_credits) received.push_back(to_hex(k));
        std::sort(received.begin(), received.end());
        j["received"] = received;
        accs.push_back(std::move(j));
    }
    out["accounts"] = std::move(accs);
    J deact = J::array();
    for (const auto& id : deactivated_ids) deact.push_back(id.to_string());
    out["deactivated"] = std::move(deact);
    if (consistency_only) return out;

    J inst = J::array();
    for (const auto& [id, w] : swaps) {
        J j;
        j["swid"] = id.to_string();
        j["accounts"] = {w->ids[0].to_string(), w->ids[1].to_string()};
        j["sequences"] = {w->sequences[0], w->sequences[1]};
        j["keys"] = {optional_key(w->keys[0]), optional_key(w->keys[1])};
        if (w->proposed) {
            j["proposed"] = {{"round", w->proposed->round}, {"decision", to_string(w->proposed->decision)}};
        } else {
            j["proposed"] = nullptr;
        }
        if (w->locked) {
            const auto& p = w->locked->value.proposal;
            j["locked"] = {{"round", p.round}, {"decision", to_string(p.decision)}};
        } else {
            j["locked"] = nullptr;
        }
        inst.push_back(std::move(j));
    }
    out["instances"] = std::move(inst);
    J dels = J::array();
    for (const auto& [id, c] : deleted) {
        J j;
        j["swid"] = id.to_string();
        j["decision"] = *c ? J(to_string((*c)->value.proposal.decision)) : J(nullptr);
        dels.push_back(std::move(j));
    }
    out["deleted_instances"] = std::move(dels);
    J aucs = J::array();
    for (const auto& [id, a] : auctions) {
        J j;
        j["auction"] = id.to_string();
        j["item"] = a->item.to_string();
        j["phase"] = to_string(a->phase);
        j["rule"] = a->rule == PriceRule::FirstPrice ? "first_price" : "second_price";
        j["accepted_bids"] = a->bids.size();
        aucs.push_back(std::move(j));
    }
    out["auctions"] = std::move(aucs);
    return out;
}

}  // namespace bftswap
