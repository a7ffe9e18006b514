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

// Client-to-authority requests and their replies.
#pragma once

#include "bftswap/assets.hpp"
#include "bftswap/auction.hpp"
#include "bftswap/committee.hpp"
#include "bftswap/tpke.hpp"
#include "bftswap/types.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace bftswap {

// Account service.
struct RequestMsg {
    AuthenticatedRequest request;
    BFTSWAP_FIELDS(request)
};

struct ConfirmationMsg {
    RequestCertificate certificate;
    BFTSWAP_FIELDS(certificate)
};

struct QueryAccountMsg {
    AccountId id;
    BFTSWAP_FIELDS(id)
};

// Consensus service.
struct ProposalMsg {
    AuthenticatedProposal proposal;
    std::optional<RequestCertificate> lock1;
    std::optional<RequestCertificate> lock2;
    BFTSWAP_FIELDS(proposal, lock1, lock2)
};

struct PreCommitMsg {
    PreCommitCertificate certificate;
    BFTSWAP_FIELDS(certificate)
};

struct CommitMsg {
    CommitCertificate certificate;
    std::optional<RequestCertificate> lock1;
    std::optional<RequestCertificate> lock2;
    BFTSWAP_FIELDS(certificate, lock1, lock2)
};

struct QueryInstanceMsg {
    AccountId swid;
    BFTSWAP_FIELDS(swid)
};

// Assets.
struct AssetRequestMsg {
    Authenticated<AssetRequest> request;
    BFTSWAP_FIELDS(request)
};

// Spend of one transmutation input; the authority checks the whole
// transmutation before voting.
struct SpendMsg {
    AuthenticatedRequest spend;
    TransmuteRequest transmute;
    BFTSWAP_FIELDS(spend, transmute)
};

struct OutputBindingMsg {
    TransmuteRequest transmute;
    std::vector<RequestCertificate> spends;
    BFTSWAP_FIELDS(transmute, spends)
};

// Auctions.
struct OpenAuctionMsg {
    RequestCertificate lock;
    BFTSWAP_FIELDS(lock)
};

struct SubmitBidMsg {
    BidSubmission bid;
    RequestCertificate deposit;
    BFTSWAP_FIELDS(bid, deposit)
};

struct EndOfBiddingMsg {
    Authenticated<EndOfBidding> request;
    std::vector<BidCertificate> bids;
    BFTSWAP_FIELDS(request, bids)
};

struct RequestSharesMsg {
    EndOfBiddingCertificate closing;
    BFTSWAP_FIELDS(closing)
};

struct EndOfAuctionMsg {
    Authenticated<EndOfAuction> request;
    EndOfBiddingCertificate closing;
    std::vector<std::vector<tpke::DecryptionShare>> shares;  // per bid
    BFTSWAP_FIELDS(request, closing, shares)
};

struct SettleMsg {
    EndOfAuctionCertificate result;
    EndOfBiddingCertificate closing;
    BFTSWAP_FIELDS(result, closing)
};

struct QueryAuctionMsg {
    AccountId auction_id;
    BFTSWAP_FIELDS(auction_id)
};

using ClientMessage =
    std::variant<RequestMsg, ConfirmationMsg, QueryAccountMsg, ProposalMsg, PreCommitMsg, CommitMsg, QueryInstanceMsg,
                 AssetRequestMsg, SpendMsg, OutputBindingMsg, OpenAuctionMsg, SubmitBidMsg, EndOfBiddingMsg,
                 RequestSharesMsg, EndOfAuctionMsg, SettleMsg, QueryAuctionMsg>;

const char* message_kind(const ClientMessage& msg);

// Replies.
struct Ack {
    BFTSWAP_FIELDS()
};

struct VotesReply {
    std::vector<Vote> votes;
    BFTSWAP_FIELDS(votes)
};

struct AccountView {
    bool exists = false;
    std::optional<PublicKey> owner;
    SequenceNumber next_sequence = 0;
    Amount balance = 0;
    std::optional<Request> pending;
    BFTSWAP_FIELDS(exists, owner, next_sequence, balance, pending)
};

struct InstanceView {
    bool exists = false;
    std::optional<Proposal> proposed;
    std::optional<PreCommitCertificate> locked;
    std::optional<CommitCertificate> decided;
    BFTSWAP_FIELDS(exists, proposed, locked, decided)
};

struct SharesReply {
    std::vector<tpke::DecryptionShare> shares;
    BFTSWAP_FIELDS(shares)
};

struct AuctionView {
    bool exists = false;
    AuctionPhase phase = AuctionPhase::Bidding;
    std::uint32_t accepted_bids = 0;
    BFTSWAP_FIELDS(exists, phase, accepted_bids)
};

struct ErrorReply {
    Error error = Error::BadValue;
    BFTSWAP_FIELDS(error)
};

using Reply = std::variant<Ack, VotesReply, AccountView, InstanceView, SharesReply, AuctionView, ErrorReply>;

inline Reply vote_reply(Vote v) { return VotesReply{{std::move(v)}}; }

}  // namespace bftswap
