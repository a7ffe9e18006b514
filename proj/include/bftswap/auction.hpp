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
 * @file auction.hpp
 *
 * Sealed-bid auctions with threshold-encrypted bids.
 *
 * The seller locks the item account with OpenAuction, which creates the
 * auction object and an escrow account under the auction id on the same
 * shard. Bidders transfer a deposit to escrow and submit the encrypted bid
 * with the transfer certificate. The seller closes bidding with a certified
 * list of bids, collects decryption shares, and obtains an end-of-auction
 * certificate over the decrypted values that every authority re-checks by
 * combining shares. Settlement then pays the seller out of the winner's
 * deposit, refunds everything else and hands the item account to the
 * winner's key.
 */
#pragma once

#include "bftswap/committee.hpp"
#include "bftswap/tpke.hpp"
#include "bftswap/types.hpp"

#include <map>
#include <optional>
#include <vector>

namespace bftswap {

enum class AuctionPhase : std::uint8_t { Bidding = 0, Revealing = 1, Settled = 2 };

const char* to_string(AuctionPhase phase);

struct SettlementBid {
    AccountId bidder;
    Amount deposit = 0;
    std::optional<std::uint64_t> value;
};

struct SettlementOutcome {
    std::optional<std::size_t> winner;
    Amount price = 0;
    std::vector<Amount> refunds;  // per bid, deposit minus the price for the winner
};

// A bid is eligible iff it decrypted and value <= deposit. Highest eligible
// value wins, ties to the smallest bidder id then the earliest position.
// FirstPrice pays the winning value; SecondPrice pays the best other
// eligible value, or 0 when there is none.
SettlementOutcome settle_bids(const std::vector<SettlementBid>& bids, PriceRule rule);

// Ciphertext label every bid for `auction_id` must carry.
Bytes bid_label(const AccountId& auction_id);

struct AuctionState {
    AccountId id;
    AccountId item;
    SequenceNumber item_sequence = 0;
    PriceRule rule = PriceRule::SecondPrice;
    AccountId payout;
    PublicKey seller{};
    AuctionPhase phase = AuctionPhase::Bidding;
    std::map<Digest, BidSubmission> bids;  // keyed by deposit certificate digest
    std::optional<Digest> end_of_bidding;
    std::optional<Digest> end_of_auction;
    std::optional<EndOfBiddingCertificate> closing;
    std::optional<EndOfAuctionCertificate> result;
    RequestCertificate opened;
};

}  // namespace bftswap
