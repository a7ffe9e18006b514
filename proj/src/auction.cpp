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

#include "bftswap/auction.hpp"

namespace bftswap {

const char* to_string(AuctionPhase phase) {
    switch (phase) {
        case AuctionPhase::Bidding: return "Bidding";
        case AuctionPhase::Revealing: return "Revealing";
        case AuctionPhase::Settled: return "Settled";
    }
    return "Unknown";
}

SettlementOutcome settle_bids(const std::vector<SettlementBid>& bids, PriceRule rule) {
    SettlementOutcome out;
    out.refunds.reserve(bids.size());
    for (const auto& b : bids) out.refunds.push_back(b.deposit);

    auto eligible = [&](std::size_t i) {
        const auto& b = bids[i];
        return b.value && static_cast<Amount>(*b.value) <= b.deposit;
    };
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (!eligible(i)) continue;
        if (!out.winner) {
            out.winner = i;
            continue;
        }
        const auto& w = bids[*out.winner];
        if (*bids[i].value > *w.value || (*bids[i].value == *w.value && bids[i].bidder < w.bidder)) {
            out.winner = i;
        }
    }
    if (!out.winner) return out;

    const std::size_t w = *out.winner;
    if (rule == PriceRule::FirstPrice) {
        out.price = static_cast<Amount>(*bids[w].value);
    } else {
        for (std::size_t i = 0; i < bids.size(); ++i) {
            if (i == w || !eligible(i)) continue;
            out.price = std::max(out.price, static_cast<Amount>(*bids[i].value));
        }
    }
    out.refunds[w] -= out.price;
    return out;
}

Bytes bid_label(const AccountId& auction_id) {
    Encoder e;
    e.raw(ByteSpan(reinterpret_cast<const std::uint8_t*>("bftswap/bid"), 11));
    encode(e, auction_id);
    return e.take();
}

}  // namespace bftswap
