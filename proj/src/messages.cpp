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

#include "bftswap/messages.hpp"

namespace bftswap {

const char* message_kind(const ClientMessage& msg) {
    static constexpr const char* kNames[] = {
        "request",      "confirmation",   "query_account",  "proposal",       "pre_commit",    "commit",
        "query_instance", "asset_request", "spend",         "output_binding", "open_auction",  "submit_bid",
        "end_of_bidding", "request_shares", "end_of_auction", "settle",        "query_auction",
    };
    static_assert(std::size(kNames) == std::variant_size_v<ClientMessage>);
    return kNames[msg.index()];
}

}  // namespace bftswap
