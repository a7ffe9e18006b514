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
 * @file trace.hpp
 *
 * Simulation traces. A trace is an append-only list of
 * (time, actor, kind, payload digest) events in scheduler order; payload
 * bytes live once each in a content-addressed store next to it. Both files
 * are plain concatenations of canonically encoded records:
 *
 *   trace.bin     TraceEvent*
 *   messages.bin  (Digest, Bytes)*   in first-appearance order
 */
#pragma once

#include "bftswap/codec.hpp"
#include "bftswap/crypto.hpp"
#include "bftswap/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bftswap {

using ActorId = std::uint32_t;

enum class TraceKind : std::uint8_t {
    Send = 1,        // payload: NetMessage
    Deliver = 2,     // payload: NetMessage
    Drop = 3,        // payload: NetMessage
    CrossShard = 4,  // payload: CrossShardRequest, applied at `actor`
    Sign = 5,        // payload: SignRecord
    Certificate = 6, // payload: TracedCertificate formed by a client
    ClientSign = 7,  // payload: AuthenticatedProposal signed by a client
    Sync = 8,        // payload: ClientMessage redelivered at scenario end
    Note = 9,        // payload: UTF-8 text
    Crash = 10,      // payload: empty
};

const char* to_string(TraceKind kind);

struct TraceEvent {
    Time time = 0;
    ActorId actor = 0;
    TraceKind kind = TraceKind::Note;
    Digest payload{};

    BFTSWAP_FIELDS(time, actor, kind, payload)
    bool operator==(const TraceEvent&) const = default;
};

using TracedCertificate = std::variant<RequestCertificate, PreCommitCertificate, CommitCertificate, Asset,
                                       BidCertificate, EndOfBiddingCertificate, EndOfAuctionCertificate>;

class Trace {
public:
    void record(Time time, ActorId actor, TraceKind kind, Bytes payload);

    const std::vector<TraceEvent>& events() const { return events_; }
    const Bytes* payload(const Digest& d) const;

    Bytes encode_events() const;
    Bytes encode_store() const;
    static Trace decode(ByteSpan events, ByteSpan store);

private:
    std::vector<TraceEvent> events_;
    std::map<Digest, Bytes> store_;
    std::vector<Digest> order_;
};

}  // namespace bftswap
