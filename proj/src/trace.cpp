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

#include "bftswap/trace.hpp"

namespace bftswap {

const char* to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::Send: return "send";
        case TraceKind::Deliver: return "deliver";
        case TraceKind::Drop: return "drop";
        case TraceKind::CrossShard: return "cross_shard";
        case TraceKind::Sign: return "sign";
        case TraceKind::Certificate: return "certificate";
        case TraceKind::ClientSign: return "client_sign";
        case TraceKind::Sync: return "sync";
        case TraceKind::Note: return "note";
        case TraceKind::Crash: return "crash";
    }
    return "unknown";
}

void Trace::record(Time time, ActorId actor, TraceKind kind, Bytes payload) {
    const Digest d = sha256(payload);
    events_.push_back(TraceEvent{time, actor, kind, d});
    if (store_.emplace(d, std::move(payload)).second) order_.push_back(d);
}

const Bytes* Trace::payload(const Digest& d) const {
    auto it = store_.find(d);
    return it == store_.end() ? nullptr : &it->second;
}

Bytes Trace::encode_events() const {
    Encoder e;
    for (const auto& ev : events_) encode(e, ev);
    return e.take();
}

Bytes Trace::encode_store() const {
    Encoder e;
    for (const auto& d : order_) {
        e.raw(d);
        e.bytes(store_.at(d));
    }
    return e.take();
}

Trace Trace::decode(ByteSpan events, ByteSpan store) {
    Trace t;
    Decoder de(events);
    while (!de.done()) {
        TraceEvent ev;
        bftswap::decode(de, ev);
        t.events_.push_back(ev);
    }
    Decoder ds(store);
    while (!ds.done()) {
        Digest d{};
        ds.raw(d);
        Bytes b = ds.bytes();
        if (sha256(b) != d) throw DecodeError("message store entry does not match its digest");
        if (t.store_.emplace(d, std::move(b)).second) t.order_.push_back(d);
    }
    return t;
}

}  // namespace bftswap
