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

#include "bftswap/simulator.hpp"

#include <algorithm>

namespace bftswap {

const char* to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::Honest: return "honest";
        case FaultKind::Crash: return "crash";
        case FaultKind::WithholdVotes: return "withhold_votes";
        case FaultKind::ArbitrarySigner: return "arbitrary_signer";
    }
    return "unknown";
}

namespace {

KeyPair authority_key(AuthorityIndex i) { return KeyPair::derive("bftswap/authority/" + std::to_string(i)); }

}  // namespace

Simulator::Simulator(const SimSetup& setup) : setup_(setup), rng_(setup.seed) {
    if (setup_.shard_count == 0) throw ConfigError("shard_count must be positive");
    std::vector<PublicKey> keys;
    for (AuthorityIndex i = 0; i < setup_.n; ++i) keys.push_back(authority_key(i).public_key());
    committee_ = Committee(std::move(keys));

    std::size_t byzantine = 0;
    for (const auto& [i, fault] : setup_.faults) {
        if (i >= setup_.n) throw ConfigError("fault assigned to unknown authority " + std::to_string(i));
        if (fault.kind != FaultKind::Honest) ++byzantine;
        if (fault.kind == FaultKind::WithholdVotes && (fault.p < 0.0 || fault.p > 1.0)) {
            throw ConfigError("withhold probability must be in [0, 1]");
        }
    }
    if (byzantine > committee_.max_faults() && !setup_.allow_excess_faults) throw ConfigError("more faulty authorities than f");
    const auto& net = setup_.network;
    if (net.min_delay == 0 || net.max_delay < net.min_delay || net.post_gst_max_delay < net.min_delay) {
        throw ConfigError("network delays must satisfy 0 < min_delay <= max_delay, post_gst_max_delay");
    }
    if (net.drop < 0.0 || net.drop >= 1.0 || net.duplicate < 0.0 || net.duplicate >= 1.0) {
        throw ConfigError("drop and duplicate probabilities must be in [0, 1)");
    }

    const std::uint32_t threshold =
        setup_.tpke_threshold == 0 ? static_cast<std::uint32_t>(committee_.validity_threshold()) : setup_.tpke_threshold;
    SeededRng tpke_rng(setup_.seed ^ 0x7470'6b65'0000'0001ULL);
    auto system = tpke::setup(setup_.n, threshold, tpke_rng);
    if (!system) throw ConfigError("invalid threshold encryption parameters");

    auto registry = std::make_shared<const ExecutionRegistry>(ExecutionRegistry::builtin());
    for (AuthorityIndex i = 0; i < setup_.n; ++i) {
        tpke_.push_back(TpkeMaterial{system->public_key, system->verification_key, system->key_shares[i]});
        AuthorityConfig cfg;
        cfg.index = i;
        cfg.committee = committee_;
        cfg.key = authority_key(i);
        cfg.shard_count = setup_.shard_count;
        cfg.swap = setup_.swap;
        cfg.rules = setup_.rules;
        cfg.registry = registry;
        cfg.tpke = tpke_.back();
        cfg.genesis = setup_.genesis;
        auto f = setup_.faults.find(i);
        if (f != setup_.faults.end() && f->second.kind == FaultKind::ArbitrarySigner) {
            cfg.behavior = AuthorityBehavior::ArbitrarySigner;
        }
        auto a = std::make_unique<Authority>(std::move(cfg));
        a->set_sign_observer([this](const SignRecord& r) {
            trace_.record(now_, r.signer, TraceKind::Sign, to_bytes(r));
        });
        a->set_log_sink([this, i](const std::string& text) { note(i, text); });
        authorities_.push_back(std::move(a));
        names_.push_back("authority-" + std::to_string(i));
    }

    for (const auto& [i, fault] : setup_.faults) {
        if (fault.kind != FaultKind::Crash) continue;
        const AuthorityIndex who = i;
        schedule(fault.at, [this, who] { trace_.record(now_, who, TraceKind::Crash, {}); });
    }
}

bool Simulator::honest(AuthorityIndex i) const {
    auto it = setup_.faults.find(i);
    return it == setup_.faults.end() || it->second.kind == FaultKind::Honest;
}

bool Simulator::crashed(AuthorityIndex i) const {
    auto it = setup_.faults.find(i);
    return it != setup_.faults.end() && it->second.kind == FaultKind::Crash;
}

bool Simulator::live(AuthorityIndex i) const {
    auto it = setup_.faults.find(i);
    return it == setup_.faults.end() || it->second.kind != FaultKind::Crash || now_ < it->second.at;
}

std::vector<AuthorityIndex> Simulator::honest_authorities() const {
    std::vector<AuthorityIndex> out;
    for (AuthorityIndex i = 0; i < size(); ++i) {
        if (honest(i)) out.push_back(i);
    }
    return out;
}

ActorId Simulator::add_client(const std::string& name) {
    names_.push_back(name);
    return static_cast<ActorId>(names_.size() - 1);
}

void Simulator::schedule(Time at, std::function<void()> fn) {
    queue_.push(Event{at, next_seq_++, std::move(fn)});
}

void Simulator::after(Time delay, std::function<void()> fn) { schedule(now_ + delay, std::move(fn)); }

Time Simulator::sample_delay(bool internal) {
    const auto& net = setup_.network;
    const Time hi = now_ < net.gst ? net.max_delay : net.post_gst_max_delay;
    const Time lo = internal ? 1 : net.min_delay;
    return lo + rng_() % (hi - lo + 1);
}

bool Simulator::partitioned(ActorId a, ActorId b, Time t) const {
    for (const auto& p : setup_.network.partitions) {
        if (t < p.start || t >= p.end) continue;
        if (p.group.contains(a) != p.group.contains(b)) return true;
    }
    return false;
}

void Simulator::transmit(ActorId from, ActorId to, NetMessage msg, bool internal) {
    const bool pre_gst = now_ < setup_.network.gst;
    Bytes bytes = setup_.record_payloads ? to_bytes(msg) : Bytes{};
    if (setup_.record_payloads) trace_.record(now_, from, TraceKind::Send, bytes);

    bool lost = !internal && partitioned(from, to, now_);
    if (!internal && pre_gst && rand_unit() < setup_.network.drop) lost = true;
    if (lost) {
        if (setup_.record_payloads) trace_.record(now_, to, TraceKind::Drop, std::move(bytes));
        return;
    }
    int copies = 1;
    if (pre_gst && rand_unit() < setup_.network.duplicate) copies = 2;
    for (int c = 0; c < copies; ++c) {
        const Time at = now_ + sample_delay(internal);
        schedule(at, [this, to, msg] { deliver(to, msg); });
    }
}

void Simulator::deliver(ActorId to, const NetMessage& msg) {
    if (to < size() && !live(to)) return;
    if (setup_.record_payloads) trace_.record(now_, to, TraceKind::Deliver, to_bytes(msg));

    if (const auto* env = std::get_if<Envelope>(&msg)) {
        Authority& a = *authorities_[to];
        a.set_clock(now_);
        Reply reply = a.handle(env->message);
        drain(to);
        auto f = setup_.faults.find(to);
        if (f != setup_.faults.end() && f->second.kind == FaultKind::WithholdVotes &&
            std::holds_alternative<VotesReply>(reply) && rand_unit() < f->second.p) {
            return;
        }
        transmit(to, env->from, ReplyEnvelope{env->rpc, to, std::move(reply)}, false);
    } else if (const auto* rep = std::get_if<ReplyEnvelope>(&msg)) {
        auto it = rpcs_.find(rep->rpc);
        if (it == rpcs_.end()) return;  // duplicate
        ReplyHandler handler = std::move(it->second);
        rpcs_.erase(it);
        handler(rep->from, rep->reply);
    } else {
        const auto& internal = std::get<InternalEnvelope>(msg);
        Authority& a = *authorities_[to];
        a.set_clock(now_);
        a.apply(internal.request);
        drain(to);
    }
}

void Simulator::drain(AuthorityIndex i) {
    for (auto& request : authorities_[i]->take_outbox()) {
        if (setup_.record_payloads) trace_.record(now_, i, TraceKind::CrossShard, to_bytes(request));
        transmit(i, i, InternalEnvelope{std::move(request)}, true);
    }
}

void Simulator::call(ActorId client, AuthorityIndex to, const ClientMessage& msg, ReplyHandler on_reply) {
    const std::uint64_t rpc = next_rpc_++;
    rpcs_.emplace(rpc, std::move(on_reply));
    transmit(client, to, Envelope{rpc, client, msg}, false);
}

RunSummary Simulator::run(Time until) {
    RunSummary s;
    while (!queue_.empty() && queue_.top().time <= until) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        ev.fn();
        ++s.events;
    }
    s.quiescent = queue_.empty();
    s.end_time = now_;
    return s;
}

void Simulator::sync(std::size_t max_passes) {
    std::vector<AuthorityIndex> targets;
    for (AuthorityIndex i : honest_authorities()) targets.push_back(i);
    for (const auto& msg : replayable_) trace_.record(now_, 0, TraceKind::Sync, to_bytes(msg));

    for (AuthorityIndex i : targets) {
        Authority& a = *authorities_[i];
        a.set_clock(now_);
        std::string before = a.snapshot().dump();
        for (std::size_t pass = 0; pass < max_passes; ++pass) {
            for (const auto& msg : replayable_) {
                (void)a.handle(msg);
                while (!a.outbox_empty()) {
                    for (const auto& r : a.take_outbox()) a.apply(r);
                }
            }
            std::string after = a.snapshot().dump();
            if (after == before) break;
            before = std::move(after);
        }
    }
}

void Simulator::record_certificate(ActorId client, const TracedCertificate& cert) {
    trace_.record(now_, client, TraceKind::Certificate, to_bytes(cert));
}

void Simulator::record_client_proposal(ActorId client, const AuthenticatedProposal& p) {
    trace_.record(now_, client, TraceKind::ClientSign, to_bytes(p));
}

void Simulator::note(ActorId actor, const std::string& text) {
    trace_.record(now_, actor, TraceKind::Note, Bytes(text.begin(), text.end()));
}

void Simulator::add_replayable(const ClientMessage& msg) {
    if (replayable_seen_.insert(sha256(to_bytes(msg))).second) replayable_.push_back(msg);
}

}  // namespace bftswap
