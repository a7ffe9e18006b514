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
 * @file simulator.hpp
 *
 * Deterministic discrete-event simulation of a committee and its clients.
 *
 * Events run in (time, insertion order); every random choice comes from one
 * seeded generator, so (setup, seed) fixes the trace byte for byte. The
 * network is authenticated point-to-point without FIFO: before GST
 * messages may be delayed up to `max_delay`, dropped or duplicated; from
 * GST on, delays are bounded by `post_gst_max_delay` and nothing is lost.
 * Partitions drop traffic crossing a group boundary for a time window.
 * Cross-shard effects travel the same way, always delivered at least once.
 */
#pragma once

#include "bftswap/authority.hpp"
#include "bftswap/messages.hpp"
#include "bftswap/trace.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace bftswap {

struct Partition {
    Time start = 0;
    Time end = 0;
    std::set<AuthorityIndex> group;
};

struct NetworkConfig {
    Time min_delay = 5;
    Time max_delay = 100;
    double drop = 0.0;
    double duplicate = 0.0;
    Time gst = 0;
    Time post_gst_max_delay = 50;
    std::vector<Partition> partitions;
};

enum class FaultKind : std::uint8_t { Honest = 0, Crash = 1, WithholdVotes = 2, ArbitrarySigner = 3 };

struct AuthorityFault {
    FaultKind kind = FaultKind::Honest;
    Time at = 0;       // crash time
    double p = 0.0;    // withholding probability
};

const char* to_string(FaultKind kind);

struct Envelope {
    std::uint64_t rpc = 0;
    ActorId from = 0;
    ClientMessage message;
    BFTSWAP_FIELDS(rpc, from, message)
};

struct ReplyEnvelope {
    std::uint64_t rpc = 0;
    AuthorityIndex from = 0;
    Reply reply;
    BFTSWAP_FIELDS(rpc, from, reply)
};

struct InternalEnvelope {
    CrossShardRequest request;
    BFTSWAP_FIELDS(request)
};

using NetMessage = std::variant<Envelope, ReplyEnvelope, InternalEnvelope>;

struct SimSetup {
    std::uint64_t seed = 0;
    std::uint32_t n = 4;
    std::uint32_t shard_count = 4;
    NetworkConfig network;
    std::map<AuthorityIndex, AuthorityFault> faults;
    SwapParams swap;
    SafetyRules rules;
    std::vector<GenesisAccount> genesis;
    std::uint32_t tpke_threshold = 0;  // 0: f+1
    // Negative controls only: lets more than f authorities misbehave.
    bool allow_excess_faults = false;
    bool record_payloads = true;
};

struct RunSummary {
    bool quiescent = false;
    Time end_time = 0;
    std::uint64_t events = 0;
};

class Simulator {
public:
    explicit Simulator(const SimSetup& setup);

    Time now() const { return now_; }
    const SimSetup& setup() const { return setup_; }
    const Committee& committee() const { return committee_; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(authorities_.size()); }
    Authority& authority(AuthorityIndex i) { return *authorities_.at(i); }
    const Authority& authority(AuthorityIndex i) const { return *authorities_.at(i); }
    const TpkeMaterial& tpke(AuthorityIndex i) const { return tpke_.at(i); }
    const tpke::PublicKey& tpke_public_key() const { return tpke_.at(0).public_key; }
    const tpke::VerificationKey& tpke_verification_key() const { return tpke_.at(0).verification_key; }

    // Faulty means Byzantine or crashed at any point of the run.
    bool honest(AuthorityIndex i) const;
    bool crashed(AuthorityIndex i) const;
    std::vector<AuthorityIndex> honest_authorities() const;

    ActorId add_client(const std::string& name);
    const std::string& actor_name(ActorId a) const { return names_.at(a); }
    std::size_t actor_count() const { return names_.size(); }
    // Clients scripted to misbehave; audits of honest-client properties skip them.
    void mark_faulty_client(ActorId a) { faulty_clients_.insert(a); }
    const std::set<ActorId>& faulty_clients() const { return faulty_clients_; }

    using ReplyHandler = std::function<void(AuthorityIndex, const Reply&)>;
    void call(ActorId client, AuthorityIndex to, const ClientMessage& msg, ReplyHandler on_reply);

    void after(Time delay, std::function<void()> fn);

    // Runs until no event is left or the clock passes `until`.
    RunSummary run(Time until);

    // Redelivers every recorded certificate message to every honest
    // authority, directly and in recording order, until states stop
    // changing. Models the anti-entropy sync the comparison assumes.
    void sync(std::size_t max_passes = 64);

    Trace& trace() { return trace_; }
    const Trace& trace() const { return trace_; }

    void record_certificate(ActorId client, const TracedCertificate& cert);
    void record_client_proposal(ActorId client, const AuthenticatedProposal& p);
    void note(ActorId actor, const std::string& text);

    // Messages carrying certificates that every authority must eventually
    // process, in first-recorded order.
    void add_replayable(const ClientMessage& msg);
    const std::vector<ClientMessage>& replayable() const { return replayable_; }

    std::uint64_t rand_u64() { return rng_(); }
    double rand_unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

private:
    struct Event {
        Time time;
        std::uint64_t seq;
        std::function<void()> fn;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    void schedule(Time at, std::function<void()> fn);
    Time sample_delay(bool internal);
    bool partitioned(ActorId a, ActorId b, Time t) const;
    void transmit(ActorId from, ActorId to, NetMessage msg, bool internal);
    void deliver(ActorId to, const NetMessage& msg);
    void drain(AuthorityIndex i);
    bool live(AuthorityIndex i) const;

    SimSetup setup_;
    Committee committee_;
    std::vector<std::unique_ptr<Authority>> authorities_;
    std::vector<TpkeMaterial> tpke_;
    std::vector<std::string> names_;
    std::set<ActorId> faulty_clients_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_rpc_ = 1;
    std::map<std::uint64_t, ReplyHandler> rpcs_;
    std::mt19937_64 rng_;
    Time now_ = 0;
    Trace trace_;
    std::vector<ClientMessage> replayable_;
    std::set<Digest> replayable_seen_;
};

}  // namespace bftswap
