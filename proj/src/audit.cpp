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

#include "bftswap/audit.hpp"

#include "bftswap/authority.hpp"

#include <map>
#include <sstream>

namespace bftswap {

bool AuditReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed(); });
}

const AuditCheck* AuditReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

nlohmann::ordered_json AuditReport::to_json() const {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json j;
        j["check"] = c.name;
        j["passed"] = c.passed();
        if (!c.note.empty()) j["note"] = c.note;
        nlohmann::ordered_json vs = nlohmann::ordered_json::array();
        for (const auto& v : c.violations) {
            nlohmann::ordered_json jv;
            jv["event"] = v.event ? nlohmann::ordered_json(*v.event) : nlohmann::ordered_json(nullptr);
            jv["message"] = v.message;
            vs.push_back(std::move(jv));
        }
        j["violations"] = std::move(vs);
        out.push_back(std::move(j));
    }
    return out;
}

std::string AuditReport::to_text() const {
    std::ostringstream out;
    for (const auto& c : checks) {
        out << (c.passed() ? "PASS " : "FAIL ") << c.name;
        if (!c.note.empty()) out << " (" << c.note << ")";
        out << "\n";
        for (const auto& v : c.violations) {
            out << "    ";
            if (v.event) out << "event " << *v.event << ": ";
            out << v.message << "\n";
        }
    }
    return out.str();
}

nlohmann::ordered_json consistency_view(const nlohmann::ordered_json& snapshot) {
    nlohmann::ordered_json out;
    nlohmann::ordered_json accounts = nlohmann::ordered_json::array();
    if (snapshot.contains("accounts")) {
        for (const auto& a : snapshot["accounts"]) {
            nlohmann::ordered_json j;
            for (const auto& [k, v] : a.items()) {
                if (k == "pending" || k == "deferred_unlocks") continue;
                j[k] = v;
            }
            accounts.push_back(std::move(j));
        }
    }
    out["accounts"] = std::move(accounts);
    out["deactivated"] = snapshot.value("deactivated", nlohmann::ordered_json::array());
    return out;
}

namespace {

struct SignedValue {
    std::size_t event = 0;
    AuthorityIndex signer = 0;
    SignKind kind = SignKind::Test;
    Bytes value;
    Digest digest{};
};

Digest record_digest(const SignRecord& r) {
    Encoder e;
    e.u8(static_cast<std::uint8_t>(r.kind));
    e.raw(r.value);
    return sha256(e.data());
}

std::string describe(const Proposal& p) {
    return "(" + p.swid.to_string() + ", round " + std::to_string(p.round) + ", " + to_string(p.decision) + ")";
}

struct Decoded {
    std::vector<SignedValue> signs;
    std::vector<std::pair<std::size_t, TracedCertificate>> certificates;
    std::vector<std::pair<std::size_t, AuthenticatedProposal>> client_signs;
    std::vector<std::pair<std::size_t, ActorId>> client_sign_actors;
};

Decoded decode_trace(const Trace& trace) {
    Decoded d;
    const auto& events = trace.events();
    for (std::size_t i = 0; i < events.size(); ++i) {
        const TraceEvent& ev = events[i];
        const Bytes* payload = trace.payload(ev.payload);
        if (!payload) continue;
        switch (ev.kind) {
            case TraceKind::Sign: {
                auto r = from_bytes<SignRecord>(*payload);
                d.signs.push_back(SignedValue{i, r.signer, r.kind, r.value, record_digest(r)});
                break;
            }
            case TraceKind::Certificate:
                d.certificates.emplace_back(i, from_bytes<TracedCertificate>(*payload));
                break;
            case TraceKind::ClientSign:
                d.client_signs.emplace_back(i, from_bytes<AuthenticatedProposal>(*payload));
                d.client_sign_actors.emplace_back(i, ev.actor);
                break;
            default:
                break;
        }
    }
    return d;
}

template <typename T>
T decode_value(const SignedValue& s) {
    return from_bytes<T>(s.value);
}

std::size_t max_faults(std::size_t n) { return (n - 1) / 3; }
std::size_t quorum(std::size_t n) { return 2 * max_faults(n) + 1; }

std::vector<AuthorityIndex> honest_snapshots(const AuditInput& in) {
    std::vector<AuthorityIndex> out;
    for (AuthorityIndex i : in.honest) {
        if (i < in.snapshots.size() && !in.snapshots[i].is_null()) out.push_back(i);
    }
    return out;
}

std::map<std::string, const nlohmann::ordered_json*> accounts_of(const nlohmann::ordered_json& snap) {
    std::map<std::string, const nlohmann::ordered_json*> out;
    if (!snap.contains("accounts")) return out;
    for (const auto& a : snap["accounts"]) out.emplace(a["id"].get<std::string>(), &a);
    return out;
}

AuditCheck check_agreement(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"agreement", {}, {}};
    // swid -> decision -> first evidence event
    std::map<AccountId, std::map<Decision, std::size_t>> decided;
    for (const auto& [ev, cert] : d.certificates) {
        if (const auto* cc = std::get_if<CommitCertificate>(&cert)) {
            const Proposal& p = cc->value.proposal;
            decided[p.swid].emplace(p.decision, ev);
        }
    }
    std::map<std::tuple<AccountId, RoundNumber, Decision>, std::set<AuthorityIndex>> commit_votes;
    for (const auto& s : d.signs) {
        if (s.kind != SignKind::Commit) continue;
        const Proposal p = decode_value<Commit>(s).proposal;
        auto& signers = commit_votes[{p.swid, p.round, p.decision}];
        signers.insert(s.signer);
        if (signers.size() == quorum(in.n)) decided[p.swid].emplace(p.decision, s.event);
    }
    for (const auto& [swid, ds] : decided) {
        if (ds.size() < 2) continue;
        c.violations.push_back(Violation{ds.at(Decision::Abort),
                                         "instance " + swid.to_string() + " has commit certificates for both decisions"});
    }
    // Tombstones across honest authorities.
    std::map<std::string, std::set<std::string>> tombstones;
    for (AuthorityIndex i : honest_snapshots(in)) {
        const auto& snap = in.snapshots[i];
        if (!snap.contains("deleted_instances")) continue;
        for (const auto& t : snap["deleted_instances"]) {
            if (t["decision"].is_null()) continue;
            tombstones[t["swid"].get<std::string>()].insert(t["decision"].get<std::string>());
        }
    }
    for (const auto& [swid, ds] : tombstones) {
        if (ds.size() > 1) c.violations.push_back(Violation{std::nullopt, "honest authorities recorded different decisions for " + swid});
    }
    return c;
}

// Slot key of a signed value: two different values for one slot by one
// honest authority is a double signature.
std::optional<Bytes> slot_of(const SignedValue& s) {
    Encoder e;
    e.u8(static_cast<std::uint8_t>(s.kind));
    switch (s.kind) {
        case SignKind::Request: {
            auto r = decode_value<Request>(s);
            encode(e, r.id);
            e.u64(r.sequence);
            break;
        }
        case SignKind::PreCommit:
        case SignKind::Commit: {
            auto p = s.kind == SignKind::PreCommit ? decode_value<PreCommit>(s).proposal : decode_value<Commit>(s).proposal;
            encode(e, p.swid);
            e.u64(p.round);
            break;
        }
        case SignKind::BidSubmission: {
            auto b = decode_value<BidSubmission>(s);
            encode(e, b.auction_id);
            e.raw(b.deposit_certificate);
            break;
        }
        case SignKind::EndOfBidding:
            encode(e, decode_value<EndOfBidding>(s).auction_id);
            break;
        case SignKind::EndOfAuction:
            encode(e, decode_value<EndOfAuction>(s).auction_id);
            break;
        default:
            return std::nullopt;
    }
    return e.take();
}

AuditCheck check_double_sign(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"double_sign", {}, {}};
    std::map<std::pair<AuthorityIndex, Bytes>, Digest> seen;
    for (const auto& s : d.signs) {
        if (!in.honest.contains(s.signer)) continue;
        auto slot = slot_of(s);
        if (!slot) continue;
        auto [it, inserted] = seen.emplace(std::make_pair(s.signer, *slot), s.digest);
        if (!inserted && it->second != s.digest) {
            c.violations.push_back(Violation{s.event, "authority " + std::to_string(s.signer) +
                                                          " signed two values for one slot (kind " +
                                                          std::to_string(static_cast<int>(s.kind)) + ")"});
        }
    }
    return c;
}

AuditCheck check_monotonicity(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"monotonicity", {}, {}};
    std::map<std::tuple<AuthorityIndex, SignKind, AccountId>, std::uint64_t> last;
    for (const auto& s : d.signs) {
        if (!in.honest.contains(s.signer)) continue;
        AccountId key;
        std::uint64_t position = 0;
        if (s.kind == SignKind::PreCommit) {
            auto p = decode_value<PreCommit>(s).proposal;
            key = p.swid;
            position = p.round;
        } else if (s.kind == SignKind::Commit) {
            auto p = decode_value<Commit>(s).proposal;
            key = p.swid;
            position = p.round;
        } else if (s.kind == SignKind::Request) {
            auto r = decode_value<Request>(s);
            key = r.id;
            position = r.sequence;
        } else {
            continue;
        }
        auto [it, inserted] = last.emplace(std::make_tuple(s.signer, s.kind, key), position);
        if (!inserted) {
            if (position < it->second) {
                c.violations.push_back(Violation{s.event, "authority " + std::to_string(s.signer) + " went back from " +
                                                              std::to_string(it->second) + " to " +
                                                              std::to_string(position) + " on " + key.to_string()});
            }
            it->second = std::max(it->second, position);
        }
    }
    return c;
}

AuditCheck check_unforgeability(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"unforgeability", {}, {}};
    std::map<std::pair<AuthorityIndex, Digest>, std::size_t> signed_at;
    for (const auto& s : d.signs) signed_at.emplace(std::make_pair(s.signer, s.digest), s.event);
    const std::size_t need = max_faults(in.n) + 1;
    for (const auto& [ev, cert] : d.certificates) {
        std::visit(
            [&](const auto& certificate) {
                const Digest payload = certificate.value_digest();
                std::size_t honest_votes = 0;
                for (const auto& v : certificate.votes) {
                    if (!in.honest.contains(v.signer)) continue;
                    auto it = signed_at.find({v.signer, payload});
                    if (it == signed_at.end() || it->second > ev) {
                        c.violations.push_back(Violation{ev, "vote of honest authority " + std::to_string(v.signer) +
                                                                 " has no matching signature event"});
                        continue;
                    }
                    ++honest_votes;
                }
                if (honest_votes < need) {
                    c.violations.push_back(Violation{ev, "certificate with " + std::to_string(honest_votes) +
                                                             " honest votes, need " + std::to_string(need)});
                }
            },
            cert);
    }
    return c;
}

AuditCheck check_conservation(const AuditInput& in) {
    AuditCheck c{"conservation", {}, {}};
    if (!in.quiescent) {
        c.note = "run did not reach quiescence; effects may be in flight";
        return c;
    }
    for (AuthorityIndex i : honest_snapshots(in)) {
        Amount total = 0;
        for (const auto& a : in.snapshots[i]["accounts"]) total += a["balance"].get<Amount>();
        if (total != in.initial_supply) {
            c.violations.push_back(Violation{std::nullopt, "authority " + std::to_string(i) + " holds " +
                                                               std::to_string(total) + ", expected " +
                                                               std::to_string(in.initial_supply)});
        }
    }
    return c;
}

AuditCheck check_consistency(const AuditInput& in) {
    AuditCheck c{"eventual_consistency", {}, {}};
    auto honest = honest_snapshots(in);
    if (honest.empty()) return c;
    const std::string reference = consistency_view(in.snapshots[honest.front()]).dump();
    for (std::size_t k = 1; k < honest.size(); ++k) {
        const AuthorityIndex i = honest[k];
        if (consistency_view(in.snapshots[i]).dump() == reference) continue;
        std::string where;
        auto a = accounts_of(in.snapshots[honest.front()]);
        auto b = accounts_of(in.snapshots[i]);
        for (const auto& [id, acc] : a) {
            auto it = b.find(id);
            auto strip = [](const nlohmann::ordered_json& j) { return consistency_view({{"accounts", {j}}}).dump(); };
            if (it == b.end() || strip(*acc) != strip(*it->second)) {
                where = id;
                break;
            }
        }
        if (where.empty() && a.size() != b.size()) where = "account set";
        if (where.empty()) where = "deactivated set";
        c.violations.push_back(Violation{std::nullopt, "authority " + std::to_string(i) + " differs from authority " +
                                                           std::to_string(honest.front()) + " at " + where});
    }
    return c;
}

AuditCheck check_unlock_liveness(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"unlock_liveness", {}, {}};
    std::set<AccountId> committed;
    for (const auto& [ev, cert] : d.certificates) {
        if (const auto* cc = std::get_if<CommitCertificate>(&cert)) committed.insert(cc->value.proposal.swid);
    }
    std::set<std::string> settled;
    for (AuthorityIndex i : honest_snapshots(in)) {
        for (const auto& a : in.snapshots[i].value("auctions", nlohmann::ordered_json::array())) {
            if (a["phase"] == "Settled") settled.insert(a["auction"].get<std::string>());
        }
    }
    for (const auto& [ev, cert] : d.certificates) {
        const auto* rc = std::get_if<RequestCertificate>(&cert);
        if (!rc || rc->value.kind != RequestKind::Lock) continue;
        const Request& r = rc->value;
        bool released = false;
        if (const auto* l = std::get_if<LockInto>(&r.operation)) released = committed.contains(l->swid);
        if (const auto* o = std::get_if<OpenAuction>(&r.operation)) {
            released = settled.contains(o->auction_id.to_string());
        }
        if (!released) continue;
        for (AuthorityIndex i : honest_snapshots(in)) {
            auto accounts = accounts_of(in.snapshots[i]);
            auto it = accounts.find(r.id.to_string());
            if (it == accounts.end()) continue;  // spent later
            if ((*it->second)["next_sequence"].get<std::uint64_t>() <= r.sequence) {
                c.violations.push_back(Violation{ev, "account " + r.id.to_string() + " still locked at authority " +
                                                         std::to_string(i)});
            }
        }
    }
    return c;
}

AuditCheck check_auction_phase(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"auction_phase", {}, {}};
    std::set<std::pair<AuthorityIndex, AccountId>> closed;
    for (const auto& s : d.signs) {
        if (!in.honest.contains(s.signer)) continue;
        if (s.kind == SignKind::EndOfBidding) {
            closed.emplace(s.signer, decode_value<EndOfBidding>(s).auction_id);
        } else if (s.kind == SignKind::BidSubmission) {
            const auto b = decode_value<BidSubmission>(s);
            if (closed.contains({s.signer, b.auction_id})) {
                c.violations.push_back(Violation{s.event, "authority " + std::to_string(s.signer) +
                                                              " accepted a bid after end of bidding on " +
                                                              b.auction_id.to_string()});
            }
        }
    }
    return c;
}

AuditCheck check_escrow_zero(const AuditInput& in) {
    AuditCheck c{"escrow_zero", {}, {}};
    if (!in.quiescent) {
        c.note = "run did not reach quiescence";
        return c;
    }
    for (AuthorityIndex i : honest_snapshots(in)) {
        auto accounts = accounts_of(in.snapshots[i]);
        for (const auto& a : in.snapshots[i].value("auctions", nlohmann::ordered_json::array())) {
            if (a["phase"] != "Settled") continue;
            auto it = accounts.find(a["auction"].get<std::string>());
            if (it == accounts.end()) continue;
            const Amount balance = (*it->second)["balance"].get<Amount>();
            if (balance != 0) {
                c.violations.push_back(Violation{std::nullopt, "escrow " + a["auction"].get<std::string>() + " holds " +
                                                                   std::to_string(balance) + " after settlement at authority " +
                                                                   std::to_string(i)});
            }
        }
    }
    return c;
}

AuditCheck check_non_negative(const AuditInput& in) {
    AuditCheck c{"non_negative_balances", {}, {}};
    if (!in.quiescent) {
        c.note = "run did not reach quiescence";
        return c;
    }
    for (AuthorityIndex i : honest_snapshots(in)) {
        for (const auto& a : in.snapshots[i]["accounts"]) {
            if (a["balance"].get<Amount>() < 0) {
                c.violations.push_back(Violation{std::nullopt, "account " + a["id"].get<std::string>() +
                                                                   " negative at authority " + std::to_string(i)});
            }
        }
    }
    return c;
}

AuditCheck check_client_proposals(const AuditInput& in, const Decoded& d) {
    AuditCheck c{"honest_client_proposals", {}, {}};
    std::map<std::tuple<ActorId, AccountId, RoundNumber>, Proposal> seen;
    for (std::size_t k = 0; k < d.client_signs.size(); ++k) {
        const auto& [ev, auth] = d.client_signs[k];
        const ActorId actor = d.client_sign_actors[k].second;
        if (in.faulty_clients.contains(actor)) continue;
        const Proposal& p = auth.value;
        auto [it, inserted] = seen.emplace(std::make_tuple(actor, p.swid, p.round), p);
        if (!inserted && it->second != p) {
            c.violations.push_back(Violation{ev, "client " + std::to_string(actor) + " signed " + describe(it->second) +
                                                     " and " + describe(p)});
        }
    }
    return c;
}

}  // namespace

AuditReport audit_run(const AuditInput& input) {
    if (!input.trace) throw ConfigError("audit needs a trace");
    const Decoded d = decode_trace(*input.trace);
    AuditReport r;
    r.checks.push_back(check_agreement(input, d));
    r.checks.push_back(check_double_sign(input, d));
    r.checks.push_back(check_monotonicity(input, d));
    r.checks.push_back(check_unforgeability(input, d));
    r.checks.push_back(check_conservation(input));
    r.checks.push_back(check_consistency(input));
    r.checks.push_back(check_unlock_liveness(input, d));
    r.checks.push_back(check_auction_phase(input, d));
    r.checks.push_back(check_escrow_zero(input));
    r.checks.push_back(check_non_negative(input));
    r.checks.push_back(check_client_proposals(input, d));
    return r;
}

}  // namespace bftswap
