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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include "bftswap/assets.hpp"
#include "bftswap/auction.hpp"
#include "bftswap/modelcheck.hpp"
#include "bftswap/scenario.hpp"

#include "cluster.hpp"
#include "oracles.hpp"

#include <CLI11.hpp>

#include <bit>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

using namespace bftswap;
using namespace bftswap::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f s", s);
    return buf;
}

Bytes read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

std::vector<fs::path> shipped_scenarios(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".json") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// 1. Agreement fuzz

json fuzz_schedule(std::uint64_t seed) {
    oracle::Rng rng(seed * 7919 + 1);
    auto pick = [&](std::initializer_list<const char*> xs) {
        return std::string(*(xs.begin() + oracle::uniform(rng, 0, static_cast<std::int64_t>(xs.size()) - 1)));
    };
    auto unit = [&](double hi) { return hi * static_cast<double>(oracle::uniform(rng, 0, 1000)) / 1000.0; };

    json net{{"min_delay", oracle::uniform(rng, 1, 20)},
             {"max_delay", oracle::uniform(rng, 50, 600)},
             {"drop", unit(0.25)},
             {"duplicate", unit(0.2)},
             {"gst", oracle::uniform(rng, 0, 30000)},
             {"post_gst_max_delay", 60}};
    if (oracle::uniform(rng, 0, 3) == 0) {
        const auto a = oracle::uniform(rng, 0, 3);
        net["partitions"] = json::array({{{"start", 0}, {"end", oracle::uniform(rng, 1000, 10000)}, {"group", {a}}}});
    }
    json faults = json::array();
    const std::string fault = pick({"none", "crash", "withhold_votes", "arbitrary_signer"});
    if (fault != "none") {
        json f{{"authority", oracle::uniform(rng, 0, 3)}, {"kind", fault}};
        if (fault == "crash") f["at"] = oracle::uniform(rng, 0, 5000);
        if (fault == "withhold_votes") f["p"] = 0.3 + unit(0.7);
        faults.push_back(f);
    }
    json swap{{"label", "swap"},
              {"type", "swap"},
              {"owners", {"alice", "bob"}},
              {"behavior", {pick({"honest", "flip_flop", "equivocate"}), pick({"honest", "flip_flop", "equivocate"})}},
              {"lock", {oracle::uniform(rng, 0, 5) > 0, oracle::uniform(rng, 0, 5) > 0}},
              {"lock_delay", {oracle::uniform(rng, 0, 3000), oracle::uniform(rng, 0, 3000)}}};
    if (oracle::uniform(rng, 0, 1)) swap["desired"] = {pick({"confirm", "abort"}), pick({"confirm", "abort"})};
    return json{{"format", "bftswap-scenario"},
                {"version", 1},
                {"name", "fuzz-" + std::to_string(seed)},
                {"seed", seed},
                {"network", net},
                {"faults", faults},
                {"swap", {{"round_interval", oracle::uniform(rng, 200, 1500)}, {"escalation_round", 4}}},
                {"budget", 200000},
                {"accounts", json::array({{{"name", "alice"}, {"balance", 10}}, {{"name", "bob"}, {"balance", 10}}})},
                {"actions", json::array({swap})}};
}

// Decisions for which some round has enough Commit signatures to form a
// certificate, counting every faulty authority as willing to sign.
std::map<AccountId, std::set<Decision>> certifiable_decisions(const ScenarioRun& run) {
    const auto& sim = *run.sim;
    std::size_t faulty = 0;
    for (AuthorityIndex i = 0; i < sim.size(); ++i) faulty += !sim.honest(i);
    std::map<std::tuple<AccountId, RoundNumber, Decision>, std::set<AuthorityIndex>> signers;
    for (const auto& e : sim.trace().events()) {
        if (e.kind != TraceKind::Sign) continue;
        const auto rec = from_bytes<SignRecord>(*sim.trace().payload(e.payload));
        if (rec.kind != SignKind::Commit || !sim.honest(rec.signer)) continue;
        const auto c = from_bytes<Commit>(rec.value);
        signers[{c.proposal.swid, c.proposal.round, c.proposal.decision}].insert(rec.signer);
    }
    std::map<AccountId, std::set<Decision>> out;
    for (const auto& [key, who] : signers) {
        if (who.size() + faulty >= sim.committee().quorum()) out[std::get<0>(key)].insert(std::get<2>(key));
    }
    return out;
}

Outcome agreement_fuzz(int schedules) {
    Stopwatch sw;
    int conflicts = 0;
    int audit_failures = 0;
    int decided = 0;
    std::map<std::string, int> decisions;
    for (int s = 0; s < schedules; ++s) {
        auto run = run_scenario(parse_scenario(fuzz_schedule(static_cast<std::uint64_t>(s) + 1)));
        for (const auto& [swid, ds] : certifiable_decisions(run)) {
            if (ds.size() > 1) ++conflicts;
        }
        for (const char* check : {"agreement", "double_sign", "monotonicity", "unforgeability"}) {
            if (!run.audit.find(check)->passed()) ++audit_failures;
        }
        const auto& d = run.results.at(0).detail;
        if (d.contains("decision")) {
            ++decided;
            ++decisions[d["decision"].get<std::string>()];
        }
    }
    const double t = sw.seconds();
    std::ostringstream os;
    os << schedules << " schedules, " << conflicts << " conflicting decisions, " << audit_failures
       << " safety audit failures, " << decided << " decided (" << decisions["Confirm"] << " Confirm, "
       << decisions["Abort"] << " Abort), " << fmt_seconds(t);
    return {conflicts == 0 && audit_failures == 0 && t < 60.0, os.str()};
}

// ---------------------------------------------------------------------------
// 2. Bounded model check

Outcome model_check_all() {
    Stopwatch sw;
    std::ostringstream os;
    bool ok = true;
    auto base = model_check(ModelCheckOptions{2, {}, 20'000'000});
    if (!base || base->violation) {
        ok = false;
        os << "all rules: " << (base ? "violation" : to_string(base.error()));
    } else {
        os << "all rules: 0 violations in " << base->states << " states";
    }
    for (char rule : {'a', 'b', 'c', 'd'}) {
        auto r = model_check(ModelCheckOptions{2, SafetyRules::without(rule), 20'000'000});
        const bool found = r && r->violation;
        ok = ok && found;
        os << "; without (" << rule << "): " << (found ? "violation in " + std::to_string(r->counterexample.size()) + " steps"
                                                       : "none");
    }
    const double t = sw.seconds();
    os << "; " << fmt_seconds(t);
    return {ok && t < 300.0, os.str()};
}

// ---------------------------------------------------------------------------
// 3. Swap end to end

json swap_only(const std::string& name, json swap) {
    swap["label"] = "swap";
    swap["type"] = "swap";
    swap["owners"] = {"alice", "bob"};
    return json{{"format", "bftswap-scenario"},
                {"version", 1},
                {"name", name},
                {"seed", 5},
                {"accounts", json::array({{{"name", "alice"}, {"balance", 40}}, {{"name", "bob"}, {"balance", 60}}})},
                {"actions", json::array({swap})}};
}

const json* find_account(const json& snapshot, const std::string& id) {
    for (const auto& a : snapshot["accounts"]) {
        if (a["id"] == id) return &a;
    }
    return nullptr;
}

std::string key_hex(const KeyPair& k) { return to_hex(k.public_key()); }

// Checks both accounts in every honest snapshot against the expectation.
bool check_swap_snapshots(const ScenarioRun& run, const std::array<std::string, 2>& owners,
                          const std::array<SequenceNumber, 2>& next, std::string& why) {
    const std::array<std::string, 2> ids{genesis_id(0).to_string(), genesis_id(1).to_string()};
    const std::array<Amount, 2> balances{40, 60};
    for (AuthorityIndex i : run.sim->honest_authorities()) {
        const json& snap = run.snapshots.at(i);
        for (int k = 0; k < 2; ++k) {
            const json* a = find_account(snap, ids[k]);
            if (!a) return why = "missing account", false;
            if ((*a)["owner"] != owners[k]) return why = "owner of " + ids[k] + " at authority " + std::to_string(i), false;
            if ((*a)["next_sequence"] != next[k]) return why = "sequence of " + ids[k], false;
            if (!(*a)["pending"].is_null()) return why = ids[k] + " still locked", false;
            if ((*a)["balance"] != balances[k]) return why = "balance of " + ids[k], false;
        }
        if (!snap["instances"].empty()) return why = "instance not deleted", false;
    }
    return true;
}

Outcome swap_end_to_end() {
    std::ostringstream os;
    bool ok = true;
    const std::string alice = key_hex(wallet_key("alice"));
    const std::string bob = key_hex(wallet_key("bob"));
    auto handover = [](const ScenarioRun& run, int role) {
        const auto swid = run.results.at(0).detail["swid"].get<std::string>();
        return key_hex(KeyPair::derive("bftswap/handover/" + swid + "/" + std::to_string(role)));
    };
    auto lock_seq = [](const ScenarioRun& run, int k) {
        return run.results.at(0).detail["lock_sequences"][k].get<SequenceNumber>();
    };

    {
        auto run = run_scenario(parse_scenario(swap_only("e2e-confirm", json::object())));
        std::string why;
        const bool decided = run.results.at(0).detail.value("decision", "") == "Confirm";
        // Alice brokered at sequence 0 and locked at 1; bob locked at 0.
        const bool seqs = lock_seq(run, 0) == 1 && lock_seq(run, 1) == 0;
        const bool snaps = decided && check_swap_snapshots(run, {handover(run, 2), handover(run, 1)},
                                                           {lock_seq(run, 0) + 1, lock_seq(run, 1) + 1}, why);
        ok = ok && decided && seqs && snaps && run.audit.passed();
        os << "Confirm " << (decided && seqs && snaps ? "ok" : "FAILED " + why);
    }
    {
        auto run = run_scenario(parse_scenario(swap_only("e2e-abort", {{"desired", {"abort", "abort"}}})));
        std::string why;
        const bool decided = run.results.at(0).detail.value("decision", "") == "Abort";
        const bool snaps = decided && check_swap_snapshots(run, {alice, bob}, {2, 1}, why);
        ok = ok && decided && snaps && run.audit.passed();
        os << "; Abort " << (decided && snaps ? "ok" : "FAILED " + why);
    }
    {
        // Bob locks long after the Abort commit deleted the instance; his
        // lock certificate attached to the commit releases him.
        auto run = run_scenario(parse_scenario(swap_only("e2e-late-unlock", {{"lock_delay", {0, 9000}}})));
        std::string why;
        const auto& d = run.results.at(0).detail;
        // Decided without bob's lock; the snapshot check then shows bob's
        // later lock at sequence 0 released.
        const bool decided = d.value("decision", "") == "Abort" && d["locks"][1] == false &&
                             d["finished_at"].get<Time>() < 9000;
        const bool snaps = decided && check_swap_snapshots(run, {alice, bob}, {2, 1}, why);
        ok = ok && decided && snaps && run.audit.passed();
        os << "; late unlock " << (decided && snaps ? "ok" : "FAILED " + why);
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 4. Eventual consistency under reordering

struct Workload {
    std::vector<ClientMessage> certificates;
    std::string reference;  // consistency snapshot of authority 0
};

Workload build_workload() {
    ClusterOptions o;
    std::vector<AccountId> ids;
    std::vector<KeyPair> keys;
    for (std::uint64_t i = 0; i < 4; ++i) {
        ids.push_back(AccountId::root(i + 1));
        keys.push_back(user_key("w/" + std::to_string(i)));
        o.genesis.push_back({ids.back(), keys.back().public_key(), i == 3 ? 0 : 100});
    }
    Cluster c(o);
    Workload w;
    std::vector<SequenceNumber> seq(4, 0);
    std::vector<Amount> bal{100, 100, 100, 0};
    auto exec = [&](std::size_t who, Operation op) {
        auto cert = c.execute(keys[who], Request{RequestKind::Execute, ids[who], seq[who], std::move(op)});
        if (!cert) throw std::runtime_error("workload request failed: " + std::string(to_string(cert.error())));
        w.certificates.push_back(ConfirmationMsg{*cert});
        ++seq[who];
    };

    oracle::Rng rng(99);
    for (int t = 0; t < 16; ++t) {
        const auto from = static_cast<std::size_t>(oracle::uniform(rng, 0, 2));
        const auto to = static_cast<std::size_t>(oracle::uniform(rng, 0, 3));
        if (to == from || bal[from] < 2) continue;
        const Amount x = oracle::uniform(rng, 1, bal[from] / 2);
        exec(from, Transfer{ids[to], x});
        bal[from] -= x;
        bal[to] += x;
    }
    // A child account that then receives and sends money.
    const AccountId child = ids[0].child(seq[0]);
    const KeyPair child_key = user_key("w/child");
    exec(0, OpenAccount{child, child_key.public_key()});
    exec(0, Transfer{child, 5});
    {
        auto cert = c.execute(child_key, Request{RequestKind::Execute, child, 0, Transfer{ids[3], 2}});
        if (!cert) throw std::runtime_error("child transfer failed");
        w.certificates.push_back(ConfirmationMsg{*cert});
    }
    const KeyPair rotated = user_key("w/2/rotated");
    exec(2, ChangeKey{rotated.public_key()});
    keys[2] = rotated;

    // Confirm swap between accounts 0 and 1, brokered by 0.
    auto run_swap = [&](std::size_t a, std::size_t b, Decision decision, bool late_second_lock) {
        const AccountId swid = ids[a].child(seq[a]);
        exec(a, StartConsensusInstance{swid, ids[a], seq[a] + 1, ids[b], seq[b]});
        const KeyPair ha = user_key("w/handover/" + swid.to_string() + "/1");
        const KeyPair hb = user_key("w/handover/" + swid.to_string() + "/2");
        auto l1 = c.order(keys[a], Request{RequestKind::Lock, ids[a], seq[a], LockInto{swid, 1, ha.public_key()}});
        if (!l1) throw std::runtime_error("lock 1 failed");
        std::optional<RequestCertificate> l2;
        auto lock_second = [&] {
            l2 = c.order(keys[b], Request{RequestKind::Lock, ids[b], seq[b], LockInto{swid, 2, hb.public_key()}}).value();
        };
        if (!late_second_lock) lock_second();
        const Proposal p{swid, 0, decision};
        auto pc = c.certify(ProposalMsg{authenticate(ha, p), *l1, l2}, PreCommit{p});
        if (!pc) throw std::runtime_error("pre-commit failed");
        auto cc = c.certify(PreCommitMsg{*pc}, Commit{p});
        if (!cc) throw std::runtime_error("commit failed");
        CommitMsg first{*cc, *l1, l2};
        c.broadcast(first);
        w.certificates.push_back(first);
        if (late_second_lock) {
            lock_second();
            CommitMsg late{*cc, std::nullopt, l2};
            c.broadcast(late);
            w.certificates.push_back(late);
        }
        ++seq[a];
        ++seq[b];
        if (decision == Decision::Confirm) {
            keys[a] = hb;
            keys[b] = ha;
        }
    };
    run_swap(0, 1, Decision::Confirm, false);
    run_swap(2, 3, Decision::Abort, true);
    // Activity after the swap under the exchanged keys.
    exec(0, Transfer{ids[2], 1});
    exec(1, Transfer{ids[3], 1});

    w.reference = c.at(0).snapshot(true).dump();
    for (AuthorityIndex i = 1; i < c.size(); ++i) {
        if (c.at(i).snapshot(true).dump() != w.reference) throw std::runtime_error("reference run diverged");
    }
    return w;
}

// Feeds every certificate (plus duplicates) to a fresh authority in a random
// order, interleaving cross-shard effects randomly too. Rejected messages
// are retried later.
std::optional<std::string> replay_shuffled(const Workload& w, Authority& a, oracle::Rng& rng) {
    using Item = std::variant<ClientMessage, CrossShardRequest>;
    std::vector<Item> pool(w.certificates.begin(), w.certificates.end());
    for (int d = 0; d < 5; ++d) {
        pool.emplace_back(w.certificates[static_cast<std::size_t>(
            oracle::uniform(rng, 0, static_cast<std::int64_t>(w.certificates.size()) - 1))]);
    }
    std::size_t steps = 0;
    while (!pool.empty()) {
        if (++steps > 100000) return "no progress";
        const auto k = static_cast<std::size_t>(oracle::uniform(rng, 0, static_cast<std::int64_t>(pool.size()) - 1));
        Item item = std::move(pool[k]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
        if (auto* m = std::get_if<ClientMessage>(&item)) {
            if (std::holds_alternative<ErrorReply>(a.handle(*m))) pool.push_back(std::move(item));
        } else {
            a.apply(std::get<CrossShardRequest>(item));
        }
        for (auto& r : a.take_outbox()) pool.emplace_back(std::move(r));
    }
    return std::nullopt;
}

Outcome eventual_consistency() {
    const Workload w = build_workload();
    ClusterOptions o;
    for (std::uint64_t i = 0; i < 4; ++i) {
        o.genesis.push_back({AccountId::root(i + 1), user_key("w/" + std::to_string(i)).public_key(), i == 3 ? 0 : 100});
    }
    oracle::Rng rng(2026);
    int identical = 0;
    std::string failure;
    for (int order = 0; order < 20; ++order) {
        Cluster fresh(o);
        bool same = true;
        for (AuthorityIndex i = 0; i < fresh.size(); ++i) {
            if (auto err = replay_shuffled(w, fresh.at(i), rng)) {
                failure = *err;
                same = false;
                break;
            }
            if (fresh.at(i).snapshot(true).dump() != w.reference) same = false;
        }
        identical += same;
    }
    std::ostringstream os;
    os << identical << "/20 orders byte-identical on all 4 authorities (" << w.certificates.size()
       << " certificate messages)";
    if (!failure.empty()) os << "; " << failure;
    return {identical == 20, os.str()};
}

// ---------------------------------------------------------------------------
// 5. Conservation

Outcome conservation(const fs::path& dir) {
    std::ostringstream os;
    bool ok = true;
    int count = 0;
    for (const auto& path : shipped_scenarios(dir)) {
        std::ifstream in(path);
        const json doc = json::parse(in);
        Amount supply = 0;
        for (const auto& a : doc["accounts"]) supply += a.value("balance", Amount{0});
        auto run = run_scenario(parse_scenario(doc));
        for (AuthorityIndex i : run.sim->honest_authorities()) {
            Amount total = 0;
            for (const auto& a : run.snapshots.at(i)["accounts"]) total += a["balance"].get<Amount>();
            if (total != supply) {
                ok = false;
                os << path.stem().string() << " authority " << i << ": " << total << " != " << supply << "; ";
            }
        }
        ++count;
    }
    os << count << " scenarios, supply exact at every honest authority";
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Asset replay

Outcome asset_replay(const fs::path& dir) {
    std::ostringstream os;
    bool ok = true;

    // Scenario-level: every transmutation with replay set re-requested its
    // outputs and compared bytes.
    auto run = run_scenario(load_scenario(dir / "assets.json"));
    int replays = 0;
    for (const auto& r : run.results) {
        if (!r.detail.contains("replay_identical")) continue;
        ++replays;
        ok = ok && r.ok && r.detail["replay_identical"] == true;
    }
    ok = ok && replays > 0;
    os << replays << " scenario replays identical";

    // Fresh committee: the same spend certificates produce the same bytes.
    const AccountId id = AccountId::root(1);
    const KeyPair owner = user_key("asset-owner");
    ClusterOptions o;
    o.genesis = {{id, owner.public_key(), 0}};
    auto certify_outputs = [&](Cluster& c, const TransmuteRequest& t, const std::vector<RequestCertificate>& spends) {
        auto replies = c.broadcast(OutputBindingMsg{t, spends});
        std::vector<Bytes> out;
        const auto bindings = transmute_outputs(c.committee, ExecutionRegistry::builtin(), t, spends).value();
        for (const auto& b : bindings) {
            auto votes = c.votes_for(replies, b);
            out.push_back(to_bytes(aggregate_certificate(c.committee, b, std::span<const Vote>(votes)).value().value));
        }
        return out;
    };
    Cluster first(o);
    Bytes amount(8, 0);
    amount[0] = 100;
    const AssetBinding binding{id, amount};
    auto asset = first.certify(AssetRequestMsg{authenticate(owner, AssetRequest{id, 0, amount})}, binding).value();
    Bytes parts{3, 0, 0, 0};
    TransmuteRequest t{"split", parts, {asset}, {}};
    for (int k = 0; k < 3; ++k) t.output_owners.push_back(user_key("asset-out/" + std::to_string(k)).public_key());
    Request spend{RequestKind::Execute, id, 0, Spend{transmute_commitment(t)}};
    auto spend_cert = first.certify(SpendMsg{authenticate(owner, spend), t}, spend).value();
    first.broadcast(ConfirmationMsg{spend_cert});
    const auto a = certify_outputs(first, t, {spend_cert});
    const auto again = certify_outputs(first, t, {spend_cert});
    Cluster second(o);
    second.broadcast(ConfirmationMsg{spend_cert});
    const auto b = certify_outputs(second, t, {spend_cert});

    // Independent expectation: 100 split in 3 is 34, 33, 33 under id::0::k.
    std::vector<Bytes> expected;
    for (std::uint64_t k = 0; k < 3; ++k) {
        Bytes v(8, 0);
        v[0] = static_cast<std::uint8_t>(k == 0 ? 34 : 33);
        expected.push_back(to_bytes(AssetBinding{id.child(0).child(k), v}));
    }
    const bool same = a == again && a == b && a == expected;
    ok = ok && same;
    os << "; split replay " << (same ? "byte-identical" : "DIFFERS") << " across re-request and a fresh committee";
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 7. Algebra axioms

template <typename A>
bool axioms(const char* name, std::uint64_t seed, std::ostringstream& os) {
    oracle::Rng rng(seed);
    const auto c = oracle::check_axioms<A>(rng, 1000);
    const bool ok = c.commutes == c.trials && c.preserves == c.trials;
    os << name << " " << c.commutes << "/" << c.preserves << "; ";
    return ok;
}

Outcome algebra_axioms() {
    using namespace algebra;
    std::ostringstream os;
    bool ok = true;
    ok &= axioms<Balance>("balance", 1, os);
    ok &= axioms<Nft>("nft", 2, os);
    ok &= axioms<Multiset>("multiset", 3, os);
    ok &= axioms<Product<Balance, Nft>>("balance*nft", 4, os);
    ok &= axioms<Product<Balance, Balance>>("balance*balance", 5, os);
    ok &= axioms<Product<Nft, Multiset>>("nft*multiset", 6, os);
    os << "(axiom 1 / axiom 2 out of 1000 each)";
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 8. TPKE

Outcome tpke_exhaustive() {
    Stopwatch sw;
    SeededRng rng(8);
    auto sys = tpke::setup(4, 2, rng).value();
    const Bytes label{'a', 'c', 'c'};
    int subsets = 0;
    int wrong = 0;
    int tampered = 0;
    int missed = 0;
    for (std::uint64_t m : {std::uint64_t{0}, std::uint64_t{1}, std::uint64_t{4242}, tpke::kMessageBound - 1}) {
        auto c = tpke::encrypt(sys.public_key, m, label, rng).value();
        std::vector<tpke::DecryptionShare> shares;
        for (const auto& k : sys.key_shares) shares.push_back(tpke::share_decrypt(sys.public_key, k, c));
        for (unsigned mask = 0; mask < 16; ++mask) {
            std::vector<tpke::DecryptionShare> chosen;
            for (unsigned i = 0; i < 4; ++i) {
                if (mask & (1u << i)) chosen.push_back(shares[i]);
            }
            const auto out = tpke::combine(sys.public_key, sys.verification_key, c, chosen);
            ++subsets;
            if (std::popcount(mask) >= 2 ? out != m : out.has_value()) ++wrong;
        }
        // Every single-byte corruption of every share field must be caught.
        for (const auto& s : shares) {
            for (int field = 0; field < 3; ++field) {
                for (std::size_t byte = 0; byte < 32; ++byte) {
                    auto bad = s;
                    auto& target = field == 0 ? bad.share->value : field == 1 ? bad.share->challenge : bad.share->response;
                    target[byte] ^= static_cast<std::uint8_t>(1u << (byte % 8));
                    ++tampered;
                    if (tpke::share_verify(sys.public_key, sys.verification_key, c, bad)) ++missed;
                }
            }
            auto moved = s;
            moved.index = s.index % 4 + 1;
            ++tampered;
            if (tpke::share_verify(sys.public_key, sys.verification_key, c, moved)) ++missed;
        }
    }
    const double t = sw.seconds();
    std::ostringstream os;
    os << subsets << " subsets, " << wrong << " wrong results; " << tampered << " tampered shares, " << missed
       << " accepted; " << fmt_seconds(t);
    return {wrong == 0 && missed == 0 && t < 10.0, os.str()};
}

// ---------------------------------------------------------------------------
// 9. Auction oracle

struct AuctionCase {
    PriceRule rule;
    std::vector<std::uint64_t> values;
    std::vector<Amount> deposits;
};

AuctionCase random_auction(oracle::Rng& rng) {
    AuctionCase a;
    a.rule = oracle::uniform(rng, 0, 1) ? PriceRule::SecondPrice : PriceRule::FirstPrice;
    const auto n = static_cast<std::size_t>(oracle::uniform(rng, 1, 5));
    // Narrow ranges force ties and bids above the deposit.
    const std::int64_t top = oracle::uniform(rng, 0, 1) ? 6 : 60;
    for (std::size_t i = 0; i < n; ++i) {
        a.values.push_back(static_cast<std::uint64_t>(oracle::uniform(rng, 0, top)));
        a.deposits.push_back(oracle::uniform(rng, 1, top + 5));
    }
    return a;
}

// Runs the full protocol on a fresh committee and returns the final
// balances of the bidders, then payout, then escrow.
std::vector<Amount> run_auction(const AuctionCase& ac, std::uint64_t seed) {
    const AccountId seller_id = AccountId::root(1);
    const AccountId payout = AccountId::root(2);
    const AccountId auction = seller_id.child(0);
    const KeyPair seller = user_key("seller");
    ClusterOptions o;
    o.genesis = {{seller_id, seller.public_key(), 0}, {payout, user_key("payout").public_key(), 0}};
    std::vector<KeyPair> bidders;
    for (std::size_t i = 0; i < ac.values.size(); ++i) {
        bidders.push_back(user_key("bidder/" + std::to_string(i)));
        o.genesis.push_back({AccountId::root(10 + i), bidders.back().public_key(), 100});
    }
    Cluster c(o);
    SeededRng rng(seed);
    auto lock = c.order(seller, Request{RequestKind::Lock, seller_id, 0,
                                        OpenAuction{auction, ac.rule, payout, seller.public_key()}})
                    .value();
    c.broadcast(OpenAuctionMsg{lock});
    std::vector<BidCertificate> certs;
    for (std::size_t i = 0; i < ac.values.size(); ++i) {
        const AccountId id = AccountId::root(10 + i);
        auto dep = c.execute(bidders[i], Request{RequestKind::Execute, id, 0, Transfer{auction, ac.deposits[i]}}).value();
        BidSubmission bid{auction, id, user_key("item/" + std::to_string(i)).public_key(),
                          tpke::encrypt(c.system.public_key, ac.values[i], bid_label(auction), rng).value(),
                          ac.deposits[i], dep.value_digest()};
        certs.push_back(c.certify(SubmitBidMsg{bid, dep}, bid).value());
    }
    std::map<Digest, BidSubmission> sorted;
    for (const auto& b : certs) sorted.emplace(b.value_digest(), b.value);
    EndOfBidding eob{auction, {}};
    for (const auto& [_, b] : sorted) eob.bids.push_back(b);
    auto closing = c.certify(EndOfBiddingMsg{authenticate(seller, eob), certs}, eob).value();
    std::vector<std::vector<tpke::DecryptionShare>> shares(eob.bids.size());
    for (const auto& r : c.broadcast(RequestSharesMsg{closing})) {
        const auto& s = std::get<SharesReply>(r).shares;
        for (std::size_t i = 0; i < s.size(); ++i) shares[i].push_back(s[i]);
    }
    EndOfAuction eoa{auction, closing.value_digest(), {}};
    for (std::size_t i = 0; i < eob.bids.size(); ++i) {
        eoa.outcomes.push_back({payload_digest(eob.bids[i]),
                                tpke::combine(c.system.public_key, c.system.verification_key, eob.bids[i].ciphertext,
                                              shares[i])});
    }
    auto result = c.certify(EndOfAuctionMsg{authenticate(seller, eoa), closing, shares}, eoa).value();
    c.broadcast(SettleMsg{result, closing});

    std::vector<Amount> out;
    for (std::size_t i = 0; i < ac.values.size(); ++i) out.push_back(c.account(3, AccountId::root(10 + i)).balance);
    out.push_back(c.account(3, payout).balance);
    out.push_back(c.account(3, auction).balance);
    for (AuthorityIndex a = 0; a < 3; ++a) {
        if (c.at(a).snapshot(true).dump() != c.at(3).snapshot(true).dump()) out.push_back(-1);
    }
    return out;
}

Outcome auction_oracle(int vectors, int end_to_end) {
    oracle::Rng rng(9);
    int mismatches = 0;
    int overpay = 0;
    int ties = 0;
    int e2e_mismatch = 0;
    std::map<PriceRule, int> per_rule;
    for (int v = 0; v < vectors; ++v) {
        const auto ac = random_auction(rng);
        ++per_rule[ac.rule];
        std::vector<oracle::OracleBid> ob;
        std::vector<SettlementBid> sb;
        for (std::size_t i = 0; i < ac.values.size(); ++i) {
            ob.push_back({10 + i, ac.deposits[i], ac.values[i]});
            sb.push_back({AccountId::root(10 + i), ac.deposits[i], ac.values[i]});
        }
        std::set<std::uint64_t> distinct(ac.values.begin(), ac.values.end());
        ties += distinct.size() < ac.values.size();
        const auto want = oracle::settle(ob, ac.rule == PriceRule::SecondPrice);
        const auto got = settle_bids(sb, ac.rule);
        if (got.winner != want.winner || got.price != want.price || got.refunds != want.refunds) ++mismatches;
        if (got.winner && got.price > static_cast<Amount>(ac.values[*got.winner])) ++overpay;

        if (v < end_to_end) {
            std::vector<Amount> expected;
            for (std::size_t i = 0; i < ac.values.size(); ++i) expected.push_back(100 - ac.deposits[i] + want.refunds[i]);
            expected.push_back(want.price);
            expected.push_back(0);
            if (run_auction(ac, static_cast<std::uint64_t>(v)) != expected) ++e2e_mismatch;
        }
    }
    std::ostringstream os;
    os << vectors << " vectors (" << per_rule[PriceRule::FirstPrice] << " first-price, "
       << per_rule[PriceRule::SecondPrice] << " second-price, " << ties << " with ties): " << mismatches
       << " settlement mismatches, " << overpay << " overpayments; " << end_to_end
       << " run end to end with " << e2e_mismatch << " post-balance mismatches";
    return {mismatches == 0 && overpay == 0 && e2e_mismatch == 0, os.str()};
}

// ---------------------------------------------------------------------------
// 10. Determinism

Outcome determinism(const fs::path& dir) {
    const auto base = fs::temp_directory_path() / "bftswap-acceptance";
    fs::remove_all(base);
    int identical = 0;
    int total = 0;
    std::string differing;
    for (const auto& path : shipped_scenarios(dir)) {
        const auto sc = load_scenario(path);
        const auto a = base / (path.stem().string() + "-a");
        const auto b = base / (path.stem().string() + "-b");
        write_run(run_scenario(sc), sc, a);
        write_run(run_scenario(sc), sc, b);
        ++total;
        bool same = true;
        for (const char* f : {"trace.bin", "messages.bin"}) {
            const auto x = read_file(a / f);
            same = same && !x.empty() && x == read_file(b / f);
        }
        if (same) {
            ++identical;
        } else {
            differing += " " + path.stem().string();
        }
    }
    fs::remove_all(base);
    std::ostringstream os;
    os << identical << "/" << total << " scenarios with byte-identical trace.bin and messages.bin";
    if (!differing.empty()) os << "; differ:" << differing;
    return {identical == total && total > 0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bftswap acceptance checks"};
    std::vector<int> only;
    int schedules = 200;
    int auction_e2e = 500;
    std::string scenarios = BFTSWAP_SCENARIO_DIR;
    app.add_option("--only", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
    app.add_option("--schedules", schedules, "Agreement fuzz schedules")->check(CLI::PositiveNumber);
    app.add_option("--auction-e2e", auction_e2e, "Auction vectors also run end to end")->check(CLI::NonNegativeNumber);
    app.add_option("--scenarios", scenarios, "Directory of shipped scenarios")->check(CLI::ExistingDirectory);
    CLI11_PARSE(app, argc, argv);

    const fs::path dir = scenarios;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"agreement fuzz", [&] { return agreement_fuzz(schedules); }},
        {"bounded model check", model_check_all},
        {"swap end to end", swap_end_to_end},
        {"eventual consistency", eventual_consistency},
        {"conservation", [&] { return conservation(dir); }},
        {"asset replay", [&] { return asset_replay(dir); }},
        {"algebra axioms", algebra_axioms},
        {"tpke threshold", tpke_exhaustive},
        {"auction oracle", [&] { return auction_oracle(500, auction_e2e); }},
        {"determinism", [&] { return determinism(dir); }},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int number = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", number, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
