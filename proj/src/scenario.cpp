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

#include "bftswap/scenario.hpp"

#include <fstream>
#include <sstream>

namespace bftswap {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Field access with the JSON path in the error message.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(path_ + ": " + what); }

    bool has(const char* key) const { return node_.contains(key); }
    std::string child_path(const std::string& key) const { return path_ + "." + key; }

    const json& at(const char* key) const {
        if (!node_.contains(key)) fail(std::string("missing field '") + key + "'");
        return node_.at(key);
    }

    template <typename T>
    T get(const char* key) const {
        try {
            return at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(child_path(key) + ": wrong type");
        }
    }

    template <typename T>
    T get(const char* key, T fallback) const {
        return has(key) ? get<T>(key) : fallback;
    }

    Reader object(const char* key) const { return Reader(at(key), child_path(key)); }

    const json& array(const char* key) const {
        const json& a = at(key);
        if (!a.is_array()) throw ConfigError(child_path(key) + ": expected an array");
        return a;
    }

private:
    const json& node_;
    std::string path_;
};

Bytes amount_payload(std::uint64_t v) {
    Encoder e;
    e.u64(v);
    return e.take();
}

Bytes parts_payload(std::uint32_t v) {
    Encoder e;
    e.u32(v);
    return e.take();
}

// {"amount": n} | {"parts": n} | {"text": s} | {"hex": s}
Bytes read_payload(const Reader& r) {
    if (r.has("amount")) return amount_payload(r.get<std::uint64_t>("amount"));
    if (r.has("parts")) return parts_payload(r.get<std::uint32_t>("parts"));
    if (r.has("text")) {
        auto s = r.get<std::string>("text");
        return Bytes(s.begin(), s.end());
    }
    if (r.has("hex")) {
        try {
            return from_hex(r.get<std::string>("hex"));
        } catch (const std::exception&) {
            r.fail("bad hex payload");
        }
    }
    return {};
}

ProposerBehavior parse_behavior(const std::string& s, const Reader& r) {
    if (s == "honest") return ProposerBehavior::Honest;
    if (s == "flip_flop") return ProposerBehavior::FlipFlop;
    if (s == "equivocate") return ProposerBehavior::Equivocate;
    if (s == "absent") return ProposerBehavior::Absent;
    r.fail("unknown behavior '" + s + "'");
}

Decision parse_decision(const std::string& s, const Reader& r) {
    if (s == "confirm" || s == "Confirm") return Decision::Confirm;
    if (s == "abort" || s == "Abort") return Decision::Abort;
    r.fail("unknown decision '" + s + "'");
}

FaultKind parse_fault(const std::string& s, const Reader& r) {
    if (s == "honest") return FaultKind::Honest;
    if (s == "crash") return FaultKind::Crash;
    if (s == "withhold_votes") return FaultKind::WithholdVotes;
    if (s == "arbitrary_signer") return FaultKind::ArbitrarySigner;
    r.fail("unknown fault kind '" + s + "'");
}

template <typename T>
std::array<T, 2> read_pair(const Reader& r, const char* key, std::array<T, 2> fallback) {
    if (!r.has(key)) return fallback;
    const json& a = r.array(key);
    if (a.size() != 2) throw ConfigError(r.child_path(key) + ": expected two entries");
    try {
        return {a[0].get<T>(), a[1].get<T>()};
    } catch (const json::exception&) {
        throw ConfigError(r.child_path(key) + ": wrong type");
    }
}

ActionBody parse_body(const Reader& r) {
    const auto type = r.get<std::string>("type");
    if (type == "transfer") {
        return TransferAction{r.get<std::string>("from"), r.get<std::string>("to"), r.get<Amount>("amount")};
    }
    if (type == "open_account") return OpenAccountAction{r.get<std::string>("parent"), r.get<std::string>("name")};
    if (type == "change_key") return ChangeKeyAction{r.get<std::string>("account")};
    if (type == "swap") {
        SwapAction s;
        s.owners = read_pair<std::string>(r, "owners", {});
        if (s.owners[0].empty() || s.owners[1].empty()) r.fail("swap needs two owners");
        s.broker = r.get<std::string>("broker", "");
        auto behavior = read_pair<std::string>(r, "behavior", {"honest", "honest"});
        for (int i = 0; i < 2; ++i) s.behavior[i] = parse_behavior(behavior[i], r);
        s.lock = read_pair<bool>(r, "lock", {true, true});
        s.lock_delay = read_pair<Time>(r, "lock_delay", {0, 0});
        if (r.has("desired")) {
            const json& d = r.array("desired");
            if (d.size() != 2) r.fail("desired needs two entries");
            for (int i = 0; i < 2; ++i) {
                if (d[i].is_null()) continue;
                if (!d[i].is_string()) r.fail("desired entries are strings or null");
                s.desired[i] = parse_decision(d[i].get<std::string>(), r);
            }
        }
        s.delta = r.get<Time>("delta", 0);
        return s;
    }
    if (type == "asset") {
        return AssetAction{r.get<std::string>("account"), read_payload(r.object("data")), r.get<std::string>("as")};
    }
    if (type == "transmute") {
        TransmuteAction t;
        t.inputs = r.get<std::vector<std::string>>("inputs");
        t.function = r.get<std::string>("function");
        if (r.has("params")) t.params = read_payload(r.object("params"));
        t.outputs = r.get<std::vector<std::string>>("outputs");
        t.replay = r.get<bool>("replay", false);
        if (t.inputs.empty()) r.fail("transmute needs inputs");
        return t;
    }
    if (type == "auction") {
        AuctionAction a;
        a.item = r.get<std::string>("item");
        a.payout = r.get<std::string>("payout");
        const auto rule = r.get<std::string>("rule", "second_price");
        if (rule == "first_price") {
            a.rule = PriceRule::FirstPrice;
        } else if (rule == "second_price") {
            a.rule = PriceRule::SecondPrice;
        } else {
            r.fail("unknown price rule '" + rule + "'");
        }
        const auto seller = r.get<std::string>("seller", "honest");
        if (seller == "honest") {
            a.seller = SellerBehavior::Honest;
        } else if (seller == "withhold") {
            a.seller = SellerBehavior::Withhold;
        } else if (seller == "misreport") {
            a.seller = SellerBehavior::Misreport;
        } else {
            r.fail("unknown seller behavior '" + seller + "'");
        }
        a.window = r.get<Time>("window", 3000);
        const json& bids = r.array("bids");
        for (std::size_t i = 0; i < bids.size(); ++i) {
            Reader b(bids[i], r.child_path("bids[" + std::to_string(i) + "]"));
            a.bids.push_back({b.get<std::string>("bidder"), b.get<std::uint64_t>("value"), b.get<Amount>("deposit"),
                              b.get<bool>("included", true), b.get<Time>("delay", 0)});
        }
        return a;
    }
    r.fail("unknown action type '" + type + "'");
}

const char* kind_of(const ActionBody& body) {
    static constexpr const char* kNames[] = {"transfer", "open_account", "change_key", "swap",
                                             "asset",    "transmute",    "auction"};
    static_assert(std::size(kNames) == std::variant_size_v<ActionBody>);
    return kNames[body.index()];
}

}  // namespace

AccountId genesis_id(std::size_t index) { return AccountId::root(index + 1); }

KeyPair wallet_key(const std::string& name) { return KeyPair::derive("bftswap/wallet/" + name); }

Scenario parse_scenario(const json& doc) {
    Reader root(doc, "scenario");
    if (root.get<std::string>("format") != kScenarioFormat) root.fail("format must be 'bftswap-scenario'");
    if (root.get<int>("version") != kScenarioVersion) root.fail("unsupported version");

    Scenario sc;
    sc.name = root.get<std::string>("name", "unnamed");
    sc.setup.seed = root.get<std::uint64_t>("seed", 0);
    if (root.has("committee")) {
        auto c = root.object("committee");
        sc.setup.n = c.get<std::uint32_t>("n", 4);
        sc.setup.shard_count = c.get<std::uint32_t>("shards", 4);
        if (sc.setup.n < 4 || sc.setup.n % 3 != 1) c.fail("n must be 3f+1 with f >= 1");
        if (sc.setup.shard_count == 0) c.fail("shards must be positive");
    }
    if (root.has("network")) {
        auto n = root.object("network");
        auto& net = sc.setup.network;
        net.min_delay = n.get<Time>("min_delay", net.min_delay);
        net.max_delay = n.get<Time>("max_delay", net.max_delay);
        net.drop = n.get<double>("drop", 0.0);
        net.duplicate = n.get<double>("duplicate", 0.0);
        net.gst = n.get<Time>("gst", 0);
        net.post_gst_max_delay = n.get<Time>("post_gst_max_delay", net.post_gst_max_delay);
        if (n.has("partitions")) {
            const json& parts = n.array("partitions");
            for (std::size_t i = 0; i < parts.size(); ++i) {
                Reader p(parts[i], n.child_path("partitions[" + std::to_string(i) + "]"));
                auto group = p.get<std::vector<AuthorityIndex>>("group");
                net.partitions.push_back({p.get<Time>("start"), p.get<Time>("end"), {group.begin(), group.end()}});
            }
        }
    }
    if (root.has("faults")) {
        const json& faults = root.array("faults");
        for (std::size_t i = 0; i < faults.size(); ++i) {
            Reader f(faults[i], "scenario.faults[" + std::to_string(i) + "]");
            const auto who = f.get<AuthorityIndex>("authority");
            if (who >= sc.setup.n) f.fail("no authority " + std::to_string(who));
            if (sc.setup.faults.contains(who)) f.fail("authority listed twice");
            sc.setup.faults[who] = {parse_fault(f.get<std::string>("kind"), f), f.get<Time>("at", 0),
                                    f.get<double>("p", 1.0)};
        }
    }
    if (root.has("swap")) {
        auto s = root.object("swap");
        sc.setup.swap.round_interval = s.get<Time>("round_interval", sc.setup.swap.round_interval);
        sc.setup.swap.escalation_round = s.get<RoundNumber>("escalation_round", sc.setup.swap.escalation_round);
        sc.setup.swap.parity_leader = s.get<bool>("parity_leader", false);
        for (const auto& rule : s.get<std::vector<std::string>>("disabled_rules", {})) {
            if (rule.size() != 1 || rule[0] < 'a' || rule[0] > 'd') s.fail("unknown safety rule '" + rule + "'");
            sc.setup.rules = [&] {
                SafetyRules out = sc.setup.rules;
                (rule[0] == 'a' ? out.a : rule[0] == 'b' ? out.b : rule[0] == 'c' ? out.c : out.d) = false;
                return out;
            }();
        }
    }
    // Negative controls only: lets more than f authorities misbehave.
    sc.setup.allow_excess_faults = root.get<bool>("allow_excess_faults", false);
    const auto faulty = std::count_if(sc.setup.faults.begin(), sc.setup.faults.end(),
                                      [](const auto& kv) { return kv.second.kind != FaultKind::Honest; });
    if (!sc.setup.allow_excess_faults && static_cast<std::uint32_t>(faulty) > (sc.setup.n - 1) / 3) {
        root.fail("faults: more faulty authorities than f = " + std::to_string((sc.setup.n - 1) / 3));
    }
    sc.setup.tpke_threshold = root.get<std::uint32_t>("tpke_threshold", 0);
    if (root.has("client")) {
        auto c = root.object("client");
        sc.client.retry = c.get<Time>("retry", sc.client.retry);
        sc.client.patience = c.get<Time>("patience", sc.client.patience);
        if (sc.client.retry == 0) c.fail("retry must be positive");
    }
    sc.budget = root.get<Time>("budget", sc.budget);

    std::set<std::string> names;
    const json& accounts = root.array("accounts");
    for (std::size_t i = 0; i < accounts.size(); ++i) {
        Reader a(accounts[i], "scenario.accounts[" + std::to_string(i) + "]");
        AccountSpec spec{a.get<std::string>("name"), a.get<Amount>("balance", 0)};
        if (spec.balance < 0) a.fail("balance must be non-negative");
        if (!names.insert(spec.name).second) a.fail("duplicate account name '" + spec.name + "'");
        sc.setup.genesis.push_back({genesis_id(i), wallet_key(spec.name).public_key(), spec.balance});
        sc.accounts.push_back(std::move(spec));
    }

    std::set<std::string> labels;
    const json& actions = root.array("actions");
    for (std::size_t i = 0; i < actions.size(); ++i) {
        Reader a(actions[i], "scenario.actions[" + std::to_string(i) + "]");
        Action act;
        act.label = a.get<std::string>("label", "action-" + std::to_string(i));
        act.after = a.get<std::string>("after", "");
        act.at = a.get<Time>("at", 0);
        if (!act.after.empty() && !labels.contains(act.after)) a.fail("'after' must name an earlier action");
        if (!labels.insert(act.label).second) a.fail("duplicate label '" + act.label + "'");
        act.body = parse_body(a);
        sc.actions.push_back(std::move(act));
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

// ---------------------------------------------------------------------------
// Runner

namespace {

class Runner {
public:
    Runner(const Scenario& sc, ScenarioRun& run) : sc_(sc), run_(run) {
        for (std::size_t i = 0; i < sc.actions.size(); ++i) {
            index_[sc.actions[i].label] = i;
            ActionResult r;
            r.label = sc.actions[i].label;
            r.kind = kind_of(sc.actions[i].body);
            run_.results.push_back(std::move(r));
        }
    }

    void schedule_all() {
        for (std::size_t i = 0; i < sc_.actions.size(); ++i) {
            const Action& a = sc_.actions[i];
            if (a.after.empty()) {
                run_.sim->after(a.at, [this, i] { start(i); });
            } else {
                dependents_[index_.at(a.after)].push_back(i);
            }
        }
    }

private:
    Simulator& sim() { return *run_.sim; }

    void start(std::size_t i) {
        run_.results[i].started = true;
        run_.results[i].detail["started_at"] = sim().now();
        std::visit([&](const auto& body) { launch(i, body); }, sc_.actions[i].body);
    }

    void complete(std::size_t i, std::optional<std::string> error) {
        auto& r = run_.results[i];
        if (r.finished) return;
        r.finished = true;
        r.ok = !error;
        if (error) r.error = *error;
        r.detail["finished_at"] = sim().now();
        for (std::size_t d : dependents_[i]) {
            run_.sim->after(sc_.actions[d].at, [this, d] { start(d); });
        }
    }

    WalletPtr wallet(const std::string& name) {
        auto it = run_.wallets.find(name);
        return it == run_.wallets.end() ? nullptr : it->second;
    }

    Client& client_for(const std::string& label) {
        clients_.push_back(std::make_unique<Client>(sim(), "client/" + label, sc_.client));
        return *clients_.back();
    }

    void launch(std::size_t i, const TransferAction& t) {
        auto from = wallet(t.from);
        auto to = wallet(t.to);
        if (!from || !to) return complete(i, "unknown account");
        client_for(sc_.actions[i].label)
            .execute(from, Transfer{to->id, t.amount}, [this, i](Result<RequestCertificate> r) {
                if (!r) return complete(i, std::string(to_string(r.error())));
                run_.results[i].detail["sequence"] = r->value.sequence;
                complete(i, std::nullopt);
            });
    }

    void launch(std::size_t i, const OpenAccountAction& o) {
        auto parent = wallet(o.parent);
        if (!parent) return complete(i, "unknown account");
        if (run_.wallets.contains(o.name)) return complete(i, "account name in use");
        auto child = std::make_shared<Wallet>(Wallet{o.name, parent->id.child(parent->next), wallet_key(o.name), 0});
        client_for(sc_.actions[i].label)
            .execute(parent, OpenAccount{child->id, child->key.public_key()},
                     [this, i, child](Result<RequestCertificate> r) {
                         if (!r) return complete(i, std::string(to_string(r.error())));
                         run_.wallets[child->name] = child;
                         run_.results[i].detail["id"] = child->id.to_string();
                         complete(i, std::nullopt);
                     });
    }

    void launch(std::size_t i, const ChangeKeyAction& c) {
        auto w = wallet(c.account);
        if (!w) return complete(i, "unknown account");
        // Derived from the account name and the sequence of the change.
        auto key = std::make_shared<KeyPair>(
            KeyPair::derive("bftswap/wallet/" + c.account + "/" + std::to_string(w->next)));
        client_for(sc_.actions[i].label)
            .execute(w, ChangeKey{key->public_key()}, [this, i, w, key](Result<RequestCertificate> r) {
                if (!r) return complete(i, std::string(to_string(r.error())));
                w->key = *key;
                complete(i, std::nullopt);
            });
    }

    void launch(std::size_t i, const SwapAction& s) {
        SwapPlan plan;
        for (int k = 0; k < 2; ++k) {
            plan.owners[k] = wallet(s.owners[k]);
            if (!plan.owners[k]) return complete(i, "unknown account");
        }
        if (!s.broker.empty()) {
            plan.broker = wallet(s.broker);
            if (!plan.broker) return complete(i, "unknown account");
        }
        plan.behavior = s.behavior;
        plan.lock = s.lock;
        plan.lock_delay = s.lock_delay;
        plan.desired = s.desired;
        plan.delta = s.delta;
        SwapSession::start(sim(), std::move(plan), sc_.client, [this, i](const SwapOutcome& o) {
            auto& d = run_.results[i].detail;
            d["swid"] = o.swid.to_string();
            d["locks"] = {o.locks[0].has_value(), o.locks[1].has_value()};
            d["lock_sequences"] = {o.sequences[0], o.sequences[1]};
            d["finalized"] = o.finalized;
            if (o.commit) {
                d["decision"] = to_string(o.commit->value.proposal.decision);
                d["round"] = o.commit->value.proposal.round;
            }
            ordered_json observed = ordered_json::array();
            for (Error e : o.observed) observed.push_back(std::string(to_string(e)));
            d["observed"] = observed;
            if (o.error) return complete(i, std::string(to_string(*o.error)));
            complete(i, std::nullopt);
        });
    }

    void launch(std::size_t i, const AssetAction& a) {
        auto w = wallet(a.account);
        if (!w) return complete(i, "unknown account");
        if (run_.assets.contains(a.as)) return complete(i, "asset name in use");
        asset_account_[a.as] = a.account;
        client_for(sc_.actions[i].label).certify_asset(w, a.data, [this, i, name = a.as](Result<Asset> r) {
            if (!r) return complete(i, std::string(to_string(r.error())));
            run_.assets[name] = *r;
            run_.results[i].detail["id"] = r->value.id.to_string();
            run_.results[i].detail["data"] = to_hex(r->value.data);
            complete(i, std::nullopt);
        });
    }

    void launch(std::size_t i, const TransmuteAction& t) {
        TransmuteRequest req;
        req.function = t.function;
        req.params = t.params;
        std::vector<WalletPtr> inputs;
        for (const auto& name : t.inputs) {
            auto it = run_.assets.find(name);
            auto acct = asset_account_.find(name);
            if (it == run_.assets.end() || acct == asset_account_.end()) return complete(i, "unknown asset");
            auto w = wallet(acct->second);
            if (!w) return complete(i, "unknown account");
            req.inputs.push_back(it->second);
            inputs.push_back(w);
        }
        for (const auto& name : t.outputs) {
            if (run_.assets.contains(name) || run_.wallets.contains(name)) return complete(i, "name in use");
            req.output_owners.push_back(wallet_key(name).public_key());
        }
        Client& c = client_for(sc_.actions[i].label);
        c.transmute(std::move(inputs), req, [this, i, &c, req, t](Result<Client::TransmuteResult> r) {
            if (!r) return complete(i, std::string(to_string(r.error())));
            auto& d = run_.results[i].detail;
            ordered_json outs = ordered_json::array();
            for (std::size_t k = 0; k < r->outputs.size(); ++k) {
                const auto& out = r->outputs[k];
                if (k < t.outputs.size()) {
                    // Each output opens a fresh account owned by the output's key.
                    const auto& name = t.outputs[k];
                    run_.assets[name] = out;
                    asset_account_[name] = name;
                    run_.wallets[name] = std::make_shared<Wallet>(Wallet{name, out.value.id, wallet_key(name), 0});
                }
                outs.push_back({{"id", out.value.id.to_string()}, {"data", to_hex(out.value.data)}});
            }
            d["outputs"] = outs;
            if (!t.replay) return complete(i, std::nullopt);
            auto first = r->outputs;
            c.replay_outputs(req, r->spends, [this, i, first](Result<std::vector<Asset>> again) {
                if (!again) return complete(i, "replay: " + std::string(to_string(again.error())));
                bool same = again->size() == first.size();
                for (std::size_t k = 0; same && k < first.size(); ++k) {
                    same = to_bytes((*again)[k].value) == to_bytes(first[k].value);
                }
                run_.results[i].detail["replay_identical"] = same;
                complete(i, same ? std::nullopt : std::optional<std::string>("replay produced different outputs"));
            });
        });
    }

    void launch(std::size_t i, const AuctionAction& a) {
        AuctionPlan plan;
        plan.item = wallet(a.item);
        plan.payout = wallet(a.payout);
        if (!plan.item || !plan.payout) return complete(i, "unknown account");
        plan.rule = a.rule;
        plan.seller = a.seller;
        plan.bidding_window = a.window;
        for (const auto& b : a.bids) {
            auto w = wallet(b.bidder);
            if (!w) return complete(i, "unknown account");
            plan.bids.push_back({w, b.value, b.deposit, b.included, b.delay});
        }
        AuctionSession::start(sim(), std::move(plan), sc_.client, [this, i](const AuctionOutcome& o) {
            auto& d = run_.results[i].detail;
            d["auction"] = o.auction_id.to_string();
            d["opened"] = o.opened;
            std::size_t certified = 0;
            for (const auto& b : o.bids) certified += b.has_value();
            d["bids_certified"] = certified;
            d["settled"] = o.settled;
            if (o.winner) d["winner"] = *o.winner;
            d["price"] = o.price;
            if (o.error) return complete(i, std::string(to_string(*o.error)));
            complete(i, std::nullopt);
        });
    }

    const Scenario& sc_;
    ScenarioRun& run_;
    std::map<std::string, std::size_t> index_;
    std::map<std::size_t, std::vector<std::size_t>> dependents_;
    std::map<std::string, std::string> asset_account_;
    std::vector<std::unique_ptr<Client>> clients_;
};

}  // namespace

ScenarioRun run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed) {
    ScenarioRun run;
    SimSetup setup = scenario.setup;
    if (seed) setup.seed = *seed;
    run.sim = std::make_unique<Simulator>(setup);
    for (std::size_t i = 0; i < scenario.accounts.size(); ++i) {
        const auto& a = scenario.accounts[i];
        run.wallets[a.name] = std::make_shared<Wallet>(Wallet{a.name, genesis_id(i), wallet_key(a.name), 0});
        run.initial_supply += a.balance;
    }

    // The runner owns the clients; it must outlive every event it schedules.
    auto runner = std::make_unique<Runner>(scenario, run);
    runner->schedule_all();
    run.summary = run.sim->run(scenario.budget);
    run.budget_exceeded = !run.summary.quiescent;
    if (run.budget_exceeded) run.sim->note(0, "budget exceeded at " + std::to_string(run.summary.end_time));
    run.sim->sync();
    for (AuthorityIndex i = 0; i < run.sim->size(); ++i) run.snapshots.push_back(run.sim->authority(i).snapshot());
    run.audit = audit_run(run.audit_input());
    runner.reset();
    return run;
}

AuditInput ScenarioRun::audit_input() const {
    AuditInput in;
    in.trace = &sim->trace();
    in.n = sim->size();
    for (AuthorityIndex i : sim->honest_authorities()) in.honest.insert(i);
    in.faulty_clients = sim->faulty_clients();
    in.snapshots = snapshots;
    in.initial_supply = initial_supply;
    in.quiescent = summary.quiescent;
    return in;
}

ordered_json ScenarioRun::metadata(const Scenario& scenario) const {
    ordered_json m;
    m["format"] = "bftswap-run";
    m["version"] = 1;
    m["scenario"] = scenario.name;
    m["seed"] = sim->setup().seed;
    m["n"] = sim->size();
    m["honest"] = sim->honest_authorities();
    m["faulty_clients"] = std::vector<ActorId>(sim->faulty_clients().begin(), sim->faulty_clients().end());
    m["initial_supply"] = initial_supply;
    m["quiescent"] = summary.quiescent;
    m["budget_exceeded"] = budget_exceeded;
    if (budget_exceeded) m["error"] = std::string(to_string(Error::BudgetExceeded));
    m["end_time"] = summary.end_time;
    m["events"] = summary.events;
    m["trace_events"] = sim->trace().events().size();
    ordered_json actors = ordered_json::array();
    for (ActorId a = 0; a < sim->actor_count(); ++a) actors.push_back(sim->actor_name(a));
    m["actors"] = actors;
    ordered_json results = ordered_json::array();
    for (const auto& r : this->results) {
        ordered_json j;
        j["label"] = r.label;
        j["kind"] = r.kind;
        j["started"] = r.started;
        j["finished"] = r.finished;
        j["ok"] = r.ok;
        if (!r.error.empty()) j["error"] = r.error;
        j["detail"] = r.detail;
        results.push_back(std::move(j));
    }
    m["actions"] = results;
    m["audit_passed"] = audit.passed();
    return m;
}

namespace {

void write_file(const std::filesystem::path& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

ordered_json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    try {
        return ordered_json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace

void write_run(const ScenarioRun& run, const Scenario& scenario, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "snapshots");
    write_file(dir / "trace.bin", run.sim->trace().encode_events());
    write_file(dir / "messages.bin", run.sim->trace().encode_store());
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
        write_text(dir / "snapshots" / ("authority-" + std::to_string(i) + ".json"), run.snapshots[i].dump(2) + "\n");
    }
    write_text(dir / "run.json", run.metadata(scenario).dump(2) + "\n");
    write_text(dir / "report.txt", run.audit.to_text());
    write_text(dir / "report.json", run.audit.to_json().dump(2) + "\n");
}

AuditReport audit_directory(const std::filesystem::path& dir) {
    const ordered_json meta = read_json(dir / "run.json");
    if (meta.value("format", "") != "bftswap-run") throw ConfigError("run.json: not a bftswap run");
    const Bytes events = read_file(dir / "trace.bin");
    const Bytes store = read_file(dir / "messages.bin");
    Trace trace = Trace::decode(events, store);

    AuditInput in;
    in.trace = &trace;
    in.n = meta.at("n").get<std::size_t>();
    for (const auto& h : meta.at("honest")) in.honest.insert(h.get<AuthorityIndex>());
    for (const auto& c : meta.at("faulty_clients")) in.faulty_clients.insert(c.get<ActorId>());
    in.initial_supply = meta.at("initial_supply").get<Amount>();
    in.quiescent = meta.at("quiescent").get<bool>();
    for (std::size_t i = 0; i < in.n; ++i) {
        auto path = dir / "snapshots" / ("authority-" + std::to_string(i) + ".json");
        in.snapshots.push_back(std::filesystem::exists(path) ? read_json(path) : ordered_json());
    }
    return audit_run(in);
}

}  // namespace bftswap
