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
 * @file scenario.hpp
 *
 * Scenario files and the runner. A scenario is a JSON document with a
 * versioned header describing the committee, network, faults, accounts
 * and a script of client actions; docs/scenario.md has the schema. Running
 * one executes the script to quiescence or the time budget, redelivers
 * certificates to every honest authority, snapshots all authorities and
 * audits the trace.
 */
#pragma once

#include "bftswap/audit.hpp"
#include "bftswap/client.hpp"
#include "bftswap/simulator.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bftswap {

inline constexpr const char* kScenarioFormat = "bftswap-scenario";
inline constexpr int kScenarioVersion = 1;

struct AccountSpec {
    std::string name;
    Amount balance = 0;
};

struct TransferAction {
    std::string from;
    std::string to;
    Amount amount = 0;
};

struct OpenAccountAction {
    std::string parent;
    std::string name;
};

struct ChangeKeyAction {
    std::string account;
};

struct SwapAction {
    std::array<std::string, 2> owners;
    std::string broker;  // empty: first owner
    std::array<ProposerBehavior, 2> behavior{ProposerBehavior::Honest, ProposerBehavior::Honest};
    std::array<bool, 2> lock{true, true};
    std::array<Time, 2> lock_delay{0, 0};
    std::array<std::optional<Decision>, 2> desired;
    Time delta = 0;
};

struct AssetAction {
    std::string account;
    Bytes data;
    std::string as;  // name of the resulting asset
};

struct TransmuteAction {
    std::vector<std::string> inputs;  // asset names; the bound accounts are spent
    std::string function;
    Bytes params;
    std::vector<std::string> outputs;  // names of the new output accounts
    bool replay = false;               // re-request the outputs and compare bytes
};

struct AuctionAction {
    std::string item;
    std::string payout;
    PriceRule rule = PriceRule::SecondPrice;
    SellerBehavior seller = SellerBehavior::Honest;
    Time window = 3000;
    struct Bid {
        std::string bidder;
        std::uint64_t value = 0;
        Amount deposit = 0;
        bool included = true;
        Time delay = 0;
    };
    std::vector<Bid> bids;
};

using ActionBody = std::variant<TransferAction, OpenAccountAction, ChangeKeyAction, SwapAction, AssetAction,
                                TransmuteAction, AuctionAction>;

struct Action {
    std::string label;
    std::string after;  // label of an earlier action to wait for
    Time at = 0;        // absolute start, or delay after `after`
    ActionBody body;
};

struct Scenario {
    std::string name;
    SimSetup setup;
    ClientOptions client;
    Time budget = 2'000'000;
    std::vector<AccountSpec> accounts;
    std::vector<Action> actions;
};

// Throws ConfigError with the offending field on any schema violation.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

AccountId genesis_id(std::size_t index);
KeyPair wallet_key(const std::string& name);

struct ActionResult {
    std::string label;
    std::string kind;
    bool started = false;
    bool finished = false;
    bool ok = false;
    std::string error;
    nlohmann::ordered_json detail = nlohmann::ordered_json::object();
};

struct ScenarioRun {
    std::unique_ptr<Simulator> sim;
    std::map<std::string, WalletPtr> wallets;
    std::map<std::string, Asset> assets;
    std::vector<ActionResult> results;
    RunSummary summary;
    bool budget_exceeded = false;
    Amount initial_supply = 0;
    std::vector<nlohmann::ordered_json> snapshots;
    AuditReport audit;

    nlohmann::ordered_json metadata(const Scenario& scenario) const;
    AuditInput audit_input() const;
};

// Runs the scenario with its own seed unless `seed` is given.
ScenarioRun run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed = std::nullopt);

// Writes trace.bin, messages.bin, snapshots/authority-<i>.json, run.json and
// report.{txt,json} into `dir`.
void write_run(const ScenarioRun& run, const Scenario& scenario, const std::filesystem::path& dir);

// Loads a directory written by write_run and re-audits it.
AuditReport audit_directory(const std::filesystem::path& dir);

}  // namespace bftswap
