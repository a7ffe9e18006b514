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

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace bftswap;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios = BFTSWAP_SCENARIO_DIR;

json swap_doc(const std::string& name, std::uint64_t seed) {
    return json{{"format", "bftswap-scenario"},
                {"version", 1},
                {"name", name},
                {"seed", seed},
                {"accounts", json::array({{{"name", "alice"}, {"balance", 10}}, {{"name", "bob"}, {"balance", 10}}})},
                {"actions", json::array({{{"label", "swap"}, {"type", "swap"}, {"owners", {"alice", "bob"}}}})}};
}

const ActionResult& result(const ScenarioRun& run, const std::string& label) {
    for (const auto& r : run.results) {
        if (r.label == label) return r;
    }
    FAIL("no action " << label);
    throw std::logic_error("unreachable");
}

bool check_passed(const AuditReport& report, const std::string& name) {
    const auto* c = report.find(name);
    REQUIRE(c != nullptr);
    return c->passed();
}

std::string config_error(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("bftswap-test-" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("scenario parsing errors name the field") {
    auto doc = swap_doc("x", 1);
    CHECK(config_error(doc).empty());

    auto bad = doc;
    bad["format"] = "something-else";
    CHECK(config_error(bad).find("format") != std::string::npos);
    bad = doc;
    bad["version"] = 2;
    CHECK(config_error(bad).find("version") != std::string::npos);
    bad = doc;
    bad["actions"][0]["type"] = "teleport";
    CHECK(config_error(bad).find("actions[0]") != std::string::npos);
    bad = doc;
    bad["accounts"][0]["balance"] = -1;
    CHECK(config_error(bad).find("accounts[0]") != std::string::npos);
    bad = doc;
    bad["committee"] = {{"n", 5}};
    CHECK_FALSE(config_error(bad).empty());
    bad = doc;
    bad["faults"] = json::array({{{"authority", 0}, {"kind", "crash"}}, {{"authority", 1}, {"kind", "crash"}}});
    CHECK(config_error(bad).find("faults") != std::string::npos);
    bad["allow_excess_faults"] = true;
    CHECK(config_error(bad).empty());
    bad = doc;
    bad["actions"][0]["after"] = "nothing";
    CHECK_FALSE(config_error(bad).empty());
}

TEST_CASE("same scenario and seed give byte-identical traces") {
    auto sc = load_scenario(kScenarios / "swap_faults.json");
    auto a = run_scenario(sc);
    auto b = run_scenario(sc);
    CHECK(a.sim->trace().encode_events() == b.sim->trace().encode_events());
    CHECK(a.sim->trace().encode_store() == b.sim->trace().encode_store());
    auto c = run_scenario(sc, 12345);
    CHECK(a.sim->trace().encode_events() != c.sim->trace().encode_events());
}

TEST_CASE("shipped scenarios") {
    for (const auto& entry : std::filesystem::directory_iterator(kScenarios)) {
        const auto name = entry.path().stem().string();
        CAPTURE(name);
        auto sc = load_scenario(entry.path());
        auto run = run_scenario(sc);
        CHECK_FALSE(run.budget_exceeded);
        CHECK(check_passed(run.audit, "conservation"));
        if (name == "equivocation_excess_faults") {
            CHECK_FALSE(check_passed(run.audit, "agreement"));
            CHECK_FALSE(check_passed(run.audit, "double_sign"));
            continue;
        }
        CHECK(run.audit.passed());
        for (const auto& r : run.results) {
            CAPTURE(r.label);
            CHECK(r.finished);
        }
    }
}

TEST_CASE("swap with one crashed authority still confirms") {
    auto doc = swap_doc("crash", 3);
    doc["faults"] = json::array({{{"authority", 2}, {"kind", "crash"}, {"at", 0}}});
    auto run = run_scenario(parse_scenario(doc));
    const auto& r = result(run, "swap");
    CHECK(r.ok);
    CHECK(r.detail["decision"] == "Confirm");
    CHECK(run.audit.passed());
    const auto alice = genesis_id(0).to_string();
    for (AuthorityIndex i : {0u, 1u, 3u}) {
        const auto& acc = run.snapshots[i]["accounts"];
        bool found = false;
        for (const auto& a : acc) {
            if (a["id"] != alice) continue;
            found = true;
            CHECK(a["next_sequence"] == 2);
            CHECK(a["pending"].is_null());
        }
        CHECK(found);
    }
}

TEST_CASE("flip-flopping proposers never break agreement") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        auto doc = swap_doc("flip", seed);
        doc["actions"][0]["behavior"] = {"flip_flop", "flip_flop"};
        doc["network"] = {{"min_delay", 5}, {"max_delay", 300}, {"drop", 0.1}, {"duplicate", 0.1}};
        doc["budget"] = 60000;
        auto run = run_scenario(parse_scenario(doc));
        CAPTURE(seed);
        CHECK(check_passed(run.audit, "agreement"));
        CHECK(check_passed(run.audit, "double_sign"));
        CHECK(check_passed(run.audit, "monotonicity"));
    }
}

TEST_CASE("partitioned run converges after healing") {
    auto doc = swap_doc("partition", 5);
    doc["network"] = {{"min_delay", 5},
                      {"max_delay", 100},
                      {"partitions", json::array({{{"start", 0}, {"end", 5000}, {"group", {3}}}})}};
    doc["actions"].push_back({{"label", "pay"}, {"type", "transfer"}, {"from", "alice"}, {"to", "bob"}, {"amount", 3}});
    auto run = run_scenario(parse_scenario(doc));
    CHECK(run.audit.passed());
    CHECK(check_passed(run.audit, "eventual_consistency"));
    const auto view = consistency_view(run.snapshots[0]).dump();
    for (std::size_t i = 1; i < run.snapshots.size(); ++i) CHECK(consistency_view(run.snapshots[i]).dump() == view);
}

TEST_CASE("budget exhaustion is reported") {
    auto doc = swap_doc("budget", 1);
    doc["budget"] = 50;
    auto run = run_scenario(parse_scenario(doc));
    CHECK(run.budget_exceeded);
    CHECK_FALSE(result(run, "swap").finished);
}

TEST_CASE("written runs re-audit identically") {
    auto sc = load_scenario(kScenarios / "auction.json");
    auto run = run_scenario(sc);
    const auto dir = temp_dir("auction");
    write_run(run, sc, dir);
    for (const char* f : {"trace.bin", "messages.bin", "run.json", "report.txt", "report.json"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    CHECK(std::filesystem::exists(dir / "snapshots" / "authority-0.json"));
    auto again = audit_directory(dir);
    CHECK(again.to_json() == run.audit.to_json());

    SUBCASE("a tampered snapshot is caught") {
        const auto path = dir / "snapshots" / "authority-1.json";
        std::ifstream in(path);
        auto snap = nlohmann::ordered_json::parse(in);
        in.close();
        for (auto& a : snap["accounts"]) {
            if (a["balance"].get<Amount>() > 0) {
                a["balance"] = a["balance"].get<Amount>() + 1;
                break;
            }
        }
        std::ofstream(path) << snap.dump(2);
        auto tampered = audit_directory(dir);
        CHECK_FALSE(tampered.passed());
        CHECK_FALSE(check_passed(tampered, "conservation"));
    }
    std::filesystem::remove_all(dir);
}
