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

// Command-line front end: run scenarios, re-audit run directories and
// model-check the consensus safety rules.

#include "bftswap/modelcheck.hpp"
#include "bftswap/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using bftswap::ConfigError;

int print_report(const bftswap::AuditReport& report, const std::string& format) {
    if (format == "json") {
        std::cout << report.to_json().dump(2) << "\n";
    } else {
        std::cout << report.to_text();
    }
    return report.passed() ? 0 : 1;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, const std::string& out,
            const std::string& format) {
    const auto scenario = bftswap::load_scenario(path);
    const auto run = bftswap::run_scenario(scenario, seed);
    if (!out.empty()) bftswap::write_run(run, scenario, out);
    if (format == "json") {
        auto meta = run.metadata(scenario);
        meta["audit"] = run.audit.to_json();
        std::cout << meta.dump(2) << "\n";
    } else {
        std::cout << "scenario " << scenario.name << " seed " << run.sim->setup().seed << "\n";
        std::cout << "end time " << run.summary.end_time << ", " << run.summary.events << " events"
                  << (run.budget_exceeded ? ", BudgetExceeded" : "") << "\n";
        for (const auto& r : run.results) {
            std::cout << (r.ok ? "ok   " : "FAIL ") << r.label << " (" << r.kind << ")";
            if (!r.started) std::cout << " not started";
            if (!r.error.empty()) std::cout << ": " << r.error;
            std::cout << "\n";
        }
        std::cout << run.audit.to_text();
    }
    if (run.budget_exceeded) return 2;
    return run.audit.passed() ? 0 : 1;
}

int cmd_modelcheck(bftswap::RoundNumber rounds, const std::string& ablate) {
    bftswap::ModelCheckOptions options;
    options.max_round = rounds;
    if (!ablate.empty()) {
        if (ablate.size() != 1 || ablate[0] < 'a' || ablate[0] > 'd') throw ConfigError("--ablate takes a, b, c or d");
        options.rules = bftswap::SafetyRules::without(ablate[0]);
    }
    auto result = bftswap::model_check(options);
    if (!result) {
        std::cerr << "modelcheck: " << bftswap::to_string(result.error()) << "\n";
        return 2;
    }
    std::cout << "rounds 0.." << rounds << (ablate.empty() ? "" : ", without rule " + ablate) << "\n";
    std::cout << result->to_text();
    return result->violation ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bftswap: atomic swaps, assets and auctions over a BFT committee"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, format = "text", run_dir;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run a scenario and audit it");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_dir, "Directory for the trace, snapshots and report");
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    auto* audit = app.add_subcommand("audit", "Re-audit a run directory");
    audit->add_option("dir", run_dir, "Directory written by 'run --out'")->required()->check(CLI::ExistingDirectory);
    audit->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

    bftswap::RoundNumber rounds = 2;
    std::string ablate;
    auto* mc = app.add_subcommand("modelcheck", "Exhaustively check one consensus instance");
    mc->add_option("--rounds", rounds, "Highest round explored");
    mc->add_option("--ablate", ablate, "Disable one safety rule (a, b, c or d)");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(scenario_path, seed, out_dir, format);
        if (*audit) return print_report(bftswap::audit_directory(run_dir), format);
        return cmd_modelcheck(rounds, ablate);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
