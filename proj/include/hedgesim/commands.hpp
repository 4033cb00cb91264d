#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "hedgesim/config.hpp"

namespace hedgesim {

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> paths;
    std::optional<int> steps;
    std::optional<int> workers;
    std::optional<std::string> out;
    bool ledgers = false;
};

void apply_overrides(ScenarioConfig& config, const CliOverrides& overrides);

// f, g, I and closed-form time value for a call (optionally at time `at`),
// or I(0) and the intrinsic plan for a storage contract.
nlohmann::json cmd_price(const ScenarioConfig& config, std::optional<double> at = std::nullopt);

struct SimulateOutput {
    nlohmann::json report;
    std::string report_path;
    std::string ledger_path;  // empty unless ledgers were written
    double wall_seconds = 0.0;
};

// Runs the configured scenario and writes report.json (plus ledgers.csv when
// retain_ledgers is set) into config.run.output_dir.
SimulateOutput cmd_simulate(const ScenarioConfig& config);

// Runs every built-in strategy for the scenario, writing one report per
// strategy under <output_dir>/<strategy>/ and comparison.csv.
nlohmann::json cmd_sweep(const ScenarioConfig& config);

struct Check {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
    std::string detail;
};

struct VerifyTable {
    std::vector<Check> checks;
    bool all_pass() const;
};

VerifyTable cmd_verify(const ScenarioConfig& config);

// Building blocks of cmd_verify, also usable on replayed ledgers.
Check vanilla_ledger_check(std::span<const std::vector<LedgerRow>> ledgers);
Check storage_ledger_check(std::span<const std::vector<StorageRow>> ledgers, bool hedged);

void print_verify_table(std::ostream& out, const VerifyTable& table);

}  // namespace hedgesim
