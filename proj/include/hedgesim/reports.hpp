#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "hedgesim/config.hpp"
#include "hedgesim/hedge_engine.hpp"
#include "hedgesim/rolling_intrinsic.hpp"

namespace hedgesim {

nlohmann::json distribution_json(const TerminalDistribution& d);
nlohmann::json estimator_json(const EstimatorCheck& e);

// Deterministic run summaries: identical inputs give byte-identical dumps.
nlohmann::json vanilla_report(const ScenarioConfig& config, const VanillaRunResult& run);
nlohmann::json storage_report(const ScenarioConfig& config, const StorageRunResult& run);

// Columns: path,step,t,F,dF,h,dh,C,H,P,Pi. Step 0 is the initial state.
void write_vanilla_ledgers_csv(std::ostream& out, const VanillaRunResult& run);
// Columns: path,step,t,level,I,E,S,H,P,Pi.
void write_storage_ledgers_csv(std::ostream& out, const StorageRunResult& run);

std::string format_number(double x);

}  // namespace hedgesim
