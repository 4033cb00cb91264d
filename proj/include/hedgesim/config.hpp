#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "hedgesim/forward_curve.hpp"
#include "hedgesim/hedge_engine.hpp"
#include "hedgesim/rolling_intrinsic.hpp"
#include "hedgesim/storage_dispatch.hpp"

namespace hedgesim {

inline constexpr const char* kEngineVersion = "1.0.0";

enum class InstrumentKind { Call, Storage };

struct RunBlock {
    int n_steps = 256;
    int n_paths = 1000;
    std::uint64_t master_seed = 1;
    bool retain_ledgers = false;
    int workers = 1;
    std::string output_dir = "out";

    bool operator==(const RunBlock&) const = default;
};

// One scenario file. Call scenarios use the gbm/call/strategy blocks;
// storage scenarios use the curve/storage blocks. Unused blocks keep their
// defaults and are not serialised.
struct ScenarioConfig {
    InstrumentKind kind = InstrumentKind::Call;

    GbmSpec gbm;
    double numeraire_rate = 0.0;
    CallSpec call;
    PricingModel model = PricingModel::RiskNeutral;
    HedgeStrategy strategy{HedgeKind::RiskNeutralDelta};

    ForwardCurve curve;
    CurveFactorModel curve_model;
    StorageSpec storage;
    bool storage_hedged = true;

    RunBlock run;

    bool operator==(const ScenarioConfig&) const = default;
};

// Parses YAML text. Relative curve_csv paths resolve against base_dir.
// Errors are ConfigError with "line N: field: reason" messages.
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

// YAML with the forward curve inlined, so the file alone reproduces a run.
std::string serialize_config(const ScenarioConfig& config);

// Canonical JSON (sorted keys); basis of the config hash.
nlohmann::json config_to_json(const ScenarioConfig& config);
std::string config_hash(const ScenarioConfig& config);

VanillaRunSpec to_vanilla_run(const ScenarioConfig& config, Retention retention);
StorageRunSpec to_storage_run(const ScenarioConfig& config, Retention retention);

HedgeKind parse_hedge_kind(const std::string& name);
PricingModel parse_pricing_model(const std::string& name);

}  // namespace hedgesim
