#include "hedgesim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hedgesim/errors.hpp"

namespace hedgesim {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& why) {
    std::ostringstream msg;
    if (node.IsDefined() && node.Mark().line >= 0) msg << "line " << node.Mark().line + 1 << ": ";
    msg << field << ": " << why;
    throw ConfigError(msg.str());
}

// Typed access to one mapping block with unknown-key detection.
class Block {
public:
    Block(YAML::Node node, std::string name) : node_(std::move(node)), name_(std::move(name)) {
        if (node_.IsDefined() && !node_.IsMap()) fail(node_, name_, "expected a mapping");
    }

    bool present() const { return node_.IsDefined() && node_.IsMap(); }
    bool has(const std::string& key) {
        seen_.insert(key);
        return present() && node_[key].IsDefined() && !node_[key].IsNull();
    }

    template <class T>
    T get(const std::string& key, std::optional<T> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            fail(node_, name_ + "." + key, "required field missing");
        }
        const YAML::Node v = node_[key];
        try {
            return v.as<T>();
        } catch (const YAML::Exception&) {
            fail(v, name_ + "." + key, "wrong type");
        }
    }

    YAML::Node raw(const std::string& key) {
        seen_.insert(key);
        return present() ? node_[key] : YAML::Node();
    }

    void reject_unknown() const {
        if (!present()) return;
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.contains(key)) fail(kv.first, name_ + "." + key, "unknown field");
        }
    }

    const YAML::Node& node() const { return node_; }

private:
    YAML::Node node_;
    std::string name_;
    std::set<std::string> seen_;
};

std::vector<double> as_double_list(const YAML::Node& node, const std::string& field) {
    std::vector<double> out;
    if (node.IsScalar()) {
        try {
            out.push_back(node.as<double>());
        } catch (const YAML::Exception&) {
            fail(node, field, "expected a number or list of numbers");
        }
        return out;
    }
    if (!node.IsSequence()) fail(node, field, "expected a number or list of numbers");
    for (const auto& item : node) {
        try {
            out.push_back(item.as<double>());
        } catch (const YAML::Exception&) {
            fail(item, field, "expected numbers");
        }
    }
    return out;
}

const char* storage_hedge_name(bool hedged) { return hedged ? "rolling_intrinsic" : "none"; }

}  // namespace

HedgeKind parse_hedge_kind(const std::string& name) {
    for (auto k : {HedgeKind::None, HedgeKind::RiskNeutralDelta, HedgeKind::DriftAdjustedDelta,
                   HedgeKind::IntrinsicDelta, HedgeKind::BidOffer}) {
        if (name == to_string(k)) return k;
    }
    throw ConfigError("unknown hedge strategy '" + name + "'");
}

PricingModel parse_pricing_model(const std::string& name) {
    for (auto m : {PricingModel::RiskNeutral, PricingModel::Probabilistic, PricingModel::Intrinsic}) {
        if (name == to_string(m)) return m;
    }
    throw ConfigError("unknown pricing model '" + name + "'");
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root.IsMap()) throw ConfigError("config must be a mapping with market/instrument/run blocks");
    for (const auto& kv : root) {
        static const std::set<std::string> blocks{"market", "instrument", "strategy", "run"};
        const auto key = kv.first.as<std::string>();
        if (!blocks.contains(key)) fail(kv.first, key, "unknown block");
    }

    ScenarioConfig c;
    Block instrument(root["instrument"], "instrument");
    if (!instrument.present()) throw ConfigError("instrument: block missing");
    const auto type = instrument.get<std::string>("type");
    if (type != "call" && type != "storage") {
        fail(instrument.node()["type"], "instrument.type", "expected call or storage");
    }
    Block market(root["market"], "market");
    if (!market.present()) throw ConfigError("market: block missing");
    Block strategy(root["strategy"], "strategy");
    Block run(root["run"], "run");

    if (type == "call") {
        c.kind = InstrumentKind::Call;
        c.call.strike = instrument.get<double>("strike");
        c.call.expiry = instrument.get<double>("expiry");
        const auto model = market.get<std::string>("model", std::string("gbm"));
        if (model != "gbm") fail(market.node()["model"], "market.model", "call needs model gbm");
        c.gbm.f0 = market.get<double>("f0");
        c.gbm.mu0 = market.get<double>("mu", 0.0);
        c.gbm.sigma0 = market.get<double>("sigma");
        c.numeraire_rate = market.get<double>("numeraire_rate", 0.0);
        c.strategy.kind =
            parse_hedge_kind(strategy.get<std::string>("hedge", std::string("risk_neutral_delta")));
        c.model = parse_pricing_model(strategy.get<std::string>("pricing", std::string("risk_neutral")));
        c.strategy.k = strategy.get<double>("k", 0.0);
        c.strategy.inner =
            parse_hedge_kind(strategy.get<std::string>("inner", std::string("risk_neutral_delta")));
        try {
            c.gbm.validate();
            c.call.validate();
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
    } else if (type == "storage") {
        c.kind = InstrumentKind::Storage;
        c.storage.q_min = instrument.get<double>("q_min", 0.0);
        c.storage.q_max = instrument.get<double>("q_max");
        c.storage.rate_in_max = instrument.get<double>("rate_in_max");
        c.storage.rate_out_max = instrument.get<double>("rate_out_max");
        c.storage.q_initial = instrument.get<double>("q_initial", c.storage.q_min);
        c.storage.q_terminal = instrument.get<double>("q_terminal", c.storage.q_initial);
        c.storage.volume_step = instrument.get<double>("volume_step", 1.0);
        const auto model = market.get<std::string>("model", std::string("forward_curve"));
        if (model != "forward_curve") {
            fail(market.node()["model"], "market.model", "storage needs model forward_curve");
        }
        if (market.get<double>("mu", 0.0) != 0.0) {
            fail(market.node()["mu"], "market.mu", "storage runs require a drift-less market");
        }
        c.curve_model.beta = market.get<double>("beta", 1.0);
        c.curve_model.sigma = as_double_list(market.raw("sigma"), "market.sigma");
        if (market.has("curve_csv")) {
            std::filesystem::path p = market.get<std::string>("curve_csv");
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            c.curve = read_curve_csv(p.string());
            if (market.has("curve") || market.has("period")) {
                fail(market.node()["curve"], "market.curve", "give either curve or curve_csv");
            }
        } else {
            const auto prices = as_double_list(market.raw("curve"), "market.curve");
            c.curve.period = market.get<double>("period");
            c.curve.prices = prices;
        }
        const auto hedge = strategy.get<std::string>("hedge", std::string("rolling_intrinsic"));
        if (hedge != "rolling_intrinsic" && hedge != "none") {
            fail(strategy.node()["hedge"], "strategy.hedge", "storage hedge is rolling_intrinsic or none");
        }
        c.storage_hedged = hedge == "rolling_intrinsic";
        try {
            c.curve.validate();
            c.curve_model.validate();
            c.storage.validate();
        } catch (const InputError& e) {
            throw ConfigError(e.what());
        }
    } else {
        fail(instrument.node()["type"], "instrument.type", "expected call or storage");
    }

    c.run.n_steps = run.get<int>("steps", 256);
    c.run.n_paths = run.get<int>("paths", 1000);
    c.run.master_seed = run.get<std::uint64_t>("seed", std::uint64_t{1});
    c.run.retain_ledgers = run.get<bool>("retain_ledgers", false);
    c.run.workers = run.get<int>("workers", 1);
    c.run.output_dir = run.get<std::string>("output_dir", std::string("out"));
    if (c.run.n_paths < 1) fail(run.node()["paths"], "run.paths", "must be at least 1");
    if (c.run.n_steps < 1) fail(run.node()["steps"], "run.steps", "must be at least 1");
    if (c.run.workers < 1) fail(run.node()["workers"], "run.workers", "must be at least 1");

    instrument.reject_unknown();
    market.reject_unknown();
    strategy.reject_unknown();
    run.reject_unknown();

    if (c.kind == InstrumentKind::Call) {
        c.strategy.validate(c.call.expiry / c.run.n_steps);
    }
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto base = std::filesystem::path(path).parent_path().string();
    return parse_config(buf.str(), base.empty() ? "." : base);
}

std::string serialize_config(const ScenarioConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "market" << YAML::Value << YAML::BeginMap;
    if (c.kind == InstrumentKind::Call) {
        out << YAML::Key << "model" << YAML::Value << "gbm";
        out << YAML::Key << "f0" << YAML::Value << c.gbm.f0;
        out << YAML::Key << "mu" << YAML::Value << c.gbm.mu0;
        out << YAML::Key << "sigma" << YAML::Value << c.gbm.sigma0;
        out << YAML::Key << "numeraire_rate" << YAML::Value << c.numeraire_rate;
    } else {
        out << YAML::Key << "model" << YAML::Value << "forward_curve";
        out << YAML::Key << "sigma" << YAML::Value << YAML::Flow << c.curve_model.sigma;
        out << YAML::Key << "beta" << YAML::Value << c.curve_model.beta;
        out << YAML::Key << "period" << YAML::Value << c.curve.period;
        out << YAML::Key << "curve" << YAML::Value << YAML::Flow << c.curve.prices;
    }
    out << YAML::EndMap;

    out << YAML::Key << "instrument" << YAML::Value << YAML::BeginMap;
    if (c.kind == InstrumentKind::Call) {
        out << YAML::Key << "type" << YAML::Value << "call";
        out << YAML::Key << "strike" << YAML::Value << c.call.strike;
        out << YAML::Key << "expiry" << YAML::Value << c.call.expiry;
    } else {
        const auto& s = c.storage;
        out << YAML::Key << "type" << YAML::Value << "storage";
        out << YAML::Key << "q_min" << YAML::Value << s.q_min;
        out << YAML::Key << "q_max" << YAML::Value << s.q_max;
        out << YAML::Key << "rate_in_max" << YAML::Value << s.rate_in_max;
        out << YAML::Key << "rate_out_max" << YAML::Value << s.rate_out_max;
        out << YAML::Key << "q_initial" << YAML::Value << s.q_initial;
        out << YAML::Key << "q_terminal" << YAML::Value << s.q_terminal;
        out << YAML::Key << "volume_step" << YAML::Value << s.volume_step;
    }
    out << YAML::EndMap;

    out << YAML::Key << "strategy" << YAML::Value << YAML::BeginMap;
    if (c.kind == InstrumentKind::Call) {
        out << YAML::Key << "hedge" << YAML::Value << to_string(c.strategy.kind);
        out << YAML::Key << "pricing" << YAML::Value << to_string(c.model);
        out << YAML::Key << "k" << YAML::Value << c.strategy.k;
        out << YAML::Key << "inner" << YAML::Value << to_string(c.strategy.inner);
    } else {
        out << YAML::Key << "hedge" << YAML::Value << storage_hedge_name(c.storage_hedged);
    }
    out << YAML::EndMap;

    out << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "steps" << YAML::Value << c.run.n_steps;
    out << YAML::Key << "paths" << YAML::Value << c.run.n_paths;
    out << YAML::Key << "seed" << YAML::Value << c.run.master_seed;
    out << YAML::Key << "retain_ledgers" << YAML::Value << c.run.retain_ledgers;
    out << YAML::Key << "workers" << YAML::Value << c.run.workers;
    out << YAML::Key << "output_dir" << YAML::Value << c.run.output_dir;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

nlohmann::json config_to_json(const ScenarioConfig& c) {
    using nlohmann::json;
    json j;
    if (c.kind == InstrumentKind::Call) {
        j["market"] = {{"model", "gbm"},
                       {"f0", c.gbm.f0},
                       {"mu", c.gbm.mu0},
                       {"sigma", c.gbm.sigma0},
                       {"numeraire_rate", c.numeraire_rate}};
        j["instrument"] = {{"type", "call"}, {"strike", c.call.strike}, {"expiry", c.call.expiry}};
        j["strategy"] = {{"hedge", to_string(c.strategy.kind)},
                         {"pricing", to_string(c.model)},
                         {"k", c.strategy.k},
                         {"inner", to_string(c.strategy.inner)}};
    } else {
        const auto& s = c.storage;
        j["market"] = {{"model", "forward_curve"},
                       {"sigma", c.curve_model.sigma},
                       {"beta", c.curve_model.beta},
                       {"period", c.curve.period},
                       {"curve", c.curve.prices}};
        j["instrument"] = {{"type", "storage"},        {"q_min", s.q_min},
                           {"q_max", s.q_max},         {"rate_in_max", s.rate_in_max},
                           {"rate_out_max", s.rate_out_max}, {"q_initial", s.q_initial},
                           {"q_terminal", s.q_terminal}, {"volume_step", s.volume_step}};
        j["strategy"] = {{"hedge", storage_hedge_name(c.storage_hedged)}};
    }
    // Output location and worker count do not change results.
    j["run"] = {{"steps", c.run.n_steps},
                {"paths", c.run.n_paths},
                {"seed", c.run.master_seed},
                {"retain_ledgers", c.run.retain_ledgers}};
    return j;
}

std::string config_hash(const ScenarioConfig& config) {
    // FNV-1a over the canonical dump; nlohmann::json keeps object keys sorted.
    const std::string canonical = config_to_json(config).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

VanillaRunSpec to_vanilla_run(const ScenarioConfig& c, Retention retention) {
    if (c.kind != InstrumentKind::Call) throw ConfigError("scenario is not a call scenario");
    VanillaRunSpec s;
    s.market = c.gbm;
    s.grid = TimeGrid{0.0, c.call.expiry, c.run.n_steps};
    s.call = c.call;
    s.model = c.model;
    s.strategy = c.strategy;
    s.n_paths = c.run.n_paths;
    s.master_seed = c.run.master_seed;
    s.retention = retention;
    s.workers = c.run.workers;
    return s;
}

StorageRunSpec to_storage_run(const ScenarioConfig& c, Retention retention) {
    if (c.kind != InstrumentKind::Storage) throw ConfigError("scenario is not a storage scenario");
    StorageRunSpec s;
    s.storage = c.storage;
    s.initial_curve = c.curve;
    s.model = c.curve_model;
    s.hedged = c.storage_hedged;
    s.n_paths = c.run.n_paths;
    s.master_seed = c.run.master_seed;
    s.retention = retention;
    s.workers = c.run.workers;
    return s;
}

}  // namespace hedgesim
