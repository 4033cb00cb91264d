#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hedgesim/config.hpp"
#include "hedgesim/errors.hpp"

using namespace hedgesim;

namespace {

const char* kCall = R"(
market:
  model: gbm
  f0: 100
  mu: 0.1
  sigma: 0.2
instrument:
  type: call
  strike: 95
  expiry: 0.5
strategy:
  hedge: bid_offer
  pricing: probabilistic
  k: 12.5
  inner: drift_adjusted_delta
run:
  steps: 64
  paths: 300
  seed: 18446744073709551615
  retain_ledgers: true
  output_dir: somewhere
)";

const char* kStorage = R"(
market:
  model: forward_curve
  sigma: [0.3, 0.35, 0.4]
  beta: 0.75
  period: 0.25
  curve: [10, 12.5, 11]
instrument:
  type: storage
  q_max: 4
  rate_in_max: 2
  rate_out_max: 2
  volume_step: 0.5
strategy:
  hedge: none
run:
  paths: 10
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, ParsesCallScenario) {
    const auto c = parse_config(kCall);
    EXPECT_EQ(c.kind, InstrumentKind::Call);
    EXPECT_EQ(c.gbm, (GbmSpec{100.0, 0.1, 0.2}));
    EXPECT_EQ(c.call, (CallSpec{95.0, 0.5}));
    EXPECT_EQ(c.strategy, (HedgeStrategy{HedgeKind::BidOffer, 12.5, HedgeKind::DriftAdjustedDelta}));
    EXPECT_EQ(c.model, PricingModel::Probabilistic);
    EXPECT_EQ(c.run.n_steps, 64);
    EXPECT_EQ(c.run.master_seed, 18446744073709551615ull);
    EXPECT_TRUE(c.run.retain_ledgers);
    EXPECT_EQ(c.run.output_dir, "somewhere");
    const auto spec = to_vanilla_run(c, Retention::Summary);
    EXPECT_EQ(spec.grid, (TimeGrid{0.0, 0.5, 64}));
}

TEST(Config, ParsesStorageScenario) {
    const auto c = parse_config(kStorage);
    EXPECT_EQ(c.kind, InstrumentKind::Storage);
    EXPECT_EQ(c.curve.prices, (std::vector<double>{10, 12.5, 11}));
    EXPECT_EQ(c.curve_model.sigma, (std::vector<double>{0.3, 0.35, 0.4}));
    EXPECT_EQ(c.storage.volume_step, 0.5);
    EXPECT_EQ(c.storage.q_initial, 0.0);
    EXPECT_FALSE(c.storage_hedged);
    EXPECT_THROW(to_vanilla_run(c, Retention::Summary), ConfigError);
}

TEST(Config, RoundTrip) {
    for (const char* text : {kCall, kStorage}) {
        const auto c = parse_config(text);
        EXPECT_EQ(parse_config(serialize_config(c)), c);
    }
}

TEST(Config, CurveCsvResolvesAgainstConfigDirectory) {
    const auto dir = std::filesystem::temp_directory_path() / "hedgesim_cfg_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "curve.csv") << "T,F\n1,20\n2,25\n";
        std::ofstream(dir / "s.yaml") << "market: {model: forward_curve, sigma: 0.2, curve_csv: curve.csv}\n"
                                         "instrument: {type: storage, q_max: 1, rate_in_max: 1, rate_out_max: 1}\n";
    }
    const auto c = load_config((dir / "s.yaml").string());
    EXPECT_EQ(c.curve.prices, (std::vector<double>{20, 25}));
    EXPECT_EQ(c.curve.period, 1.0);
    // Serialised form inlines the curve and reproduces the scenario on its own.
    EXPECT_EQ(parse_config(serialize_config(c)), c);
    std::filesystem::remove_all(dir);
}

TEST(Config, HashIgnoresKeyOrderAndOutputLocation) {
    const std::string reordered = R"(
run: {seed: 18446744073709551615, paths: 300, output_dir: elsewhere, steps: 64, retain_ledgers: true, workers: 4}
strategy: {inner: drift_adjusted_delta, k: 12.5, pricing: probabilistic, hedge: bid_offer}
instrument: {expiry: 0.5, strike: 95, type: call}
market: {sigma: 0.2, mu: 0.1, f0: 100, model: gbm}
)";
    EXPECT_EQ(config_hash(parse_config(kCall)), config_hash(parse_config(reordered)));
    auto changed = parse_config(kCall);
    changed.run.master_seed = 1;
    EXPECT_NE(config_hash(changed), config_hash(parse_config(kCall)));
    EXPECT_EQ(config_hash(parse_config(kCall)).size(), 16u);
}

TEST(Config, ErrorsNameLineAndField) {
    std::string text = kCall;
    text.replace(text.find("sigma: 0.2"), 10, "sigma: abc");
    EXPECT_EQ(error_of(text), "line 6: market.sigma: wrong type");

    text = kCall;
    text.replace(text.find("  k: 12.5"), 9, "  kk: 1.0");
    EXPECT_EQ(error_of(text), "line 14: strategy.kk: unknown field");

    text = kCall;
    text.replace(text.find("paths: 300"), 10, "paths: 0");
    EXPECT_EQ(error_of(text), "line 18: run.paths: must be at least 1");

    EXPECT_NE(error_of("instrument: {type: call, expiry: 1}\nmarket: {sigma: 0.2}\n")
                  .find("instrument.strike: required field missing"),
              std::string::npos);
    EXPECT_NE(error_of("instrument: {type: swap}\n").find("instrument.type"), std::string::npos);
    EXPECT_NE(error_of("extra: 1\n").find("unknown block"), std::string::npos);
    EXPECT_NE(error_of("market: [1, 2\n").find("line"), std::string::npos);
}

TEST(Config, SemanticValidation) {
    std::string text = kCall;
    text.replace(text.find("k: 12.5"), 7, "k: 200");
    EXPECT_NE(error_of(text).find("k*dt < 1"), std::string::npos);

    std::string storage = kStorage;
    storage.replace(storage.find("beta: 0.75"), 10, "beta: 0.75\n  mu: 0.05");
    EXPECT_NE(error_of(storage).find("drift-less"), std::string::npos);

    storage = kStorage;
    storage.replace(storage.find("volume_step: 0.5"), 16, "volume_step: 0.3");
    EXPECT_NE(error_of(storage).find("multiple of the volume step"), std::string::npos);

    text = kCall;
    text.replace(text.find("f0: 100"), 7, "f0: -5");
    EXPECT_NE(error_of(text).find("f0"), std::string::npos);
}
