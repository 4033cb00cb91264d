// hedgesim: price, simulate, verify and sweep self-financing hedging scenarios.
#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <string>

#include "hedgesim/commands.hpp"
#include "hedgesim/config.hpp"
#include "hedgesim/errors.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
    nlohmann::json err = {{"error", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Retarded-action hedging simulator"};
    app.require_subcommand(1);

    std::string config_path;
    hedgesim::CliOverrides overrides;
    std::optional<double> at;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Scenario file")->required();
        sub->add_option("--seed", overrides.seed, "Master seed");
        sub->add_option("--paths", overrides.paths, "Number of paths");
        sub->add_option("--steps", overrides.steps, "Steps per path");
        sub->add_option("--out", overrides.out, "Output directory");
        sub->add_flag("--ledgers", overrides.ledgers, "Write per-path ledgers");
        sub->add_option("--workers", overrides.workers, "Worker threads");
    };
    auto* price = app.add_subcommand("price", "Closed-form prices / intrinsic plan");
    add_common(price);
    price->add_option("--at", at, "Valuation time for calls");
    auto* simulate = app.add_subcommand("simulate", "Run the configured scenario");
    add_common(simulate);
    auto* verify = app.add_subcommand("verify", "Run the invariant checks");
    add_common(verify);
    auto* sweep = app.add_subcommand("sweep", "Run every strategy and compare");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        auto config = hedgesim::load_config(config_path);
        hedgesim::apply_overrides(config, overrides);

        if (price->parsed()) {
            std::cout << hedgesim::cmd_price(config, at).dump(2) << '\n';
            return 0;
        }
        if (simulate->parsed()) {
            const auto out = hedgesim::cmd_simulate(config);
            std::cerr << "wall time " << out.wall_seconds << " s\n";
            std::cout << out.report_path << '\n';
            if (!out.ledger_path.empty()) std::cout << out.ledger_path << '\n';
            return 0;
        }
        if (sweep->parsed()) {
            std::cout << hedgesim::cmd_sweep(config).dump(2) << '\n';
            return 0;
        }
        const auto table = hedgesim::cmd_verify(config);
        hedgesim::print_verify_table(std::cout, table);
        return table.all_pass() ? 0 : 1;
    } catch (const hedgesim::ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const hedgesim::InputError& e) {
        return fail("input", e.what(), 2);
    } catch (const hedgesim::InfeasibleError& e) {
        return fail("infeasible", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 3);
    }
}
