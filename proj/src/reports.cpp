#include "hedgesim/reports.hpp"

#include <cstdio>

namespace hedgesim {

using nlohmann::json;

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json distribution_json(const TerminalDistribution& d) {
    json q = json::object();
    for (std::size_t i = 0; i < kReportedQuantiles.size(); ++i) {
        char key[8];
        std::snprintf(key, sizeof key, "p%02d", static_cast<int>(kReportedQuantiles[i] * 100 + 0.5));
        q[key] = d.quantiles[i];
    }
    return {{"n", d.samples.size()},
            {"mean", d.mean},
            {"std", d.stddev},
            {"stderr", d.stderr_mean},
            {"quantiles", q}};
}

json estimator_json(const EstimatorCheck& e) {
    return {{"measured", e.measured},
            {"predicted", e.predicted},
            {"difference", e.difference},
            {"stderr", e.stderr_difference},
            {"z", e.z()}};
}

namespace {

json report_header(const ScenarioConfig& config) {
    return {{"engine", "hedgesim"},
            {"engine_version", kEngineVersion},
            {"config_hash", config_hash(config)},
            {"master_seed", config.run.master_seed},
            {"config", config_to_json(config)}};
}

}  // namespace

json vanilla_report(const ScenarioConfig& config, const VanillaRunResult& run) {
    json r = report_header(config);
    const auto& s = run.spec;
    const double f0 = s.market.f0;
    r["instrument"] = "call";
    r["steps"] = s.grid.n_steps;
    r["paths"] = s.n_paths;
    r["path_steps"] = static_cast<double>(s.n_paths) * s.grid.n_steps;
    r["initial_value"] = run.initial_value;
    r["terminal"] = distribution_json(run.distribution);
    r["mean_currency_units"] =
        to_currency_units(run.distribution.mean, s.call.expiry, NumeraireRate{config.numeraire_rate});

    json prices = {{"risk_neutral", bs_price(f0, 0.0, s.call, s.market.sigma0)},
                   {"probabilistic",
                    probabilistic_price(f0, 0.0, s.call, s.market.sigma0, s.market.mu0)},
                   {"intrinsic", intrinsic_price(f0, s.call)}};
    if (s.market.sigma0 > 0.0) {
        prices["time_value_closed_form"] =
            time_value_closed_form(s.call, f0, s.market.sigma0, s.call.expiry);
    }
    r["prices"] = prices;

    json est = json::object();
    if (!run.diagnostics.empty()) {
        est["drift_decomposition_risk_neutral"] =
            estimator_json(drift_decomposition(run, PricingModel::RiskNeutral));
        est["drift_decomposition_probabilistic"] =
            estimator_json(drift_decomposition(run, PricingModel::Probabilistic));
        if (s.strategy.kind == HedgeKind::IntrinsicDelta && s.model == PricingModel::Intrinsic) {
            const auto audit = intrinsic_monotonicity_audit(run);
            est["intrinsic_monotonicity"] = {{"violations", audit.violations},
                                             {"min_step_change", audit.min_step_change}};
            if (s.market.mu0 == 0.0) {
                const auto tv = intrinsic_time_value_estimate(run);
                est["intrinsic_time_value"] = {{"value", tv.value}, {"stderr", tv.stderr_value}};
            }
        }
    }
    r["estimators"] = est;
    return r;
}

json storage_report(const ScenarioConfig& config, const StorageRunResult& run) {
    json r = report_header(config);
    r["instrument"] = "storage";
    r["steps"] = static_cast<int>(run.spec.initial_curve.prices.size());
    r["paths"] = run.spec.n_paths;
    r["intrinsic_value"] = run.intrinsic0;
    r["terminal"] = distribution_json(run.distribution);
    auto est = [](const StorageEstimate& e) {
        return json{{"value", e.value}, {"stderr", e.stderr_value}};
    };
    r["time_value"] = {{"exercise", est(run.exercise_estimate)},
                       {"cash_flow", est(run.cash_estimate)},
                       {"plan_flow", est(run.plan_flow_estimate)},
                       {"exercise_minus_cash_stderr", run.exercise_vs_cash_stderr}};
    return r;
}

void write_vanilla_ledgers_csv(std::ostream& out, const VanillaRunResult& run) {
    out << "path,step,t,F,dF,h,dh,C,H,P,Pi\n";
    const double t0 = run.spec.grid.t_start;
    for (std::size_t p = 0; p < run.ledgers.size(); ++p) {
        out << p << ",0," << format_number(t0) << ',' << format_number(run.spec.market.f0)
            << ",0,0,0," << format_number(run.initial_value) << ",0,0,"
            << format_number(run.initial_value) << '\n';
        for (const auto& row : run.ledgers[p]) {
            const auto& a = row.after;
            out << p << ',' << row.step << ',' << format_number(a.t) << ','
                << format_number(a.f) << ',' << format_number(row.df) << ','
                << format_number(a.position) << ',' << format_number(row.dh) << ','
                << format_number(a.option) << ',' << format_number(a.hedge_value) << ','
                << format_number(a.cash) << ',' << format_number(a.portfolio) << '\n';
        }
    }
}

void write_storage_ledgers_csv(std::ostream& out, const StorageRunResult& run) {
    out << "path,step,t,level,I,E,S,H,P,Pi\n";
    for (std::size_t p = 0; p < run.ledgers.size(); ++p) {
        for (const auto& row : run.ledgers[p]) {
            const auto& a = row.after;
            out << p << ',' << a.step << ',' << format_number(a.t) << ','
                << format_number(a.level) << ',' << format_number(a.intrinsic) << ','
                << format_number(a.exercise) << ',' << format_number(a.target()) << ','
                << format_number(a.hedge_value) << ',' << format_number(a.cash()) << ','
                << format_number(a.portfolio()) << '\n';
        }
    }
}

}  // namespace hedgesim
