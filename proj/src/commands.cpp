#include "hedgesim/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hedgesim/errors.hpp"
#include "hedgesim/reports.hpp"

namespace hedgesim {

using nlohmann::json;

namespace {

constexpr double kSigmaBound = 4.0;
constexpr int kLedgerCheckPaths = 200;
constexpr double kLedgerRelTolerance = 1e-12;

std::filesystem::path ensure_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::filesystem::create_directories(p);
    return p;
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Retention retention_for(const ScenarioConfig& c) {
    return c.run.retain_ledgers ? Retention::Full : Retention::Summary;
}

Check make_check(std::string name, double measured, double bound, bool pass,
                 std::string detail = {}) {
    return Check{std::move(name), measured, bound, pass, std::move(detail)};
}

Check sigma_check(std::string name, double difference, double stderr_value) {
    const double z = stderr_value > 0.0 ? std::abs(difference) / stderr_value
                                        : (difference == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    std::ostringstream detail;
    detail << "difference " << difference << ", stderr " << stderr_value;
    return make_check(std::move(name), z, kSigmaBound, z <= kSigmaBound, detail.str());
}

double default_bid_offer_k(const ScenarioConfig& c) {
    const double dt = c.call.expiry / c.run.n_steps;
    return c.strategy.k > 0.0 ? c.strategy.k : std::min(20.0, 0.5 / dt);
}

void add_call_checks(const ScenarioConfig& c, VerifyTable& table) {
    const double f0 = c.gbm.f0;
    const double sigma = c.gbm.sigma0;
    if (sigma > 0.0) {
        const double cf = time_value_closed_form(c.call, f0, sigma, c.call.expiry);
        const double bs = bs_price(f0, 0.0, c.call, sigma) - intrinsic_price(f0, c.call);
        table.checks.push_back(make_check("closed_form_vs_black_scholes", std::abs(cf - bs), 1e-8,
                                          std::abs(cf - bs) < 1e-8));
        const double quad = time_value_by_quadrature(c.call, f0, sigma, c.call.expiry);
        table.checks.push_back(make_check("closed_form_vs_quadrature", std::abs(cf - quad), 1e-6,
                                          std::abs(cf - quad) < 1e-6));
        const double ji = time_value_via_gaussian_integral(c.call, f0, sigma, c.call.expiry);
        table.checks.push_back(make_check("closed_form_vs_gaussian_integral", std::abs(cf - ji),
                                          1e-8, std::abs(cf - ji) < 1e-8));
    }

    auto ledger_spec = to_vanilla_run(c, Retention::Full);
    ledger_spec.n_paths = std::min(ledger_spec.n_paths, kLedgerCheckPaths);
    const auto ledger_run = run_paths(ledger_spec);
    table.checks.push_back(vanilla_ledger_check(ledger_run.ledgers));

    auto unhedged = to_vanilla_run(c, Retention::Summary);
    unhedged.strategy = HedgeStrategy{HedgeKind::None};
    const auto unhedged_run = run_paths(unhedged);
    const double g0 = probabilistic_price(f0, 0.0, c.call, sigma, c.gbm.mu0);
    table.checks.push_back(sigma_check("unhedged_expectation_vs_probabilistic_price",
                                       unhedged_run.distribution.mean - g0,
                                       unhedged_run.distribution.stderr_mean));

    const auto configured = run_paths(to_vanilla_run(c, Retention::Summary));
    const auto drift = drift_decomposition(configured, PricingModel::RiskNeutral);
    table.checks.push_back(
        sigma_check("drift_decomposition_risk_neutral", drift.difference, drift.stderr_difference));

    auto intrinsic = to_vanilla_run(c, Retention::Summary);
    intrinsic.strategy = HedgeStrategy{HedgeKind::IntrinsicDelta};
    intrinsic.model = PricingModel::Intrinsic;
    const auto intrinsic_run = run_paths(intrinsic);
    const auto audit = intrinsic_monotonicity_audit(intrinsic_run);
    std::ostringstream detail;
    detail << "min step change " << audit.min_step_change;
    table.checks.push_back(make_check("intrinsic_monotonicity_violations",
                                      static_cast<double>(audit.violations), 0.0,
                                      audit.violations == 0, detail.str()));
    if (c.gbm.mu0 == 0.0 && sigma > 0.0) {
        const auto tv = intrinsic_time_value_estimate(intrinsic_run);
        const double cf = time_value_closed_form(c.call, f0, sigma, c.call.expiry);
        table.checks.push_back(
            sigma_check("intrinsic_time_value_vs_closed_form", tv.value - cf, tv.stderr_value));
    }
}

void add_storage_checks(const ScenarioConfig& c, VerifyTable& table) {
    auto ledger_spec = to_storage_run(c, Retention::Full);
    ledger_spec.n_paths = std::min(ledger_spec.n_paths, kLedgerCheckPaths);
    const auto ledger_run = run_rolling_intrinsic(ledger_spec);
    table.checks.push_back(storage_ledger_check(ledger_run.ledgers, ledger_spec.hedged));

    ThetaProbe probe;
    for (const auto& rows : ledger_run.ledgers) {
        const auto p = theta_gamma_probe(rows, c.storage);
        probe.steps += p.steps;
        probe.max_abs_change = std::max(probe.max_abs_change, p.max_abs_change);
        probe.max_scale = std::max(probe.max_scale, p.max_scale);
    }
    const double theta_bound = 16.0 * std::numeric_limits<double>::epsilon() * probe.max_scale;
    table.checks.push_back(make_check("frozen_curve_theta", probe.max_abs_change, theta_bound,
                                      probe.max_abs_change <= theta_bound));

    const auto run = run_rolling_intrinsic(to_storage_run(c, Retention::Summary));
    table.checks.push_back(sigma_check("exercise_vs_cash_flow_estimator",
                                       run.exercise_estimate.value - run.cash_estimate.value,
                                       run.exercise_vs_cash_stderr));
    if (c.storage_hedged) {
        const double bc = std::abs(run.cash_estimate.value - run.plan_flow_estimate.value);
        table.checks.push_back(make_check("cash_flow_equals_plan_flow", bc, 0.0, bc == 0.0));
    }
    const double exercise_mean = run.exercise_estimate.value + run.intrinsic0;
    table.checks.push_back(sigma_check("exercise_only_expectation",
                                       run.distribution.mean - exercise_mean,
                                       run.exercise_vs_cash_stderr));
    if (c.storage_hedged) {
        auto unhedged = to_storage_run(c, Retention::Summary);
        unhedged.hedged = false;
        const auto bare = run_rolling_intrinsic(unhedged);
        const double hedged_std = run.distribution.stddev;
        const double bare_std = bare.distribution.stddev;
        const bool degenerate = bare_std == 0.0 && hedged_std == 0.0;
        std::ostringstream detail;
        detail << "hedged std " << hedged_std << ", unhedged std " << bare_std;
        table.checks.push_back(make_check("hedge_variance_reduction", hedged_std, bare_std,
                                          degenerate || hedged_std < bare_std, detail.str()));
    }
}

}  // namespace

void apply_overrides(ScenarioConfig& c, const CliOverrides& o) {
    if (o.seed) c.run.master_seed = *o.seed;
    if (o.paths) c.run.n_paths = *o.paths;
    if (o.steps) c.run.n_steps = *o.steps;
    if (o.workers) c.run.workers = *o.workers;
    if (o.out) c.run.output_dir = *o.out;
    if (o.ledgers) c.run.retain_ledgers = true;
    if (c.run.n_paths < 1) throw ConfigError("run.paths: must be at least 1");
    if (c.run.n_steps < 1) throw ConfigError("run.steps: must be at least 1");
    if (c.run.workers < 1) throw ConfigError("run.workers: must be at least 1");
    if (c.kind == InstrumentKind::Call) c.strategy.validate(c.call.expiry / c.run.n_steps);
}

json cmd_price(const ScenarioConfig& c, std::optional<double> at) {
    if (c.kind == InstrumentKind::Storage) {
        const auto sol = intrinsic_optimize(c.curve.prices, c.storage, c.storage.q_initial);
        json plan = json::array();
        double level = c.storage.q_initial;
        for (std::size_t j = 0; j < sol.plan.moves.size(); ++j) {
            level += sol.plan.moves[j];
            plan.push_back({{"delivery_time", c.curve.maturity(j)},
                            {"forward", c.curve.prices[j]},
                            {"volume", sol.plan.moves[j]},
                            {"rate", sol.plan.moves[j] / c.curve.period},
                            {"level_after", level}});
        }
        return {{"instrument", "storage"}, {"intrinsic_value", sol.value}, {"plan", plan}};
    }
    const double t = at.value_or(0.0);
    const double f0 = c.gbm.f0;
    const double sigma = c.gbm.sigma0;
    const double horizon = c.call.expiry - t;
    json out = {{"instrument", "call"},
                {"f0", f0},
                {"t", t},
                {"strike", c.call.strike},
                {"expiry", c.call.expiry},
                {"risk_neutral", bs_price(f0, t, c.call, sigma)},
                {"probabilistic", probabilistic_price(f0, t, c.call, sigma, c.gbm.mu0)},
                {"intrinsic", intrinsic_price(f0, c.call)}};
    out["time_value_closed_form"] =
        (horizon > 0.0 && sigma > 0.0) ? time_value_closed_form(c.call, f0, sigma, horizon) : 0.0;
    return out;
}

SimulateOutput cmd_simulate(const ScenarioConfig& c) {
    SimulateOutput out;
    const auto dir = ensure_dir(c.run.output_dir);
    const auto start = std::chrono::steady_clock::now();
    if (c.kind == InstrumentKind::Call) {
        const auto run = run_paths(to_vanilla_run(c, retention_for(c)));
        out.report = vanilla_report(c, run);
        if (c.run.retain_ledgers) {
            out.ledger_path = (dir / "ledgers.csv").string();
            std::ofstream csv(out.ledger_path);
            write_vanilla_ledgers_csv(csv, run);
        }
    } else {
        const auto run = run_rolling_intrinsic(to_storage_run(c, retention_for(c)));
        out.report = storage_report(c, run);
        if (c.run.retain_ledgers) {
            out.ledger_path = (dir / "ledgers.csv").string();
            std::ofstream csv(out.ledger_path);
            write_storage_ledgers_csv(csv, run);
        }
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report_path = (dir / "report.json").string();
    write_json(out.report_path, out.report);
    // Timing lives outside report.json so that reports stay byte-identical.
    write_json(dir / "timing.json", {{"wall_seconds", out.wall_seconds},
                                     {"workers", c.run.workers}});
    return out;
}

json cmd_sweep(const ScenarioConfig& c) {
    std::vector<ScenarioConfig> variants;
    std::vector<std::string> names;
    if (c.kind == InstrumentKind::Call) {
        for (auto k : {HedgeKind::None, HedgeKind::RiskNeutralDelta, HedgeKind::DriftAdjustedDelta,
                       HedgeKind::IntrinsicDelta, HedgeKind::BidOffer}) {
            ScenarioConfig v = c;
            v.strategy = HedgeStrategy{k};
            if (k == HedgeKind::BidOffer) {
                v.strategy.k = default_bid_offer_k(c);
                v.strategy.inner = c.strategy.kind == HedgeKind::BidOffer
                                       ? c.strategy.inner
                                       : HedgeKind::RiskNeutralDelta;
            }
            variants.push_back(v);
            names.emplace_back(to_string(k));
        }
    } else {
        for (bool hedged : {true, false}) {
            ScenarioConfig v = c;
            v.storage_hedged = hedged;
            variants.push_back(v);
            names.emplace_back(hedged ? "rolling_intrinsic" : "none");
        }
    }
    const auto dir = ensure_dir(c.run.output_dir);
    json table = json::array();
    std::ofstream csv(dir / "comparison.csv");
    csv << "strategy,mean,std,stderr,p01,p50,p99\n";
    for (std::size_t i = 0; i < variants.size(); ++i) {
        auto& v = variants[i];
        v.run.output_dir = (dir / names[i]).string();
        const auto sim = cmd_simulate(v);
        const auto& term = sim.report["terminal"];
        const json row = {{"strategy", names[i]},
                          {"mean", term["mean"]},
                          {"std", term["std"]},
                          {"stderr", term["stderr"]},
                          {"p01", term["quantiles"]["p01"]},
                          {"p50", term["quantiles"]["p50"]},
                          {"p99", term["quantiles"]["p99"]},
                          {"report", sim.report_path}};
        table.push_back(row);
        csv << names[i] << ',' << format_number(row["mean"]) << ',' << format_number(row["std"])
            << ',' << format_number(row["stderr"]) << ',' << format_number(row["p01"]) << ','
            << format_number(row["p50"]) << ',' << format_number(row["p99"]) << '\n';
    }
    return table;
}

bool VerifyTable::all_pass() const {
    for (const auto& c : checks) {
        if (!c.pass) return false;
    }
    return true;
}

Check vanilla_ledger_check(std::span<const std::vector<LedgerRow>> ledgers) {
    LedgerAuditResult worst;
    std::optional<std::string> failure;
    for (std::size_t p = 0; p < ledgers.size(); ++p) {
        const auto a = audit_ledger(ledgers[p], kLedgerRelTolerance);
        worst.rows_checked += a.rows_checked;
        worst.max_cash_residual = std::max(worst.max_cash_residual, a.max_cash_residual);
        worst.max_self_financing = std::max(worst.max_self_financing, a.max_self_financing);
        worst.max_portfolio_residual =
            std::max(worst.max_portfolio_residual, a.max_portfolio_residual);
        if (!failure && a.failure) failure = "path " + std::to_string(p) + ": " + *a.failure;
    }
    const double measured = std::max({worst.max_cash_residual, worst.max_self_financing,
                                      worst.max_portfolio_residual});
    return make_check("ledger_self_financing", measured, kLedgerRelTolerance, !failure,
                      failure.value_or(std::to_string(worst.rows_checked) +
                                       " rows; bound is relative to each row's scale"));
}

Check storage_ledger_check(std::span<const std::vector<StorageRow>> ledgers, bool hedged) {
    StorageAuditResult worst;
    std::optional<std::string> failure;
    for (std::size_t p = 0; p < ledgers.size(); ++p) {
        const auto a = audit_storage_ledger(ledgers[p], hedged, kLedgerRelTolerance);
        worst.rows_checked += a.rows_checked;
        worst.max_self_financing = std::max(worst.max_self_financing, a.max_self_financing);
        worst.max_mirror_residual = std::max(worst.max_mirror_residual, a.max_mirror_residual);
        worst.max_portfolio_residual =
            std::max(worst.max_portfolio_residual, a.max_portfolio_residual);
        if (!failure && a.failure) failure = "path " + std::to_string(p) + ": " + *a.failure;
    }
    const double measured = std::max({worst.max_self_financing, worst.max_mirror_residual,
                                      worst.max_portfolio_residual});
    return make_check("storage_ledger_self_financing", measured, kLedgerRelTolerance, !failure,
                      failure.value_or(std::to_string(worst.rows_checked) +
                                       " rows; bound is relative to each row's scale"));
}

VerifyTable cmd_verify(const ScenarioConfig& c) {
    VerifyTable table;
    if (c.kind == InstrumentKind::Call) {
        add_call_checks(c, table);
    } else {
        add_storage_checks(c, table);
    }
    return table;
}

void print_verify_table(std::ostream& out, const VerifyTable& table) {
    out << std::left << std::setw(46) << "check" << std::setw(16) << "measured" << std::setw(16)
        << "bound" << "result\n";
    for (const auto& c : table.checks) {
        out << std::left << std::setw(46) << c.name << std::setw(16) << c.measured
            << std::setw(16) << c.bound << (c.pass ? "PASS" : "FAIL");
        if (!c.detail.empty()) out << "  (" << c.detail << ')';
        out << '\n';
    }
}

}  // namespace hedgesim
