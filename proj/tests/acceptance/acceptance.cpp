// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "../support/oracles.hpp"
#include "hedgesim/commands.hpp"
#include "hedgesim/hedge_engine.hpp"
#include "hedgesim/rolling_intrinsic.hpp"
#include "hedgesim/storage_dispatch.hpp"
#include "hedgesim/vanilla_pricing.hpp"

using namespace hedgesim;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

VanillaRunSpec vanilla(HedgeKind kind, PricingModel model, double f0, double mu, int n_paths,
                       int n_steps, std::uint64_t seed, Retention retention = Retention::Summary) {
    VanillaRunSpec s;
    s.market = GbmSpec{f0, mu, 0.2};
    s.grid = TimeGrid{0.0, 1.0, n_steps};
    s.call = CallSpec{100.0, 1.0};
    s.model = model;
    s.strategy = HedgeStrategy{kind};
    s.n_paths = n_paths;
    s.master_seed = seed;
    s.retention = retention;
    s.workers = workers();
    return s;
}

StorageRunSpec seasonal_storage(bool hedged, int n_paths, Retention retention) {
    StorageRunSpec s;
    s.storage = StorageSpec{0.0, 10.0, 3.0, 4.0, 0.0, 0.0, 1.0};
    s.initial_curve.period = 1.0 / 12.0;
    s.initial_curve.prices = {30.4, 28.1, 25.3, 22.6, 20.2, 19.1,
                              19.8, 21.9, 25.2, 29.3, 33.1, 35.4};
    s.model = CurveFactorModel{{0.35}, 2.0};
    s.hedged = hedged;
    s.n_paths = n_paths;
    s.master_seed = 20241;
    s.retention = retention;
    s.workers = workers();
    return s;
}

const std::vector<double> kF0{50, 80, 100, 120, 200};
const std::vector<double> kSigma{0.1, 0.2, 0.4};
const std::vector<double> kHorizon{0.25, 1, 4};

Outcome closed_form_identity() {
    double worst = 0.0;
    for (double f0 : kF0)
        for (double s : kSigma)
            for (double T : kHorizon) {
                const CallSpec call{100.0, T};
                const double cf = time_value_closed_form(call, f0, s, T);
                const double bs = bs_price(f0, 0.0, call, s) - intrinsic_price(f0, call);
                worst = std::max(worst, std::abs(cf - bs));
            }
    return {worst < 1e-8, fmt("max |closed form - (BS - intrinsic)| = %.3e (bound 1e-8)", worst)};
}

Outcome quadrature_oracle() {
    double worst = 0.0;
    for (double f0 : kF0)
        for (double s : kSigma)
            for (double T : kHorizon) {
                const CallSpec call{100.0, T};
                worst = std::max(worst, std::abs(time_value_closed_form(call, f0, s, T) -
                                                 time_value_by_quadrature(call, f0, s, T)));
            }
    return {worst < 1e-6, fmt("max |closed form - quadrature| = %.3e (bound 1e-6)", worst)};
}

Outcome ledger_identities() {
    bool ok = true;
    std::string detail;
    for (auto kind : {HedgeKind::None, HedgeKind::RiskNeutralDelta, HedgeKind::DriftAdjustedDelta,
                      HedgeKind::IntrinsicDelta, HedgeKind::BidOffer}) {
        const auto model = kind == HedgeKind::DriftAdjustedDelta ? PricingModel::Probabilistic
                           : kind == HedgeKind::IntrinsicDelta   ? PricingModel::Intrinsic
                                                                 : PricingModel::RiskNeutral;
        auto spec = vanilla(kind, model, 100.0, 0.1, 1000, 512, 31, Retention::Full);
        if (kind == HedgeKind::BidOffer) spec.strategy.k = 20.0;
        const auto run = run_paths(spec);
        const auto check = vanilla_ledger_check(run.ledgers);
        ok = ok && check.pass;
        detail += fmt("%s %.2e; ", to_string(kind), check.measured);
    }
    return {ok, "max abs residual per strategy (relative bound 1e-12): " + detail};
}

Outcome variance_collapse() {
    const std::vector<int> steps{64, 256, 1024, 4096};
    std::vector<double> log_n, log_std;
    double mean_fine = 0.0, se_fine = 0.0, std_coarse = 0.0, std_fine = 0.0;
    for (int n : steps) {
        const auto run =
            run_paths(vanilla(HedgeKind::RiskNeutralDelta, PricingModel::RiskNeutral, 100.0, 0.0, 20000, n, 4));
        log_n.push_back(std::log(n));
        log_std.push_back(std::log(run.distribution.stddev));
        if (n == 64) std_coarse = run.distribution.stddev;
        if (n == 4096) {
            std_fine = run.distribution.stddev;
            mean_fine = run.distribution.mean;
            se_fine = run.distribution.stderr_mean;
        }
    }
    const double slope = least_squares_slope(log_n, log_std);
    const double ratio = std_coarse / std_fine;
    const double target = bs_price(100.0, 0.0, CallSpec{100.0, 1.0}, 0.2);
    const double z = std::abs(mean_fine - target) / se_fine;
    const bool ok = ratio >= 4.0 && slope >= -0.65 && slope <= -0.35 && z <= 4.0;
    return {ok, fmt("std ratio 64/4096 = %.3f (>= 4), slope = %.4f (in [-0.65,-0.35]), "
                    "mean %.5f vs %.5f: %.2f SE",
                    ratio, slope, mean_fine, target, z)};
}

Outcome unhedged_expectation() {
    const CallSpec call{100.0, 1.0};
    const auto a = run_paths(vanilla(HedgeKind::None, PricingModel::RiskNeutral, 100.0, 0.0, 100000, 16, 5));
    const auto b = run_paths(vanilla(HedgeKind::None, PricingModel::RiskNeutral, 100.0, 0.1, 100000, 16, 6));
    const double za = std::abs(a.distribution.mean - bs_price(100.0, 0.0, call, 0.2)) / a.distribution.stderr_mean;
    const double zb = std::abs(b.distribution.mean - probabilistic_price(100.0, 0.0, call, 0.2, 0.1)) /
                      b.distribution.stderr_mean;
    return {za <= 4.0 && zb <= 4.0,
            fmt("mu=0: %.2f SE from bs_price; mu=0.1: %.2f SE from probabilistic_price", za, zb)};
}

Outcome intrinsic_monotonicity() {
    std::size_t violations = 0;
    double min_change = INFINITY;
    for (double mu : {0.0, 0.1}) {
        const auto audit = intrinsic_monotonicity_audit(
            run_paths(vanilla(HedgeKind::IntrinsicDelta, PricingModel::Intrinsic, 100.0, mu, 10000, 512, 7)));
        violations += audit.violations;
        min_change = std::min(min_change, audit.min_step_change);
    }
    return {violations == 0, fmt("%zu violations over 2 x 10^4 paths x 512 steps; min step change %.3e",
                                 violations, min_change)};
}

Outcome intrinsic_time_value() {
    bool ok = true;
    std::string detail;
    for (double f0 : {100.0, 50.0, 150.0}) {
        const auto run = run_paths(
            vanilla(HedgeKind::IntrinsicDelta, PricingModel::Intrinsic, f0, 0.0, 100000, 2048, 8));
        const auto tv = intrinsic_time_value_estimate(run);
        const double cf = time_value_closed_form(CallSpec{100.0, 1.0}, f0, 0.2, 1.0);
        const double z = std::abs(tv.value - cf) / tv.stderr_value;
        ok = ok && z <= 4.0;
        detail += fmt("f0=%g: %.5f vs %.5f (%.2f SE); ", f0, tv.value, cf, z);
    }
    return {ok, detail};
}

Outcome drift_decomposition_check() {
    bool ok = true;
    std::string detail;
    const int paths = 10000, steps = 4096;
    struct Case {
        HedgeKind kind;
        PricingModel model;
    };
    for (auto c : {Case{HedgeKind::None, PricingModel::RiskNeutral},
                   Case{HedgeKind::RiskNeutralDelta, PricingModel::RiskNeutral},
                   Case{HedgeKind::DriftAdjustedDelta, PricingModel::Probabilistic}}) {
        const auto run = run_paths(vanilla(c.kind, c.model, 100.0, 0.1, paths, steps, 9));
        const auto e = drift_decomposition(run, c.model);
        ok = ok && e.within(4.0);
        detail += fmt("%s: %.4f vs %.4f (%.2f SE); ", to_string(c.kind), e.measured, e.predicted,
                      std::abs(e.z()));
    }
    const double f0 = bs_price(100.0, 0.0, CallSpec{100.0, 1.0}, 0.2);
    for (double mu : {-0.1, 0.0, 0.1}) {
        const auto run = run_paths(
            vanilla(HedgeKind::RiskNeutralDelta, PricingModel::RiskNeutral, 100.0, mu, paths, steps, 10));
        const double z = std::abs(run.distribution.mean - f0) / run.distribution.stderr_mean;
        ok = ok && z <= 4.0;
        detail += fmt("RN mu=%g: %.2f SE from f(0); ", mu, z);
    }
    return {ok, detail};
}

Outcome storage_optimizer_exactness() {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> price(1, 99);
    std::uniform_int_distribution<int> periods_d(2, 5), rate_d(1, 4), level_d(0, 4);
    int exact = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int periods = periods_d(rng);
        std::vector<double> prices(periods);
        for (auto& p : prices) p = price(rng);
        StorageSpec spec{0.0, 4.0, double(rate_d(rng)), double(rate_d(rng)), 0.0, 0.0, 1.0};
        // Draw levels until the terminal level is reachable.
        IntrinsicSolution sol;
        oracle::BruteForceResult brute;
        for (;;) {
            spec.q_initial = level_d(rng);
            spec.q_terminal = level_d(rng);
            brute = oracle::brute_force_storage(prices, 5, int(spec.rate_in_max), int(spec.rate_out_max),
                                                int(spec.q_initial), int(spec.q_terminal));
            if (brute.paths > 0) break;
        }
        sol = intrinsic_optimize(prices, spec, spec.q_initial);
        worst = std::max(worst, std::abs(sol.value - brute.value));
        if (sol.value == brute.value) ++exact;
    }
    return {exact == 20, fmt("%d/20 instances exactly equal; max |DP - brute force| = %g", exact, worst)};
}

Outcome storage_estimators() {
    const auto hedged = run_rolling_intrinsic(seasonal_storage(true, 10000, Retention::Summary));
    const auto bare = run_rolling_intrinsic(seasonal_storage(false, 10000, Retention::Summary));
    const double ab = std::abs(hedged.exercise_estimate.value - hedged.cash_estimate.value);
    const double se = hedged.exercise_vs_cash_stderr;
    const bool bc = hedged.cash_estimate.value == hedged.plan_flow_estimate.value;
    const bool var = hedged.distribution.stddev < bare.distribution.stddev;
    return {ab < 4.0 * se && bc && var,
            fmt("|Va - Vb| = %.4f vs 4 SE = %.4f; Vb %s Vc (%.6f); std hedged %.3f < unhedged %.3f",
                ab, 4.0 * se, bc ? "==" : "!=", hedged.cash_estimate.value, hedged.distribution.stddev,
                bare.distribution.stddev)};
}

Outcome theta_probe() {
    const auto run = run_rolling_intrinsic(seasonal_storage(true, 1000, Retention::Full));
    ThetaProbe total;
    for (const auto& rows : run.ledgers) {
        const auto p = theta_gamma_probe(rows, run.spec.storage);
        total.steps += p.steps;
        total.max_abs_change = std::max(total.max_abs_change, p.max_abs_change);
        total.max_scale = std::max(total.max_scale, p.max_scale);
    }
    // Replays are exact up to the rounding of re-summing the plan value.
    const double bound = 8.0 * std::numeric_limits<double>::epsilon() * total.max_scale;
    return {total.max_abs_change <= bound,
            fmt("%zu frozen-curve replays, max |dS| = %.3e (rounding bound %.3e)", total.steps,
                total.max_abs_change, bound)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"closed_form_identity", closed_form_identity},
        {"quadrature_oracle", quadrature_oracle},
        {"ledger_identities", ledger_identities},
        {"variance_collapse", variance_collapse},
        {"unhedged_expectation", unhedged_expectation},
        {"intrinsic_monotonicity", intrinsic_monotonicity},
        {"intrinsic_time_value", intrinsic_time_value},
        {"drift_decomposition", drift_decomposition_check},
        {"storage_optimizer_exactness", storage_optimizer_exactness},
        {"storage_estimator_equivalence", storage_estimators},
        {"frozen_curve_theta", theta_probe},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        const auto out = criteria[i].run();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %2zu %-30s %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
