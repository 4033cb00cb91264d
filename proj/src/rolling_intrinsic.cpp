#include "hedgesim/rolling_intrinsic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hedgesim/errors.hpp"
#include "hedgesim/parallel.hpp"

namespace hedgesim {

namespace {

constexpr double kMaxRetainedRows = 2e7;

struct PathCursor {
    StoragePathState path;
    int level_index = 0;
};

}  // namespace

TimeGrid StorageRunSpec::grid() const {
    const int n = static_cast<int>(initial_curve.prices.size());
    return TimeGrid{0.0, n * initial_curve.period, n};
}

void StorageRunSpec::validate() const {
    storage.validate();
    initial_curve.validate();
    model.validate();
    if (initial_curve.first_period != 0 || initial_curve.t != 0.0) {
        throw ConfigError("storage runs start from the t = 0 curve");
    }
    if (model.sigma.size() != 1 && model.sigma.size() != initial_curve.prices.size()) {
        throw ConfigError("curve volatility list must have one entry or one per period");
    }
    if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    const auto lattice = VolumeLattice::from(storage);
    const int periods = static_cast<int>(initial_curve.prices.size());
    const int bad = first_infeasible_period(lattice, lattice.initial, periods);
    if (bad >= 0) {
        throw InfeasibleError("storage terminal level unreachable from q_initial; first violating "
                              "period " + std::to_string(bad),
                              bad);
    }
    const double rows = static_cast<double>(n_paths) * (periods + 1);
    if (retention == Retention::Full && rows > kMaxRetainedRows) {
        throw ConfigError("retaining storage ledgers exceeds the row limit");
    }
}

StoragePathState start_storage_path(const StorageRunSpec& spec, const VolumeLattice& lattice) {
    StoragePathState p;
    p.curve = spec.initial_curve;
    const auto sol = intrinsic_optimize(p.curve.prices, lattice, lattice.initial);
    p.plan = sol.plan.moves;
    p.hedge.assign(p.plan.size(), 0.0);
    p.state.level = spec.storage.q_initial;
    p.state.intrinsic = sol.value;
    if (spec.hedged) {
        // Initial hedge bought before any move: H = -I, P = I, Pi unchanged.
        p.hedge = p.plan;
        p.state.hedge_value = backward_dot(p.hedge, p.curve.prices);
        p.state.cash_setup = -p.state.hedge_value;
    }
    return p;
}

StorageRow rolling_intrinsic_step(StoragePathState& path, const StorageRunSpec& spec,
                                  const VolumeLattice& lattice, PathRng& rng, bool keep_snapshot) {
    auto& s = path.state;
    auto& curve = path.curve;
    if (curve.prices.empty()) throw InputError("storage horizon already exhausted");

    StorageRow row;
    if (keep_snapshot) {
        row.curve_before = curve.prices;
        row.first_period = curve.first_period;
    }
    row.level_before = s.level;
    row.intrinsic_before = s.intrinsic;
    const double old_hedge_value = s.hedge_value;
    const double old_cash = s.cash();

    // (1) Exercise the delivering period at the old curve.
    const double spot = curve.prices.front();
    const double move = path.plan.front();
    row.exercise_move = move;
    row.d_exercise = move * spot;
    row.rolloff = path.hedge.front() * spot;
    row.settlement = row.rolloff - row.d_exercise;
    s.exercise += row.d_exercise;
    const int level_index =
        lattice.level_of(s.level) + static_cast<int>(std::lround(move / lattice.step));
    s.level = lattice.volume_of(level_index);

    // (2) Move the surviving part of the curve.
    const std::size_t remaining = curve.prices.size() - 1;
    std::vector<double> prices(curve.prices.begin() + 1, curve.prices.end());
    std::vector<double> increments(remaining);
    std::vector<double> scratch(remaining);
    evolve_prices(prices, curve.first_period + 1, curve.period, spec.model, curve.period, rng,
                  increments, scratch);
    const std::span<const double> old_hedge(path.hedge.data() + 1, remaining);
    const std::span<const double> old_plan(path.plan.data() + 1, remaining);
    row.hedge_mtm = backward_dot(old_hedge, increments);

    // (3) Re-solve the intrinsic problem at the new curve and level.
    IntrinsicSolution sol;
    if (remaining > 0) {
        sol = intrinsic_optimize(prices, lattice, level_index);
    } else if (level_index != lattice.terminal) {
        throw InvariantViolation("storage horizon ended away from the terminal level");
    }

    // (4) Rebalance at the new prices.
    std::vector<double> plan_change(remaining);
    for (std::size_t j = 0; j < remaining; ++j) plan_change[j] = sol.plan.moves[j] - old_plan[j];
    row.plan_flow = -backward_dot(plan_change, prices);
    std::vector<double> new_hedge(remaining, 0.0);
    if (spec.hedged) {
        std::vector<double> hedge_change(remaining);
        for (std::size_t j = 0; j < remaining; ++j) {
            hedge_change[j] = sol.plan.moves[j] - old_hedge[j];
        }
        row.hedge_flow = -backward_dot(hedge_change, prices);
        new_hedge = sol.plan.moves;
    }
    s.cash_flow = s.cash_flow + row.settlement;
    s.cash_flow = s.cash_flow + row.hedge_flow;
    s.hedge_value = spec.hedged ? backward_dot(new_hedge, prices) : 0.0;
    s.intrinsic = sol.value;
    s.step += 1;
    s.t = s.step * curve.period;

    row.d_hedge_value = s.hedge_value - old_hedge_value;
    row.d_cash = s.cash() - old_cash;
    row.after = s;

    curve.prices = std::move(prices);
    curve.first_period += 1;
    curve.t = s.t;
    path.plan = std::move(sol.plan.moves);
    path.hedge = std::move(new_hedge);
    return row;
}

StorageRunResult run_rolling_intrinsic(const StorageRunSpec& spec) {
    spec.validate();
    const auto lattice = VolumeLattice::from(spec.storage);
    const int periods = static_cast<int>(spec.initial_curve.prices.size());
    const auto n = static_cast<std::size_t>(spec.n_paths);
    const bool keep_rows = spec.retention == Retention::Full;

    StorageRunResult result;
    result.spec = spec;
    result.summaries.resize(n);
    if (keep_rows) result.ledgers.resize(n);
    result.intrinsic0 = start_storage_path(spec, lattice).state.intrinsic;

    parallel_for(n, spec.workers, [&](std::size_t p) {
        PathRng rng({spec.master_seed, p});
        StoragePathState path = start_storage_path(spec, lattice);
        StoragePathSummary sum;
        std::vector<StorageRow> rows;
        if (keep_rows) {
            rows.reserve(periods + 1);
            StorageRow first;
            first.after = path.state;
            first.level_before = path.state.level;
            first.intrinsic_before = path.state.intrinsic;
            rows.push_back(std::move(first));
        }
        for (int i = 0; i < periods; ++i) {
            StorageRow row = rolling_intrinsic_step(path, spec, lattice, rng, keep_rows);
            sum.plan_flow = sum.plan_flow + row.plan_flow;
            sum.hedge_pnl += row.hedge_mtm;
            const double self_fin = std::abs(row.d_hedge_value + row.d_cash -
                                              (row.hedge_mtm - row.rolloff + row.settlement));
            sum.max_self_financing = std::max(sum.max_self_financing, self_fin);
            if (spec.hedged) {
                sum.max_mirror_residual =
                    std::max(sum.max_mirror_residual,
                             std::abs(row.after.hedge_value + row.after.intrinsic));
            }
            if (keep_rows) rows.push_back(std::move(row));
        }
        sum.terminal = path.state.portfolio();
        sum.exercise = path.state.exercise;
        sum.cash_flow = path.state.cash_flow;
        result.summaries[p] = sum;
        if (keep_rows) result.ledgers[p] = std::move(rows);
    });

    std::vector<double> terminal(n), a(n), b(n), c(n), diff(n);
    for (std::size_t p = 0; p < n; ++p) {
        const auto& sm = result.summaries[p];
        terminal[p] = sm.terminal;
        a[p] = -sm.exercise - result.intrinsic0;
        b[p] = sm.cash_flow;
        c[p] = sm.plan_flow;
        diff[p] = a[p] - b[p];
    }
    const auto ma = sample_moments(a);
    const auto mb = sample_moments(b);
    const auto mc = sample_moments(c);
    result.exercise_estimate = {ma.mean, ma.stderr_mean};
    result.cash_estimate = {mb.mean, mb.stderr_mean};
    result.plan_flow_estimate = {mc.mean, mc.stderr_mean};
    result.exercise_vs_cash_stderr = sample_moments(diff).stderr_mean;
    result.distribution = summarize(std::move(terminal));
    return result;
}

StorageAuditResult audit_storage_ledger(std::span<const StorageRow> rows, bool hedged,
                                        double rel_tolerance) {
    StorageAuditResult out;
    for (const auto& r : rows) {
        ++out.rows_checked;
        const auto& a = r.after;
        const double scale =
            std::max({1.0, std::abs(a.intrinsic), std::abs(a.hedge_value), std::abs(a.cash()),
                      std::abs(r.rolloff), std::abs(r.d_exercise), std::abs(r.hedge_flow)});
        const double tol = rel_tolerance * scale;
        const double self_fin =
            std::abs(r.d_hedge_value + r.d_cash - (r.hedge_mtm - r.rolloff + r.settlement));
        const double mirror = hedged ? std::abs(a.hedge_value + a.intrinsic) : 0.0;
        const double pi_res =
            std::abs(a.portfolio() - (a.intrinsic + a.hedge_value + a.cash_setup + a.cash_flow));
        out.max_self_financing = std::max(out.max_self_financing, self_fin);
        out.max_mirror_residual = std::max(out.max_mirror_residual, mirror);
        out.max_portfolio_residual = std::max(out.max_portfolio_residual, pi_res);
        if (!out.failure && (self_fin > tol || mirror > tol || pi_res > tol)) {
            std::ostringstream msg;
            msg << "storage ledger identity broken at step " << a.step
                << ": self-financing residual " << self_fin << ", |H+I| " << mirror
                << ", |Pi-(I+H+P)| " << pi_res;
            out.failure = msg.str();
        }
    }
    return out;
}

ThetaProbe theta_gamma_probe(std::span<const StorageRow> rows, const StorageSpec& storage) {
    const auto lattice = VolumeLattice::from(storage);
    ThetaProbe out;
    for (const auto& r : rows) {
        if (r.curve_before.empty()) continue;
        const int level = lattice.level_of(r.level_before);
        const auto before = intrinsic_optimize(r.curve_before, lattice, level);
        const int move = before.plan.lattice_moves.front();
        const double d_exercise = before.plan.moves.front() * r.curve_before.front();
        const std::span<const double> frozen(r.curve_before.data() + 1, r.curve_before.size() - 1);
        const double after =
            frozen.empty() ? 0.0 : intrinsic_optimize(frozen, lattice, level + move).value;
        const double ds = (after - before.value) - d_exercise;
        out.max_abs_change = std::max(out.max_abs_change, std::abs(ds));
        out.max_scale = std::max(out.max_scale, std::abs(before.value) + std::abs(d_exercise));
        ++out.steps;
    }
    if (out.steps == 0) throw UnavailableError("theta probe needs retained storage ledgers");
    return out;
}

}  // namespace hedgesim
