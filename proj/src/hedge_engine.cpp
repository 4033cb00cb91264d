#include "hedgesim/hedge_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hedgesim/errors.hpp"
#include "hedgesim/parallel.hpp"

namespace hedgesim {

namespace {

constexpr double kMaxPathSteps = 2e11;
constexpr double kMaxRetainedRows = 2e7;

bool at_expiry(double t, const HedgeContext& ctx) {
    return t >= ctx.call.expiry - 1e-9 * ctx.dt;
}

double strategy_delta(HedgeKind kind, double t, double f, const HedgeContext& ctx) {
    const double t_eff = std::min(t, ctx.call.expiry - 0.5 * ctx.dt);
    const auto& in = ctx.inputs;
    switch (kind) {
        case HedgeKind::RiskNeutralDelta: return bs_delta(f, t_eff, ctx.call, in.sigma0);
        case HedgeKind::DriftAdjustedDelta:
            return probabilistic_delta(f, t_eff, ctx.call, in.sigma0, in.mu0);
        case HedgeKind::IntrinsicDelta: return intrinsic_delta(f, ctx.call);
        case HedgeKind::None:
        case HedgeKind::BidOffer: break;
    }
    throw InputError(std::string("hedge kind has no delta: ") + to_string(kind));
}

double rounding_floor(const PortfolioState& a, const PortfolioState& b) {
    const double scale = std::max({std::abs(a.option), std::abs(a.hedge_value), std::abs(a.cash),
                                   std::abs(b.option), std::abs(b.hedge_value), std::abs(b.cash),
                                   b.f});
    return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace

const char* to_string(HedgeKind kind) {
    switch (kind) {
        case HedgeKind::None: return "none";
        case HedgeKind::RiskNeutralDelta: return "risk_neutral_delta";
        case HedgeKind::DriftAdjustedDelta: return "drift_adjusted_delta";
        case HedgeKind::IntrinsicDelta: return "intrinsic_delta";
        case HedgeKind::BidOffer: return "bid_offer";
    }
    return "unknown";
}

void HedgeStrategy::validate(double dt) const {
    if (kind != HedgeKind::BidOffer) return;
    if (!(k >= 0.0)) throw ConfigError("bid-offer rate k must be nonnegative");
    if (!(k * dt < 1.0)) {
        throw ConfigError("bid-offer explicit update needs k*dt < 1, got " + std::to_string(k * dt));
    }
    if (inner == HedgeKind::None || inner == HedgeKind::BidOffer) {
        throw ConfigError("bid-offer inner strategy must be a delta hedge");
    }
}

double target_hedge(const HedgeStrategy& strategy, double t, double f, double h_current,
                    const HedgeContext& ctx) {
    switch (strategy.kind) {
        case HedgeKind::None: return h_current;
        case HedgeKind::BidOffer: {
            const double d = strategy_delta(strategy.inner, t, f, ctx);
            return h_current - strategy.k * (h_current + d) * ctx.dt;
        }
        default: return -strategy_delta(strategy.kind, t, f, ctx);
    }
}

PortfolioState initial_state(double t0, double f0, const HedgeContext& ctx) {
    PortfolioState s;
    s.t = t0;
    s.f = f0;
    s.option = at_expiry(t0, ctx) ? intrinsic_price(f0, ctx.call)
                                  : price(ctx.model, f0, t0, ctx.call, ctx.inputs);
    s.portfolio = s.option;
    return s;
}

StepResult step_ledger(const PortfolioState& state, double df, double t_next, int step,
                       const HedgeContext& ctx) {
    const double consistency = state.option + state.hedge_value + state.cash;
    if (std::abs(state.portfolio - consistency) > rounding_floor(state, state)) {
        throw InvariantViolation("portfolio state is not C + H + P at step " +
                                 std::to_string(step));
    }
    PortfolioState next;
    next.t = t_next;
    next.f = state.f + df;
    next.option = at_expiry(t_next, ctx) ? intrinsic_price(next.f, ctx.call)
                                         : price(ctx.model, next.f, t_next, ctx.call, ctx.inputs);
    // Hedge decided after the move is observed, traded at the new price.
    next.position = target_hedge(ctx.strategy, t_next, next.f, state.position, ctx);
    const double dh = next.position - state.position;
    const double dcash = -next.f * dh;
    next.cash = state.cash + dcash;
    next.hedge_value = next.position * next.f;
    next.portfolio = next.option + next.hedge_value + next.cash;

    LedgerRow row;
    row.step = step;
    row.f = state.f;
    row.df = df;
    row.dh = dh;
    row.dcash = dcash;
    row.dhedge = next.hedge_value - state.hedge_value;
    row.doption = next.option - state.option;
    row.dportfolio = next.portfolio - state.portfolio;
    row.after = next;
    return {next, row};
}

LedgerAuditResult audit_ledger(std::span<const LedgerRow> rows, double rel_tolerance) {
    LedgerAuditResult out;
    for (const auto& r : rows) {
        ++out.rows_checked;
        const auto& a = r.after;
        const double h_before = r.position_before();
        const double scale = std::max({1.0, std::abs(a.option), std::abs(a.hedge_value),
                                       std::abs(a.cash), std::abs(r.f + r.df) * std::abs(r.dh),
                                       std::abs(h_before * r.df)});
        const double tol = rel_tolerance * scale;
        const double cash_res = std::abs(r.dcash + (r.f + r.df) * r.dh);
        const double self_fin = std::abs(r.dhedge + r.dcash - h_before * r.df);
        const double pi_res = std::abs(a.portfolio - (a.option + a.hedge_value + a.cash));
        out.max_cash_residual = std::max(out.max_cash_residual, cash_res);
        out.max_self_financing = std::max(out.max_self_financing, self_fin);
        out.max_portfolio_residual = std::max(out.max_portfolio_residual, pi_res);
        if (!out.failure && (cash_res > tol || self_fin > tol || pi_res > tol)) {
            std::ostringstream msg;
            msg << "ledger identity broken at step " << r.step << ": |dP+(F+dF)dh|=" << cash_res
                << " |d(H+P)-h dF|=" << self_fin << " |Pi-(C+H+P)|=" << pi_res;
            out.failure = msg.str();
        }
    }
    return out;
}

void VanillaRunSpec::validate() const {
    market.validate();
    grid.validate();
    call.validate();
    if (std::abs(grid.t_end - call.expiry) > 1e-12 * std::max(1.0, call.expiry)) {
        throw ConfigError("time grid must end at the option expiry");
    }
    if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
    if (workers < 1) throw ConfigError("workers must be at least 1");
    strategy.validate(grid.dt());
    const double steps = static_cast<double>(n_paths) * grid.n_steps;
    if (steps > kMaxPathSteps) {
        throw ConfigError("n_paths * n_steps exceeds the engine limit");
    }
    if (retention == Retention::Full && steps > kMaxRetainedRows) {
        throw ConfigError("retaining full ledgers for n_paths * n_steps rows exceeds the limit");
    }
}

VanillaRunResult run_paths(const VanillaRunSpec& spec) {
    spec.validate();
    HedgeContext ctx;
    ctx.call = spec.call;
    ctx.model = spec.model;
    ctx.strategy = spec.strategy;
    ctx.inputs = {spec.market.sigma0, spec.market.mu0};
    ctx.dt = spec.grid.dt();

    VanillaRunResult result;
    result.spec = spec;
    const PortfolioState start = initial_state(spec.grid.t_start, spec.market.f0, ctx);
    result.initial_value = start.portfolio;

    const auto n = static_cast<std::size_t>(spec.n_paths);
    const int n_steps = spec.grid.n_steps;
    const bool track = spec.retention != Retention::None;
    const bool keep_rows = spec.retention == Retention::Full;

    std::vector<double> terminal(n);
    if (track) result.diagnostics.resize(n);
    if (keep_rows) result.ledgers.resize(n);

    const double sigma2 = spec.market.sigma0 * spec.market.sigma0;

    parallel_for(n, spec.workers, [&](std::size_t p) {
        PathRng rng({spec.master_seed, p});
        std::vector<double> prices(n_steps + 1);
        simulate_gbm_path_into(spec.market, spec.grid, rng, prices);

        PathDiagnostics diag;
        diag.min_step_change = std::numeric_limits<double>::infinity();
        std::vector<LedgerRow> rows;
        if (keep_rows) rows.reserve(n_steps);

        PortfolioState state = start;
        for (int i = 0; i < n_steps; ++i) {
            const double df = prices[i + 1] - prices[i];
            const double t_next = spec.grid.time(i + 1);
            StepResult res = step_ledger(state, df, t_next, i + 1, ctx);
            if (track) {
                const double h = state.position;
                const double f = state.f;
                const double mu_dt = expected_increment(spec.market, f, ctx.dt);
                const double var_dt = sigma2 * f * f * ctx.dt;
                const double fprime = bs_delta(f, state.t, ctx.call, ctx.inputs.sigma0);
                const double gprime =
                    probabilistic_delta(f, state.t, ctx.call, ctx.inputs.sigma0, ctx.inputs.mu0);
                const double x = fprime + h;
                const double x_alt = fprime - h;
                diag.hedge_pnl += h * df;
                diag.rn_drift_integral += x * mu_dt;
                diag.rn_quadratic += x * x * var_dt;
                diag.alt_drift_integral += x_alt * mu_dt;
                diag.alt_quadratic += x_alt * x_alt * var_dt;
                diag.prob_drift_integral += h * mu_dt;
                diag.prob_step_residual += res.row.dportfolio + gprime * mu_dt;
                const double change = res.row.dportfolio;
                if (change < diag.min_step_change) diag.min_step_change = change;
                if (diag.first_negative_step < 0 && change < -rounding_floor(state, res.state)) {
                    diag.first_negative_step = i + 1;
                }
            }
            if (keep_rows) rows.push_back(res.row);
            state = res.state;
        }
        terminal[p] = state.portfolio;
        if (track) {
            diag.terminal = state.portfolio;
            diag.payoff = state.option;
            result.diagnostics[p] = diag;
        }
        if (keep_rows) result.ledgers[p] = std::move(rows);
    });

    result.distribution = summarize(std::move(terminal));
    return result;
}

bool EstimatorCheck::within(double n_se, double floor) const {
    return std::abs(difference) <= n_se * stderr_difference + floor;
}

bool VarianceCheck::within(double n_se, double floor) const {
    return std::abs(discrepancy) <= n_se * stderr_discrepancy + floor;
}

namespace {

void require_diagnostics(const VanillaRunResult& run) {
    if (run.diagnostics.empty()) {
        throw UnavailableError("run did not retain per-path diagnostics");
    }
}

}  // namespace

EstimatorCheck drift_decomposition(const VanillaRunResult& run, PricingModel model) {
    require_diagnostics(run);
    const auto& s = run.spec;
    double base = 0.0;
    bool risk_neutral = false;
    switch (model) {
        case PricingModel::RiskNeutral:
            base = bs_price(s.market.f0, s.grid.t_start, s.call, s.market.sigma0);
            risk_neutral = true;
            break;
        case PricingModel::Probabilistic:
            base = probabilistic_price(s.market.f0, s.grid.t_start, s.call, s.market.sigma0,
                                       s.market.mu0);
            break;
        case PricingModel::Intrinsic:
            throw InputError("drift decomposition is defined for risk-neutral or probabilistic models");
    }
    std::vector<double> integral(run.diagnostics.size());
    std::vector<double> gap(run.diagnostics.size());
    for (std::size_t i = 0; i < run.diagnostics.size(); ++i) {
        const auto& d = run.diagnostics[i];
        integral[i] = risk_neutral ? d.rn_drift_integral : d.prob_drift_integral;
        gap[i] = d.terminal - base - integral[i];
    }
    EstimatorCheck out;
    out.measured = run.distribution.mean;
    out.predicted = base + compensated_mean(integral);
    const auto g = sample_moments(gap);
    out.difference = g.mean;
    out.stderr_difference = g.stderr_mean;
    return out;
}

VarianceCheck variance_formula_check(const VanillaRunResult& run) {
    require_diagnostics(run);
    const auto& diags = run.diagnostics;
    const std::size_t n = diags.size();
    if (n < 2) throw InputError("variance check needs at least two paths");
    std::vector<double> terminal(n), drift(n), quad(n), alt_drift(n), alt_quad(n);
    for (std::size_t i = 0; i < n; ++i) {
        terminal[i] = diags[i].terminal;
        drift[i] = diags[i].rn_drift_integral;
        quad[i] = diags[i].rn_quadratic;
        alt_drift[i] = diags[i].alt_drift_integral;
        alt_quad[i] = diags[i].alt_quadratic;
    }
    const auto mt = sample_moments(terminal);
    const auto md = sample_moments(drift);
    const auto mad = sample_moments(alt_drift);

    VarianceCheck out;
    out.sample_variance = mt.stddev * mt.stddev;
    out.drift_term = md.stddev * md.stddev;
    out.diffusion_term = compensated_mean(quad);
    out.discrepancy = out.sample_variance - out.drift_term - out.diffusion_term;
    out.alt_drift_term = mad.stddev * mad.stddev;
    out.alt_diffusion_term = compensated_mean(alt_quad);
    out.alt_discrepancy = out.sample_variance - out.alt_drift_term - out.alt_diffusion_term;

    // Influence-function standard error of the discrepancy.
    std::vector<double> influence(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = terminal[i] - mt.mean;
        const double b = drift[i] - md.mean;
        influence[i] = a * a - b * b - quad[i];
    }
    out.stderr_discrepancy = sample_moments(influence).stderr_mean;

    // Var(Pi_e - A) - <Q>: the two-term formula plus 2 Cov(A, Pi_e - A).
    std::vector<double> martingale(n), corrected(n);
    for (std::size_t i = 0; i < n; ++i) martingale[i] = terminal[i] - drift[i];
    const auto mm = sample_moments(martingale);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = martingale[i] - mm.mean;
        corrected[i] = m * m - quad[i];
    }
    out.cross_term = out.sample_variance - out.drift_term - mm.stddev * mm.stddev;
    out.corrected_discrepancy = mm.stddev * mm.stddev - out.diffusion_term;
    out.stderr_corrected = sample_moments(corrected).stderr_mean;
    return out;
}

MonotonicityAudit intrinsic_monotonicity_audit(const VanillaRunResult& run) {
    const auto& s = run.spec;
    if (s.strategy.kind != HedgeKind::IntrinsicDelta || s.model != PricingModel::Intrinsic) {
        throw InputError("monotonicity audit needs an intrinsic hedge on an intrinsic-priced option");
    }
    require_diagnostics(run);
    MonotonicityAudit out;
    out.paths = run.diagnostics.size();
    out.min_step_change = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < run.diagnostics.size(); ++p) {
        const auto& d = run.diagnostics[p];
        out.min_step_change = std::min(out.min_step_change, d.min_step_change);
        if (d.first_negative_step >= 0) {
            if (out.violations == 0) {
                out.first_path = static_cast<int>(p);
                out.first_step = d.first_negative_step;
            }
            ++out.violations;
        }
    }
    return out;
}

ValueEstimate intrinsic_time_value_estimate(const VanillaRunResult& run) {
    const auto& s = run.spec;
    if (s.market.mu0 != 0.0) {
        throw InputError("intrinsic time value estimate assumes a driftless market");
    }
    if (s.strategy.kind != HedgeKind::IntrinsicDelta || s.model != PricingModel::Intrinsic) {
        throw InputError("intrinsic time value estimate needs intrinsic hedge and pricing");
    }
    return {run.distribution.mean - intrinsic_price(s.market.f0, s.call),
            run.distribution.stderr_mean};
}

ValueEstimate drift_adjusted_step_residual(const VanillaRunResult& run) {
    require_diagnostics(run);
    std::vector<double> sums(run.diagnostics.size());
    for (std::size_t i = 0; i < sums.size(); ++i) sums[i] = run.diagnostics[i].prob_step_residual;
    const auto m = sample_moments(sums);
    const double steps = run.spec.grid.n_steps;
    return {m.mean / steps, m.stderr_mean / steps};
}

}  // namespace hedgesim
