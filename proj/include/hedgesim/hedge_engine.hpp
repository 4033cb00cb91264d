#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hedgesim/market_models.hpp"
#include "hedgesim/statistics.hpp"
#include "hedgesim/vanilla_pricing.hpp"

namespace hedgesim {

enum class HedgeKind { None, RiskNeutralDelta, DriftAdjustedDelta, IntrinsicDelta, BidOffer };

const char* to_string(HedgeKind kind);

// Policy producing the next hedge position. BidOffer relaxes towards the
// `inner` delta hedge at rate k: dh = -k (h + delta) dt.
struct HedgeStrategy {
    HedgeKind kind = HedgeKind::None;
    double k = 0.0;
    HedgeKind inner = HedgeKind::RiskNeutralDelta;

    void validate(double dt) const;
    bool operator==(const HedgeStrategy&) const = default;
};

// h: units of underlying, H = h F, P: cash, Pi = C + H + P.
struct PortfolioState {
    double t = 0.0;
    double f = 0.0;
    double option = 0.0;
    double position = 0.0;
    double hedge_value = 0.0;
    double cash = 0.0;
    double portfolio = 0.0;
};

struct LedgerRow {
    int step = 0;
    double f = 0.0;    // price before the move
    double df = 0.0;
    double dh = 0.0;
    double dcash = 0.0;
    double dhedge = 0.0;
    double doption = 0.0;
    double dportfolio = 0.0;
    PortfolioState after;

    double position_before() const { return after.position - dh; }
};

struct HedgeContext {
    CallSpec call;
    PricingModel model = PricingModel::RiskNeutral;
    HedgeStrategy strategy;
    PricingInputs inputs;
    double dt = 0.0;
};

// Target position for the strategy observed at (t, f). Delta formulas use
// time to expiry floored at dt / 2 so the last rebalance stays finite.
double target_hedge(const HedgeStrategy& strategy, double t, double f, double h_current,
                    const HedgeContext& ctx);

PortfolioState initial_state(double t0, double f0, const HedgeContext& ctx);

struct StepResult {
    PortfolioState state;
    LedgerRow row;
};

// One retarded-action step: observe df, reprice the option at (t_next,
// f + df), choose the new hedge at the new price and pay for the change at
// that price: dP = -(F + dF) dh.
StepResult step_ledger(const PortfolioState& state, double df, double t_next, int step,
                       const HedgeContext& ctx);

// Ledger identity checks on a row sequence. Returns the first failure, if
// any, as a human-readable message.
struct LedgerAuditResult {
    std::size_t rows_checked = 0;
    double max_cash_residual = 0.0;       // |dP + (F + dF) dh|
    double max_self_financing = 0.0;      // |d(H + P) - h dF|
    double max_portfolio_residual = 0.0;  // |Pi - (C + H + P)|
    std::optional<std::string> failure;
};

LedgerAuditResult audit_ledger(std::span<const LedgerRow> rows, double rel_tolerance = 1e-12);

enum class Retention { None, Summary, Full };

struct VanillaRunSpec {
    GbmSpec market;
    TimeGrid grid;
    CallSpec call;
    PricingModel model = PricingModel::RiskNeutral;
    HedgeStrategy strategy;
    int n_paths = 1;
    std::uint64_t master_seed = 0;
    Retention retention = Retention::None;
    int workers = 1;

    void validate() const;
};

// Streamed per-path quantities used by the estimators below. x = f' + h.
struct PathDiagnostics {
    double terminal = 0.0;           // Pi_e
    double payoff = 0.0;             // C(T_e)
    double hedge_pnl = 0.0;          // sum h dF
    double rn_drift_integral = 0.0;  // sum (f' + h) mu dt
    double rn_quadratic = 0.0;       // sum (f' + h)^2 sigma^2 dt
    double alt_drift_integral = 0.0; // sum (f' - h) mu dt
    double alt_quadratic = 0.0;      // sum (f' - h)^2 sigma^2 dt
    double prob_drift_integral = 0.0;// sum h mu dt
    double prob_step_residual = 0.0; // sum (dPi + g' mu dt)
    double min_step_change = 0.0;    // min over steps of dPi
    int first_negative_step = -1;    // first step with dPi below rounding
};

struct VanillaRunResult {
    VanillaRunSpec spec;
    double initial_value = 0.0;  // Pi(0) = C(f0, t0)
    TerminalDistribution distribution;
    std::vector<PathDiagnostics> diagnostics;      // Summary and Full
    std::vector<std::vector<LedgerRow>> ledgers;   // Full only
};

VanillaRunResult run_paths(const VanillaRunSpec& spec);

// Two-sided comparison of a measured mean against a prediction, with the
// standard error of their paired difference.
struct EstimatorCheck {
    double measured = 0.0;
    double predicted = 0.0;
    double difference = 0.0;
    double stderr_difference = 0.0;

    double z() const { return stderr_difference > 0 ? difference / stderr_difference : 0.0; }
    bool within(double n_se, double floor = 0.0) const;
};

// <Pi_e> against f(0) + int <(f' + h) mu> dt (RiskNeutral) or
// g(0) + int <h mu> dt (Probabilistic).
EstimatorCheck drift_decomposition(const VanillaRunResult& run, PricingModel model);

struct VarianceCheck {
    double sample_variance = 0.0;
    double drift_term = 0.0;      // variance of int x mu dt
    double diffusion_term = 0.0;  // <int x^2 sigma^2 dt>
    double discrepancy = 0.0;
    double stderr_discrepancy = 0.0;
    // Same two terms with x = f' - h.
    double alt_drift_term = 0.0;
    double alt_diffusion_term = 0.0;
    double alt_discrepancy = 0.0;
    // 2 Cov(A, Pi_e - A) between the drift integral A and the martingale
    // part, and the discrepancy once it is included: Var(Pi_e - A) - <Q>.
    double cross_term = 0.0;
    double corrected_discrepancy = 0.0;
    double stderr_corrected = 0.0;

    bool within(double n_se, double floor = 0.0) const;
};

VarianceCheck variance_formula_check(const VanillaRunResult& run);

struct MonotonicityAudit {
    std::size_t paths = 0;
    std::size_t violations = 0;
    double min_step_change = 0.0;
    int first_path = -1;
    int first_step = -1;
};

MonotonicityAudit intrinsic_monotonicity_audit(const VanillaRunResult& run);

struct ValueEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
};

// <Pi_e> - I(f0) for an intrinsically hedged, intrinsically priced run on a
// driftless market.
ValueEstimate intrinsic_time_value_estimate(const VanillaRunResult& run);

// Mean over steps of dPi + g' mu dt for a drift-adjusted hedge, estimated
// from per-path sums.
ValueEstimate drift_adjusted_step_residual(const VanillaRunResult& run);

}  // namespace hedgesim
