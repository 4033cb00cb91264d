#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hedgesim/forward_curve.hpp"
#include "hedgesim/hedge_engine.hpp"
#include "hedgesim/statistics.hpp"
#include "hedgesim/storage_dispatch.hpp"

namespace hedgesim {

// Storage portfolio after one observation step. I is the intrinsic value of
// the remaining horizon, E the cumulative exercise value, S = I - E, and
// Pi = I + H + P. Cash is split into the initial hedge purchase and the
// flows booked afterwards; cash = cash_setup + cash_flow.
struct StorageState {
    int step = 0;  // observation index; step 0 is t = 0 after the initial hedge
    double t = 0.0;
    double level = 0.0;
    double intrinsic = 0.0;
    double exercise = 0.0;
    double hedge_value = 0.0;
    double cash_setup = 0.0;
    double cash_flow = 0.0;

    double cash() const { return cash_setup + cash_flow; }
    double target() const { return intrinsic - exercise; }
    double portfolio() const { return intrinsic + hedge_value + cash(); }
};

struct StorageRow {
    StorageState after;
    // Pre-step snapshot used by the frozen-curve replay.
    std::vector<double> curve_before;
    int first_period = 0;
    double level_before = 0.0;
    double intrinsic_before = 0.0;
    double exercise_move = 0.0;   // volume delivered this step (r dT)
    // Booked increments.
    double d_exercise = 0.0;      // dE = r_t(t) F_t(t) dT
    double rolloff = 0.0;         // h_t(t) F_t(t) dT leaving the hedge book
    double settlement = 0.0;      // spot cash for exercise not covered by the hedge
    double hedge_mtm = 0.0;       // sum h dF dT
    double hedge_flow = 0.0;      // -sum (F + dF) dh dT
    double plan_flow = 0.0;       // -sum (F + dF) dr dT
    double d_hedge_value = 0.0;
    double d_cash = 0.0;
};

struct StorageRunSpec {
    StorageSpec storage;
    ForwardCurve initial_curve;
    CurveFactorModel model;
    bool hedged = true;
    int n_paths = 1;
    std::uint64_t master_seed = 0;
    Retention retention = Retention::None;
    int workers = 1;

    // Observation grid equals the delivery grid: one period per step.
    TimeGrid grid() const;
    void validate() const;
};

struct StoragePathSummary {
    double terminal = 0.0;        // Pi_e
    double exercise = 0.0;        // E(T_e)
    double cash_flow = 0.0;       // P(T_e) - P(0+)
    double plan_flow = 0.0;       // sum over steps of -sum (F + dF) dr dT
    double hedge_pnl = 0.0;       // sum h dF dT
    double max_mirror_residual = 0.0;   // max |H + I| after rebalance
    double max_self_financing = 0.0;    // max per-step residual
};

// Per-path ledger replay state, exposed so that single steps can be driven
// and inspected directly.
struct StoragePathState {
    StorageState state;
    ForwardCurve curve;              // remaining periods, observed at state.t
    std::vector<double> plan;        // intrinsic moves for the remaining periods
    std::vector<double> hedge;       // hedge volumes per remaining period
};

// t = 0: solve the intrinsic plan on the initial curve and, when hedged,
// buy the hedge h = r at the initial prices (value neutral).
StoragePathState start_storage_path(const StorageRunSpec& spec, const VolumeLattice& lattice);

// One rolling-intrinsic step: exercise the front period at the old curve,
// move the curve, re-solve the plan at the new curve and level, then
// rebalance the hedge at the new prices.
StorageRow rolling_intrinsic_step(StoragePathState& path, const StorageRunSpec& spec,
                                  const VolumeLattice& lattice, PathRng& rng,
                                  bool keep_snapshot);

struct StorageEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
};

struct StorageRunResult {
    StorageRunSpec spec;
    double intrinsic0 = 0.0;
    TerminalDistribution distribution;
    StorageEstimate exercise_estimate;   // <-E(T_e)> - I(0)
    StorageEstimate cash_estimate;       // <P(T_e) - P(0+)>
    StorageEstimate plan_flow_estimate;  // <sum -(F + dF) dr dT>
    double exercise_vs_cash_stderr = 0.0;  // SE of the paired difference
    std::vector<StoragePathSummary> summaries;
    std::vector<std::vector<StorageRow>> ledgers;  // Full only
};

StorageRunResult run_rolling_intrinsic(const StorageRunSpec& spec);

struct StorageAuditResult {
    std::size_t rows_checked = 0;
    double max_self_financing = 0.0;
    double max_mirror_residual = 0.0;
    double max_portfolio_residual = 0.0;
    std::optional<std::string> failure;
};

// Per-step identities: d(H + P) = sum h dF dT - h_t(t) F_t(t) dT + spot
// settlement, H = -I after rebalance (hedged runs), Pi = I + H + P.
StorageAuditResult audit_storage_ledger(std::span<const StorageRow> rows, bool hedged,
                                        double rel_tolerance = 1e-12);

struct ThetaProbe {
    std::size_t steps = 0;
    double max_abs_change = 0.0;  // max |dS| on the frozen-curve replay
    double max_scale = 0.0;       // largest |I| + |dE| seen, for relative bounds
};

// Replays every retained step with the curve held fixed: deliver the front
// period, re-solve from the new level, and measure dS = dI - dE.
ThetaProbe theta_gamma_probe(std::span<const StorageRow> rows, const StorageSpec& storage);

}  // namespace hedgesim
