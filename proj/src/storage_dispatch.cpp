#include "hedgesim/storage_dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hedgesim/errors.hpp"

namespace hedgesim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

int lattice_count(double amount, double step, const char* what) {
    const double units = amount / step;
    const double rounded = std::round(units);
    if (std::abs(units - rounded) > 1e-9 * std::max(1.0, std::abs(units))) {
        throw ConfigError(std::string(what) + " is not a multiple of the volume step");
    }
    return static_cast<int>(rounded);
}

}  // namespace

void StorageSpec::validate() const {
    if (!(volume_step > 0.0)) throw ConfigError("volume_step must be positive");
    if (!(q_max > q_min)) throw ConfigError("storage needs q_max > q_min");
    if (!(rate_in_max > 0.0) || !(rate_out_max > 0.0)) {
        throw ConfigError("storage rates must be positive");
    }
    if (q_initial < q_min || q_initial > q_max) {
        throw ConfigError("q_initial outside [q_min, q_max]");
    }
    if (q_terminal < q_min || q_terminal > q_max) {
        throw ConfigError("q_terminal outside [q_min, q_max]");
    }
    lattice_count(q_max - q_min, volume_step, "capacity q_max - q_min");
    lattice_count(rate_in_max, volume_step, "rate_in_max");
    lattice_count(rate_out_max, volume_step, "rate_out_max");
    lattice_count(q_initial - q_min, volume_step, "q_initial - q_min");
    lattice_count(q_terminal - q_min, volume_step, "q_terminal - q_min");
}

VolumeLattice VolumeLattice::from(const StorageSpec& spec) {
    spec.validate();
    VolumeLattice l;
    l.step = spec.volume_step;
    l.q_min = spec.q_min;
    l.n_levels = lattice_count(spec.q_max - spec.q_min, spec.volume_step, "capacity") + 1;
    l.max_inject = lattice_count(spec.rate_in_max, spec.volume_step, "rate_in_max");
    l.max_withdraw = lattice_count(spec.rate_out_max, spec.volume_step, "rate_out_max");
    l.initial = lattice_count(spec.q_initial - spec.q_min, spec.volume_step, "q_initial");
    l.terminal = lattice_count(spec.q_terminal - spec.q_min, spec.volume_step, "q_terminal");
    return l;
}

int VolumeLattice::level_of(double volume) const {
    const int level = lattice_count(volume - q_min, step, "storage level");
    if (level < 0 || level >= n_levels) throw InputError("storage level outside capacity");
    return level;
}

double backward_dot(std::span<const double> weights, std::span<const double> prices) {
    double acc = 0.0;
    for (std::size_t j = weights.size(); j-- > 0;) acc = weights[j] * prices[j] + acc;
    return acc;
}

double plan_value(std::span<const double> moves, std::span<const double> prices) {
    double acc = 0.0;
    for (std::size_t j = moves.size(); j-- > 0;) acc = acc - moves[j] * prices[j];
    return acc;
}

int first_infeasible_period(const VolumeLattice& lattice, int level, int periods) {
    // Forward reachable band from `level` against the backward band that can
    // still reach the terminal level; the first period where they miss.
    std::vector<int> back_lo(periods + 1), back_hi(periods + 1);
    back_lo[periods] = back_hi[periods] = lattice.terminal;
    for (int j = periods; j-- > 0;) {
        back_lo[j] = std::max(0, back_lo[j + 1] - lattice.max_inject);
        back_hi[j] = std::min(lattice.n_levels - 1, back_hi[j + 1] + lattice.max_withdraw);
    }
    int lo = level;
    int hi = level;
    for (int j = 0; j <= periods; ++j) {
        if (hi < back_lo[j] || lo > back_hi[j]) return std::max(0, j - 1);
        lo = std::max(0, lo - lattice.max_withdraw);
        hi = std::min(lattice.n_levels - 1, hi + lattice.max_inject);
    }
    return -1;
}

IntrinsicSolution intrinsic_optimize(std::span<const double> prices, const VolumeLattice& lattice,
                                     int level) {
    const int periods = static_cast<int>(prices.size());
    const int levels = lattice.n_levels;
    if (level < 0 || level >= levels) throw InputError("storage level outside capacity");

    // value[j * levels + l]: best value from period j at level l.
    std::vector<double> value((periods + 1) * levels, kNegInf);
    std::vector<int> choice(periods * levels, 0);
    value[periods * levels + lattice.terminal] = 0.0;

    for (int j = periods; j-- > 0;) {
        const double price = prices[j];
        const double* next = &value[(j + 1) * levels];
        for (int l = 0; l < levels; ++l) {
            double best = kNegInf;
            int best_move = 0;
            auto consider = [&](int a) {
                const int to = l + a;
                if (to < 0 || to >= levels || next[to] == kNegInf) return;
                const double candidate = next[to] - (a * lattice.step) * price;
                if (candidate > best) {
                    best = candidate;
                    best_move = a;
                }
            };
            // Evaluation order encodes the tie-break: hold, withdraw, inject.
            consider(0);
            for (int a = 1; a <= lattice.max_withdraw; ++a) consider(-a);
            for (int a = 1; a <= lattice.max_inject; ++a) consider(a);
            value[j * levels + l] = best;
            choice[j * levels + l] = best_move;
        }
    }

    if (value[level] == kNegInf) {
        const int period = first_infeasible_period(lattice, level, periods);
        throw InfeasibleError("terminal storage level unreachable; first violating period " +
                                  std::to_string(period),
                              period);
    }

    IntrinsicSolution out;
    out.value = value[level];
    out.plan.moves.resize(periods);
    out.plan.lattice_moves.resize(periods);
    int l = level;
    for (int j = 0; j < periods; ++j) {
        const int a = choice[j * levels + l];
        out.plan.lattice_moves[j] = a;
        out.plan.moves[j] = a * lattice.step;
        l += a;
    }
    return out;
}

IntrinsicSolution intrinsic_optimize(std::span<const double> prices, const StorageSpec& storage,
                                     double level) {
    const auto lattice = VolumeLattice::from(storage);
    return intrinsic_optimize(prices, lattice, lattice.level_of(level));
}

}  // namespace hedgesim
