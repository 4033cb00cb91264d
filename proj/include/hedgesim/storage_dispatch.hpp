#pragma once

#include <span>
#include <vector>

namespace hedgesim {

// Physical storage contract. Volumes are in volume units; rates are the
// largest volume that can be injected (rate_in_max) or withdrawn
// (rate_out_max) within one delivery period. All bounds must sit on a
// lattice of pitch volume_step anchored at q_min.
struct StorageSpec {
    double q_min = 0.0;
    double q_max = 1.0;
    double rate_in_max = 1.0;
    double rate_out_max = 1.0;
    double q_initial = 0.0;
    double q_terminal = 0.0;
    double volume_step = 1.0;

    void validate() const;
    bool operator==(const StorageSpec&) const = default;
};

// Integer view of a StorageSpec: levels are 0..n_levels-1.
struct VolumeLattice {
    int n_levels = 0;
    int max_inject = 0;
    int max_withdraw = 0;
    int initial = 0;
    int terminal = 0;
    double step = 1.0;
    double q_min = 0.0;

    static VolumeLattice from(const StorageSpec& spec);
    int level_of(double volume) const;  // throws unless volume is on the lattice
    double volume_of(int level) const { return q_min + level * step; }
};

// Per-period volume moves for the remaining delivery periods. Positive =
// injection (bought at the forward price), negative = withdrawal (sold), so
// the plan's value is I = -sum moves[j] * F[j]. The corresponding exercise
// rate is moves[j] / delivery_period.
struct ExercisePlan {
    std::vector<double> moves;
    std::vector<int> lattice_moves;
};

struct IntrinsicSolution {
    ExercisePlan plan;
    double value = 0.0;  // I
};

// Exact optimum of the linear dispatch problem over the remaining periods
// priced by `prices`, starting from `level` and ending at q_terminal.
// Ties prefer no action, then withdrawal. Throws InfeasibleError with the
// earliest period at which the terminal level becomes unreachable.
IntrinsicSolution intrinsic_optimize(std::span<const double> prices, const StorageSpec& storage,
                                     double level);
IntrinsicSolution intrinsic_optimize(std::span<const double> prices, const VolumeLattice& lattice,
                                     int level);

// Value -sum moves[j] * prices[j], summed from the back so that it is the
// exact negation of the same sum of moves[j] * prices[j].
double plan_value(std::span<const double> moves, std::span<const double> prices);
double backward_dot(std::span<const double> weights, std::span<const double> prices);

// Earliest period at which no feasible continuation exists, or -1.
int first_infeasible_period(const VolumeLattice& lattice, int level, int periods);

}  // namespace hedgesim
