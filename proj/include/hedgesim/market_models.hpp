#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hedgesim {

// Uniform observation grid on [t_start, t_end].
struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_steps = 1;

    double dt() const { return (t_end - t_start) / n_steps; }
    double time(int i) const { return t_start + i * dt(); }
    void validate() const;
    bool operator==(const TimeGrid&) const = default;
};

// Geometric Brownian motion: dF = mu0 F dt + sigma0 F dW.
struct GbmSpec {
    double f0 = 100.0;
    double mu0 = 0.0;
    double sigma0 = 0.2;

    void validate() const;
    bool operator==(const GbmSpec&) const = default;
};

struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
};

struct NumeraireRate {
    double r = 0.0;
};

struct PricePath {
    TimeGrid grid;
    std::vector<double> values;  // n_steps + 1 entries, values[0] == f0

    double increment(int i) const { return values[i + 1] - values[i]; }
};

// Independent, reproducible random stream for one path. Two streams built
// from different (master_seed, path_index) pairs never share state.
class PathRng {
public:
    explicit PathRng(SeedSpec seed);

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Exact log-space GBM step over dt driven by a standard normal draw z.
double gbm_step(const GbmSpec& spec, double f, double dt, double z);

PricePath simulate_gbm_path(const GbmSpec& spec, const TimeGrid& grid, SeedSpec seed);

// Fill `out` (size n_steps + 1) from an existing stream; used by the
// engines to avoid per-path allocations.
void simulate_gbm_path_into(const GbmSpec& spec, const TimeGrid& grid, PathRng& rng,
                            std::span<double> out);

// <dF> = mu(F, t) dt for the GBM parametrisation mu = mu0 F.
double expected_increment(const GbmSpec& spec, double f, double dt);

// Bond-numeraire value -> currency units: e^{r t} * value.
double to_currency_units(double value, double t, NumeraireRate rate);
double from_currency_units(double value, double t, NumeraireRate rate);

}  // namespace hedgesim
