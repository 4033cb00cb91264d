#include "hedgesim/market_models.hpp"

#include <cmath>
#include <string>

#include "hedgesim/errors.hpp"

namespace hedgesim {

void TimeGrid::validate() const {
    if (n_steps < 1) {
        throw InputError("time grid needs n_steps >= 1, got " + std::to_string(n_steps));
    }
    if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end)) {
        throw InputError("time grid needs finite t_end > t_start");
    }
}

void GbmSpec::validate() const {
    if (!(f0 > 0.0) || !std::isfinite(f0)) {
        throw InputError("initial price f0 must be positive, got " + std::to_string(f0));
    }
    if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) {
        throw InputError("volatility sigma0 must be nonnegative");
    }
    if (!std::isfinite(mu0)) {
        throw InputError("drift mu0 must be finite");
    }
}

PathRng::PathRng(SeedSpec seed) {
    // seed_seq mixes all four words, so neighbouring path indices land on
    // unrelated engine states.
    std::seed_seq seq{static_cast<std::uint32_t>(seed.master_seed),
                      static_cast<std::uint32_t>(seed.master_seed >> 32),
                      static_cast<std::uint32_t>(seed.path_index),
                      static_cast<std::uint32_t>(seed.path_index >> 32)};
    engine_.seed(seq);
}

double gbm_step(const GbmSpec& spec, double f, double dt, double z) {
    const double s = spec.sigma0;
    return f * std::exp((spec.mu0 - 0.5 * s * s) * dt + s * std::sqrt(dt) * z);
}

void simulate_gbm_path_into(const GbmSpec& spec, const TimeGrid& grid, PathRng& rng,
                            std::span<double> out) {
    const double dt = grid.dt();
    const double drift = (spec.mu0 - 0.5 * spec.sigma0 * spec.sigma0) * dt;
    const double vol = spec.sigma0 * std::sqrt(dt);
    out[0] = spec.f0;
    for (int i = 0; i < grid.n_steps; ++i) {
        out[i + 1] = out[i] * std::exp(drift + vol * rng.normal());
    }
}

PricePath simulate_gbm_path(const GbmSpec& spec, const TimeGrid& grid, SeedSpec seed) {
    spec.validate();
    grid.validate();
    PricePath path{grid, std::vector<double>(grid.n_steps + 1)};
    PathRng rng(seed);
    simulate_gbm_path_into(spec, grid, rng, path.values);
    return path;
}

double expected_increment(const GbmSpec& spec, double f, double dt) {
    return spec.mu0 * f * dt;
}

double to_currency_units(double value, double t, NumeraireRate rate) {
    return std::exp(rate.r * t) * value;
}

double from_currency_units(double value, double t, NumeraireRate rate) {
    return to_currency_units(value, t, NumeraireRate{-rate.r});
}

}  // namespace hedgesim
