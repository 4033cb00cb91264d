#pragma once

#include <span>
#include <string>
#include <vector>

#include "hedgesim/market_models.hpp"

namespace hedgesim {

// Forward prices observed at time t for the remaining delivery periods.
// prices[k] delivers over period first_period + k, whose delivery time is
// (first_period + k + 1) * period.
struct ForwardCurve {
    double t = 0.0;
    double period = 1.0;
    int first_period = 0;
    std::vector<double> prices;

    double maturity(std::size_t k) const { return (first_period + k + 1) * period; }
    double spot() const { return prices.front(); }
    void validate() const;
    bool operator==(const ForwardCurve&) const = default;
};

// Lognormal martingale curve: dF(T)/F(T) = sigma(T) dW_T with
// corr(dW_u, dW_v) = exp(-beta |u - v|). `sigma` holds one volatility per
// absolute delivery period, or a single entry applied to all of them.
struct CurveFactorModel {
    std::vector<double> sigma{0.3};
    double beta = 1.0;

    double sigma_for(int absolute_period) const;
    void validate() const;
    bool operator==(const CurveFactorModel&) const = default;
};

// Correlated standard normals on a uniform maturity grid with neighbour
// correlation rho: z_0 = e_0, z_k = rho z_{k-1} + sqrt(1 - rho^2) e_k.
// This is the Cholesky factor of exp(-beta |u - v|) for rho = e^{-beta dT}.
void correlated_normals(double rho, PathRng& rng, std::span<double> out);

// Applies one exact lognormal step of length dt to every price in `prices`
// (absolute periods first_period, first_period + 1, ...). Writes the
// increments to `increments`.
void evolve_prices(std::span<double> prices, int first_period, double period,
                   const CurveFactorModel& model, double dt, PathRng& rng,
                   std::span<double> increments, std::span<double> scratch);

struct CurveStep {
    ForwardCurve curve;               // front period delivered and removed
    std::vector<double> increments;   // dF for the surviving periods
};

CurveStep step_curve(const ForwardCurve& curve, const CurveFactorModel& model, double dt,
                     PathRng& rng);

// Reads a two-column CSV (header "T,F") with uniformly spaced delivery times
// starting at one period.
ForwardCurve read_curve_csv(const std::string& path);
ForwardCurve curve_from_points(std::span<const double> maturities, std::span<const double> prices);

}  // namespace hedgesim
