#include "hedgesim/forward_curve.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hedgesim/errors.hpp"

namespace hedgesim {

void ForwardCurve::validate() const {
    if (!(period > 0.0)) throw InputError("forward curve period must be positive");
    if (prices.empty()) throw InputError("forward curve has no delivery periods");
    for (double f : prices) {
        if (!(f > 0.0) || !std::isfinite(f)) throw InputError("forward prices must be positive");
    }
}

double CurveFactorModel::sigma_for(int absolute_period) const {
    if (sigma.size() == 1) return sigma.front();
    return sigma.at(static_cast<std::size_t>(absolute_period));
}

void CurveFactorModel::validate() const {
    if (sigma.empty()) throw ConfigError("curve model needs at least one volatility");
    for (double s : sigma) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("curve volatilities must be >= 0");
    }
    if (!(beta >= 0.0)) throw ConfigError("curve correlation decay beta must be >= 0");
}

void correlated_normals(double rho, PathRng& rng, std::span<double> out) {
    if (out.empty()) return;
    const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    out[0] = rng.normal();
    for (std::size_t k = 1; k < out.size(); ++k) {
        out[k] = rho * out[k - 1] + innovation * rng.normal();
    }
}

void evolve_prices(std::span<double> prices, int first_period, double period,
                   const CurveFactorModel& model, double dt, PathRng& rng,
                   std::span<double> increments, std::span<double> scratch) {
    const double rho = std::isinf(model.beta) ? 0.0 : std::exp(-model.beta * period);
    auto z = scratch.first(prices.size());
    correlated_normals(rho, rng, z);
    const double root_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < prices.size(); ++k) {
        const double s = model.sigma_for(first_period + static_cast<int>(k));
        const double next = prices[k] * std::exp(-0.5 * s * s * dt + s * root_dt * z[k]);
        increments[k] = next - prices[k];
        prices[k] = next;
    }
}

CurveStep step_curve(const ForwardCurve& curve, const CurveFactorModel& model, double dt,
                     PathRng& rng) {
    curve.validate();
    CurveStep out;
    out.curve.t = curve.t + dt;
    out.curve.period = curve.period;
    out.curve.first_period = curve.first_period + 1;
    out.curve.prices.assign(curve.prices.begin() + 1, curve.prices.end());
    out.increments.resize(out.curve.prices.size());
    std::vector<double> scratch(out.curve.prices.size());
    evolve_prices(out.curve.prices, out.curve.first_period, curve.period, model, dt, rng,
                  out.increments, scratch);
    return out;
}

ForwardCurve curve_from_points(std::span<const double> maturities,
                               std::span<const double> prices) {
    if (maturities.size() != prices.size() || maturities.empty()) {
        throw ConfigError("forward curve needs matching, nonempty T and F columns");
    }
    ForwardCurve c;
    c.period = maturities[0];
    if (!(c.period > 0.0)) throw ConfigError("first delivery time must be positive");
    for (std::size_t k = 0; k < maturities.size(); ++k) {
        const double expected = (k + 1) * c.period;
        if (std::abs(maturities[k] - expected) > 1e-9 * std::max(1.0, expected)) {
            throw ConfigError("forward curve delivery times must be uniform multiples of the "
                              "first one (row " + std::to_string(k + 1) + ")");
        }
    }
    c.prices.assign(prices.begin(), prices.end());
    c.validate();
    return c;
}

ForwardCurve read_curve_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open forward curve file " + path);
    std::vector<double> maturities;
    std::vector<double> prices;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string a, b;
        if (!std::getline(row, a, ',') || !std::getline(row, b)) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": expected two columns T,F");
        }
        if (!header_seen && maturities.empty() && !a.empty() && (a[0] == 'T' || a[0] == 't')) {
            header_seen = true;
            continue;
        }
        try {
            maturities.push_back(std::stod(a));
            prices.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": not a number");
        }
    }
    return curve_from_points(maturities, prices);
}

}  // namespace hedgesim
