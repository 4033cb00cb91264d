#pragma once

// Independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

namespace oracle {

// Maclaurin series of the error function; converges quickly for |x| <= 3.
inline double erf_series(double x) {
    long double term = x;
    long double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -static_cast<long double>(x) * x / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-30L) break;
    }
    return static_cast<double>(2.0L / std::sqrt(std::numbers::pi_v<long double>) * sum);
}

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Composite Simpson rule on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// E[max(F_T - K, 0)] for F_T = f * exp(mu tau - sigma^2 tau / 2 + sigma sqrt(tau) Z),
// integrating the payoff against the standard normal density.
inline double lognormal_call_by_simpson(double f, double strike, double sigma, double tau,
                                        double mu = 0.0) {
    const double s = sigma * std::sqrt(tau);
    const double drift = (mu - 0.5 * sigma * sigma) * tau;
    const double z_star = (std::log(strike / f) - drift) / s;
    auto integrand = [&](double z) {
        return (f * std::exp(drift + s * z) - strike) * normal_pdf(z);
    };
    return simpson(integrand, z_star, z_star + 40.0, 200000);
}

// Exhaustive search over lattice paths of a storage contract. Levels are
// integers in [0, n_levels); moves per period lie in [-max_out, max_in].
struct BruteForceResult {
    double value = -std::numeric_limits<double>::infinity();
    std::vector<int> moves;
    long paths = 0;
};

inline void brute_force_recurse(const std::vector<double>& prices, int n_levels, int max_in,
                                int max_out, int terminal, double step, std::size_t period,
                                int level, std::vector<int>& moves, BruteForceResult& best) {
    if (period == prices.size()) {
        if (level != terminal) return;
        ++best.paths;
        double v = 0.0;
        for (std::size_t j = 0; j < prices.size(); ++j) v -= moves[j] * step * prices[j];
        if (v > best.value) {
            best.value = v;
            best.moves = moves;
        }
        return;
    }
    for (int m = -max_out; m <= max_in; ++m) {
        const int next = level + m;
        if (next < 0 || next >= n_levels) continue;
        moves.push_back(m);
        brute_force_recurse(prices, n_levels, max_in, max_out, terminal, step, period + 1, next,
                            moves, best);
        moves.pop_back();
    }
}

inline BruteForceResult brute_force_storage(const std::vector<double>& prices, int n_levels,
                                            int max_in, int max_out, int initial, int terminal,
                                            double step = 1.0) {
    BruteForceResult best;
    std::vector<int> moves;
    brute_force_recurse(prices, n_levels, max_in, max_out, terminal, step, 0, initial, moves,
                        best);
    return best;
}

inline double sample_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace oracle
