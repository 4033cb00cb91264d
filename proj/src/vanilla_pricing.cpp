#include "hedgesim/vanilla_pricing.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hedgesim/errors.hpp"

namespace hedgesim {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

// Time to expiry; rejects t beyond expiry (small rounding slack allowed so
// grid times computed as t_start + i dt still hit the boundary).
double time_to_expiry(double t, const CallSpec& call) {
    const double tau = call.expiry - t;
    if (tau < -1e-12 * std::max(1.0, call.expiry)) {
        throw InputError("pricing time " + std::to_string(t) + " is beyond expiry " +
                         std::to_string(call.expiry));
    }
    return std::max(tau, 0.0);
}

void require_positive_price(double f) {
    if (!(f > 0.0)) {
        throw InputError("price must be positive, got " + std::to_string(f));
    }
}

}  // namespace

void CallSpec::validate() const {
    if (!(strike > 0.0)) throw InputError("call strike must be positive");
    if (!(expiry > 0.0)) throw InputError("call expiry must be positive");
}

const char* to_string(PricingModel model) {
    switch (model) {
        case PricingModel::RiskNeutral: return "risk_neutral";
        case PricingModel::Probabilistic: return "probabilistic";
        case PricingModel::Intrinsic: return "intrinsic";
    }
    return "unknown";
}

double erf_like(double x) { return std::erf(x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double bs_price(double f, double t, const CallSpec& call, double sigma0) {
    require_positive_price(f);
    const double tau = time_to_expiry(t, call);
    const double sd = sigma0 * std::sqrt(tau);
    if (sd == 0.0) return intrinsic_price(f, call);
    const double d1 = (std::log(f / call.strike) + 0.5 * sd * sd) / sd;
    const double d2 = d1 - sd;
    return f * normal_cdf(d1) - call.strike * normal_cdf(d2);
}

double bs_delta(double f, double t, const CallSpec& call, double sigma0) {
    require_positive_price(f);
    const double tau = time_to_expiry(t, call);
    const double sd = sigma0 * std::sqrt(tau);
    if (sd == 0.0) return intrinsic_delta(f, call);
    const double d1 = (std::log(f / call.strike) + 0.5 * sd * sd) / sd;
    return normal_cdf(d1);
}

double bs_gamma(double f, double t, const CallSpec& call, double sigma0) {
    require_positive_price(f);
    const double tau = time_to_expiry(t, call);
    const double sd = sigma0 * std::sqrt(tau);
    if (sd == 0.0) return 0.0;
    const double d1 = (std::log(f / call.strike) + 0.5 * sd * sd) / sd;
    return std::exp(-0.5 * d1 * d1) / (kSqrt2Pi * f * sd);
}

double probabilistic_price(double f, double t, const CallSpec& call, double sigma0, double mu0) {
    require_positive_price(f);
    const double tau = time_to_expiry(t, call);
    if (mu0 == 0.0) return bs_price(f, t, call, sigma0);
    return bs_price(f * std::exp(mu0 * tau), t, call, sigma0);
}

double probabilistic_delta(double f, double t, const CallSpec& call, double sigma0, double mu0) {
    require_positive_price(f);
    const double tau = time_to_expiry(t, call);
    if (mu0 == 0.0) return bs_delta(f, t, call, sigma0);
    const double growth = std::exp(mu0 * tau);
    return growth * bs_delta(f * growth, t, call, sigma0);
}

double intrinsic_price(double f, const CallSpec& call) {
    return f > call.strike ? f - call.strike : 0.0;
}

double intrinsic_delta(double f, const CallSpec& call) { return f > call.strike ? 1.0 : 0.0; }

double price(PricingModel model, double f, double t, const CallSpec& call,
             const PricingInputs& in) {
    switch (model) {
        case PricingModel::RiskNeutral: return bs_price(f, t, call, in.sigma0);
        case PricingModel::Probabilistic:
            return probabilistic_price(f, t, call, in.sigma0, in.mu0);
        case PricingModel::Intrinsic: return intrinsic_price(f, call);
    }
    return 0.0;
}

double delta(PricingModel model, double f, double t, const CallSpec& call,
             const PricingInputs& in) {
    switch (model) {
        case PricingModel::RiskNeutral: return bs_delta(f, t, call, in.sigma0);
        case PricingModel::Probabilistic:
            return probabilistic_delta(f, t, call, in.sigma0, in.mu0);
        case PricingModel::Intrinsic: return intrinsic_delta(f, call);
    }
    return 0.0;
}

double lognormal_density(double f, double t, double f0, double sigma0) {
    if (!(f > 0.0)) throw InputError("density argument must be positive");
    if (!(t > 0.0)) throw InputError("density time must be positive");
    if (!(sigma0 > 0.0)) throw InputError("density needs positive volatility");
    const double var = sigma0 * sigma0 * t;
    const double x = std::log(f / f0) + 0.5 * var;
    return std::exp(-x * x / (2.0 * var)) / (f * sigma0 * std::sqrt(2.0 * std::numbers::pi * t));
}

double gamma_integrand(double t, const CallSpec& call, double f0, double sigma0) {
    if (!(t > 0.0)) throw InputError("gamma integrand time must be positive");
    const double var = sigma0 * sigma0 * t;
    const double x = std::log(call.strike / f0) + 0.5 * var;
    return 0.5 * sigma0 * call.strike / std::sqrt(2.0 * std::numbers::pi * t) *
           std::exp(-x * x / (2.0 * var));
}

TimeValueParams time_value_params(const CallSpec& call, double f0, double sigma0) {
    return {sigma0 / (2.0 * kSqrt2), std::log(call.strike / f0) / (sigma0 * kSqrt2)};
}

double gaussian_integral_j(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    const double up = std::exp(2.0 * a * b);
    const double down = std::exp(-2.0 * a * b);
    // Lower-limit constant: J+ (b > 0) gets e^{-2ab} - e^{2ab}, J- (b < 0)
    // the negative; both vanish at b = 0.
    double lower = 0.0;
    if (b > 0.0) lower = down - up;
    if (b < 0.0) lower = up - down;
    return std::sqrt(std::numbers::pi) / (4.0 * a) *
           (lower + up * std::erf(a * x + b / x) + down * std::erf(a * x - b / x));
}

double time_value_closed_form(const CallSpec& call, double f0, double sigma0, double horizon) {
    if (!(sigma0 > 0.0)) throw InputError("time value needs positive volatility");
    if (!(horizon > 0.0)) throw InputError("time value needs positive horizon");
    require_positive_price(f0);
    const double k = call.strike;
    const double log_moneyness = std::log(k / f0);
    const double half_var = 0.5 * sigma0 * sigma0 * horizon;
    const double scale = sigma0 * std::sqrt(2.0 * horizon);
    const double k1 = (half_var - log_moneyness) / scale;
    const double k2 = (half_var + log_moneyness) / scale;
    // 1 + Phi(x) = erfc(-x) and 1 - Phi(x) = erfc(x) remove the cancellation
    // between the +-(f0 - K) term and the error functions.
    if (f0 < k) return 0.5 * (f0 * std::erfc(-k1) - k * std::erfc(k2));
    return 0.5 * (k * std::erfc(-k2) - f0 * std::erfc(k1));
}

double time_value_via_gaussian_integral(const CallSpec& call, double f0, double sigma0,
                                        double horizon) {
    if (!(sigma0 > 0.0)) throw InputError("time value needs positive volatility");
    if (!(horizon > 0.0)) throw InputError("time value needs positive horizon");
    const auto [a, b] = time_value_params(call, f0, sigma0);
    return sigma0 * call.strike / kSqrt2Pi * std::exp(-2.0 * a * b) *
           gaussian_integral_j(a, b, std::sqrt(horizon));
}

double time_value_by_quadrature(const CallSpec& call, double f0, double sigma0, double horizon,
                                double tolerance) {
    if (!(sigma0 > 0.0)) throw InputError("time value needs positive volatility");
    if (!(horizon > 0.0)) throw InputError("time value needs positive horizon");
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto integrand = [&](double t) { return gamma_integrand(t, call, f0, sigma0); };
    return integrator.integrate(integrand, 0.0, horizon, tolerance);
}

}  // namespace hedgesim
