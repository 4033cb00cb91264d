#pragma once

namespace hedgesim {

// European call. All prices are in bond-numeraire units (zero rate).
struct CallSpec {
    double strike = 100.0;
    double expiry = 1.0;

    void validate() const;
    bool operator==(const CallSpec&) const = default;
};

enum class PricingModel { RiskNeutral, Probabilistic, Intrinsic };

const char* to_string(PricingModel model);

// Market parameters the pricers need besides (f, t).
struct PricingInputs {
    double sigma0 = 0.2;
    double mu0 = 0.0;
};

// Error function Phi(x) = 2/sqrt(pi) * int_0^x e^{-s^2} ds.
double erf_like(double x);

// Standard normal CDF, N(x) = (1 + Phi(x / sqrt 2)) / 2, evaluated through
// erfc so the lower tail keeps full relative precision.
double normal_cdf(double x);

// Zero-rate Black-Scholes call; at t == expiry returns the payoff.
double bs_price(double f, double t, const CallSpec& call, double sigma0);
double bs_delta(double f, double t, const CallSpec& call, double sigma0);
double bs_gamma(double f, double t, const CallSpec& call, double sigma0);

// Expected payoff under the drifted real-world GBM, i.e. bs_price at the
// drift-adjusted forward f e^{mu0 (T_e - t)}. GBM-specific closed form.
double probabilistic_price(double f, double t, const CallSpec& call, double sigma0, double mu0);
double probabilistic_delta(double f, double t, const CallSpec& call, double sigma0, double mu0);

// (f - K) theta[f - K]; theta[0] = 0.
double intrinsic_price(double f, const CallSpec& call);
double intrinsic_delta(double f, const CallSpec& call);

double price(PricingModel model, double f, double t, const CallSpec& call,
             const PricingInputs& in);
double delta(PricingModel model, double f, double t, const CallSpec& call,
             const PricingInputs& in);

// Driftless GBM density of F at time t started from f0.
double lognormal_density(double f, double t, double f0, double sigma0);

// Expected intrinsic gamma rate at time t: (sigma^2 K^2 / 2) P(K, t).
double gamma_integrand(double t, const CallSpec& call, double f0, double sigma0);

// Parameters of the Gaussian integral behind the time value:
// a = sigma / (2 sqrt 2), b = ln(K / f0) / (sigma sqrt 2).
struct TimeValueParams {
    double a;
    double b;
};

TimeValueParams time_value_params(const CallSpec& call, double f0, double sigma0);

// Definite integral J(x) = int_0^x exp(-a^2 y^2 - b^2 / y^2) dy in closed
// form (the J+ branch for b > 0, J- for b < 0, their common limit at b = 0).
double gaussian_integral_j(double a, double b, double x);

// Call time value V_T over horizon T started at f0, evaluated from the
// error-function closed form. Equal to bs_price(f0, 0) - intrinsic(f0).
double time_value_closed_form(const CallSpec& call, double f0, double sigma0, double horizon);

// Same quantity through sigma K / sqrt(2 pi) e^{-2ab} J(sqrt T).
double time_value_via_gaussian_integral(const CallSpec& call, double f0, double sigma0,
                                        double horizon);

// int_0^T gamma_integrand dt by tanh-sinh quadrature (handles the
// 1/sqrt(t) endpoint behaviour at the money).
double time_value_by_quadrature(const CallSpec& call, double f0, double sigma0, double horizon,
                                double tolerance = 1e-13);

}  // namespace hedgesim
