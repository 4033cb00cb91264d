#include "hedgesim/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "hedgesim/errors.hpp"

namespace hedgesim {

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

double compensated_mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    return s.value() / static_cast<double>(xs.size());
}

SampleMoments sample_moments(std::span<const double> xs) {
    SampleMoments m;
    m.count = xs.size();
    if (xs.empty()) return m;
    m.mean = compensated_mean(xs);
    if (xs.size() > 1) {
        CompensatedSum ss;
        for (double x : xs) ss.add((x - m.mean) * (x - m.mean));
        m.stddev = std::sqrt(ss.value() / static_cast<double>(xs.size() - 1));
    }
    m.stderr_mean = m.stddev / std::sqrt(static_cast<double>(xs.size()));
    return m;
}

double sorted_quantile(std::span<const double> sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

TerminalDistribution summarize(std::vector<double> samples) {
    TerminalDistribution d;
    const auto m = sample_moments(samples);
    d.mean = m.mean;
    d.stddev = m.stddev;
    d.stderr_mean = m.stderr_mean;
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < kReportedQuantiles.size(); ++i) {
        d.quantiles[i] = sorted_quantile(sorted, kReportedQuantiles[i]);
    }
    d.samples = std::move(samples);
    return d;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InputError("slope fit needs two or more paired points");
    }
    const double mx = compensated_mean(x);
    const double my = compensated_mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace hedgesim
