#pragma once

#include <array>
#include <span>
#include <vector>

namespace hedgesim {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x);
    double value() const { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double compensated_mean(std::span<const double> xs);

// Sample mean and unbiased standard deviation in one place.
struct SampleMoments {
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

SampleMoments sample_moments(std::span<const double> xs);

inline constexpr std::array<double, 7> kReportedQuantiles{0.01, 0.05, 0.25, 0.50,
                                                          0.75, 0.95, 0.99};

struct TerminalDistribution {
    std::vector<double> samples;
    double mean = 0.0;
    double stddev = 0.0;
    double stderr_mean = 0.0;
    std::array<double, kReportedQuantiles.size()> quantiles{};
};

// Statistics are computed from the samples in index order, so the result
// does not depend on how the samples were produced.
TerminalDistribution summarize(std::vector<double> samples);

// Linear-interpolation quantile (type 7) of an already sorted sample.
double sorted_quantile(std::span<const double> sorted, double p);

// Ordinary least squares slope of y on x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hedgesim
