#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hedgesim/statistics.hpp"

using namespace hedgesim;

TEST(CompensatedSum, RecoversLostLowOrderBits) {
    CompensatedSum s;
    s.add(1e16);
    for (int i = 0; i < 1000; ++i) s.add(1.0);
    s.add(-1e16);
    EXPECT_EQ(s.value(), 1000.0);
}

TEST(SampleMoments, KnownSample) {
    const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
    const auto m = sample_moments(xs);
    EXPECT_DOUBLE_EQ(m.mean, 5.0);
    EXPECT_NEAR(m.stddev, std::sqrt(32.0 / 7.0), 1e-14);
    EXPECT_NEAR(m.stderr_mean, std::sqrt(32.0 / 7.0) / std::sqrt(8.0), 1e-14);
    EXPECT_EQ(m.count, 8u);
}

TEST(Quantiles, LinearInterpolation) {
    const std::vector<double> sorted{1, 2, 3, 4, 5};
    EXPECT_DOUBLE_EQ(sorted_quantile(sorted, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(sorted_quantile(sorted, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(sorted_quantile(sorted, 1.0), 5.0);
    EXPECT_DOUBLE_EQ(sorted_quantile(sorted, 0.1), 1.4);
}

TEST(Summarize, OrderOfSamplesKeptAndQuantilesSorted) {
    std::vector<double> xs(101);
    std::iota(xs.rbegin(), xs.rend(), 0.0);
    const auto d = summarize(xs);
    EXPECT_EQ(d.samples.front(), 100.0);
    EXPECT_DOUBLE_EQ(d.mean, 50.0);
    EXPECT_DOUBLE_EQ(d.quantiles[3], 50.0);
    EXPECT_DOUBLE_EQ(d.quantiles[0], 1.0);
    for (std::size_t i = 1; i < d.quantiles.size(); ++i) EXPECT_LE(d.quantiles[i - 1], d.quantiles[i]);
}

TEST(LeastSquares, ExactLine) {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, -1, -3, -5};
    EXPECT_NEAR(least_squares_slope(x, y), -2.0, 1e-14);
}
