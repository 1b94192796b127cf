#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cirbridge/expm1_ratios.hpp"
#include "cirbridge/quadrature.hpp"

using namespace cirb;

TEST(Simpson, PolynomialsAreExact) {
    EXPECT_NEAR(integrate_simpson([](double x) { return 3 * x * x; }, 0.0, 2.0), 8.0, 1e-13);
    EXPECT_NEAR(integrate_simpson([](double x) { return x * x * x - x; }, -1.0, 3.0), 16.0, 1e-12);
}

TEST(Simpson, SmoothOracles) {
    EXPECT_NEAR(integrate_simpson([](double x) { return std::exp(x); }, 0.0, 1.0), std::numbers::e - 1,
                1e-13);
    EXPECT_NEAR(integrate_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0,
                1e-12);
    // nonsmooth at the endpoint: int_0^1 x^1.5 = 2/5
    EXPECT_NEAR(integrate_simpson([](double x) { return x * std::sqrt(x); }, 0.0, 1.0), 0.4, 1e-11);
    EXPECT_NEAR(integrate_simpson([](double x) { return 1.0 / (1.0 + x * x); }, 0.0, 1.0),
                std::numbers::pi / 4, 1e-13);
}

TEST(Simpson, EmptyAndReversedIntervals) {
    EXPECT_EQ(integrate_simpson([](double x) { return x; }, 0.5, 0.5), 0.0);
    EXPECT_NEAR(integrate_simpson([](double x) { return x; }, 1.0, 0.0), -0.5, 1e-15);
}

TEST(Simpson, DoesNotStopOnASymmetricSpike) {
    // coarse samples at 0, 0.25, 0.5, 0.75, 1 all miss the bump
    auto f = [](double x) { return std::exp(-std::pow((x - 0.61) / 0.01, 2)); };
    EXPECT_NEAR(integrate_simpson(f, 0.0, 1.0), 0.01 * std::sqrt(std::numbers::pi), 1e-10);
}

TEST(Simpson, ReportsNonConvergence) {
    SimpsonOptions opts;
    opts.max_depth = 6;
    EXPECT_THROW(integrate_simpson([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, opts),
                 NumericError);
}

TEST(ExpRatios, SeriesAndDirectFormsAgree) {
    for (double z : {-1e-9, -1e-6, -1e-3, -0.1, -0.49, -0.51, -1.0, -10.0, 1e-7, 0.3}) {
        const double p1 = std::expm1(z) / z;
        EXPECT_NEAR(phi1(z), p1, 1e-15 * std::abs(p1) + 1e-16);
    }
    for (double z : {-0.6, -1.0, -5.0, 0.7}) {
        EXPECT_NEAR(phi2(z), (std::exp(z) - 1 - z) / (z * z), 1e-13);
        EXPECT_NEAR(phi3(z), (z * std::exp(z) - std::exp(z) + 1) / (z * z), 1e-13);
    }
    EXPECT_DOUBLE_EQ(phi1(0.0), 1.0);
    EXPECT_DOUBLE_EQ(phi2(0.0), 0.5);
    EXPECT_DOUBLE_EQ(phi3(0.0), 0.5);
    // continuity across the series switch
    const double below = std::nextafter(-0.5, 0.0), at = -0.5;
    EXPECT_NEAR(phi2(below), phi2(at), 1e-15);
    EXPECT_NEAR(phi3(below), phi3(at), 1e-15);
}
