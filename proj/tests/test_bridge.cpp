#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cirbridge/bridge.hpp"
#include "cirbridge/quadrature.hpp"

using namespace cirb;

TEST(HModel, RejectsNonPositiveShape) {
    EXPECT_THROW(HModeld::model1(0.0), DomainError);
    EXPECT_THROW(HModeld::model2(-0.1), DomainError);
    EXPECT_THROW(HModeld::model2(std::nan("")), DomainError);
    EXPECT_FALSE(HModeld::model2(0.5).flagged());
    EXPECT_TRUE(HModeld::model2(1.5).flagged());
}

TEST(HEval, Examples) {
    EXPECT_DOUBLE_EQ(h_eval(HModeld::model1(1.0), 0.0), 1.0);
    EXPECT_NEAR(h_eval(HModeld::model2(0.3837), 0.0), 1.0 / 0.3837 + 1.0, 1e-12);
    EXPECT_NEAR(h_eval(HModeld::model2(0.3837), 0.0), 3.6062, 1e-4);
    EXPECT_NEAR(h_eval(HModeld::model1(1.6473), 0.5), 3.2946, 1e-12);
}

TEST(HEval, RejectsOutsideHalfOpenUnitInterval) {
    const auto m = HModeld::model1(1.0);
    EXPECT_THROW(h_eval(m, 1.0), DomainError);
    EXPECT_THROW(h_eval(m, -1e-12), DomainError);
    EXPECT_NO_THROW(h_eval(m, std::nextafter(1.0, 0.0)));
}

TEST(HPrimitive, Examples) {
    EXPECT_NEAR(h_primitive_diff(HModeld::model1(2.0), 0.0, 0.5), 2.0 * std::log(2.0), 1e-15);
    EXPECT_NEAR(h_primitive_diff(HModeld::model2(1.0), 0.0, 0.5), std::log(3.0), 1e-15);
    EXPECT_EQ(h_primitive_diff(HModeld::model2(0.2), 0.3, 0.3), 0.0);
    EXPECT_EQ(h_primitive_diff(HModeld::model1(0.7), 0.9, 0.9), 0.0);
    EXPECT_THROW(h_primitive_diff(HModeld::model1(1.0), 0.5, 0.4), DomainError);
    EXPECT_THROW(h_primitive_diff(HModeld::model1(1.0), 0.5, 1.0), DomainError);
}

TEST(HPrimitive, Additive) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> U(0.0, 0.999);
    for (int k = 0; k < 200; ++k) {
        double s[3] = {U(gen), U(gen), U(gen)};
        std::sort(s, s + 3);
        for (auto m : {HModeld::model1(0.05 + 3 * U(gen)), HModeld::model2(0.05 + 3 * U(gen))}) {
            const double whole = h_primitive_diff(m, s[0], s[2]);
            const double parts = h_primitive_diff(m, s[0], s[1]) + h_primitive_diff(m, s[1], s[2]);
            EXPECT_NEAR(parts, whole, 1e-12 * std::max(1.0, std::abs(whole)));
        }
    }
}

TEST(HPrimitive, MatchesQuadratureOfH) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(0.0, 0.99);
    for (int k = 0; k < 100; ++k) {
        double s1 = U(gen), s2 = U(gen);
        if (s1 > s2) std::swap(s1, s2);
        const auto m = k % 2 ? HModeld::model1(0.05 + 3 * U(gen)) : HModeld::model2(0.05 + 3 * U(gen));
        const double exact = h_primitive_diff(m, s1, s2);
        const double quad = integrate_simpson([&](double s) { return h_eval(m, s); }, s1, s2);
        EXPECT_NEAR(quad, exact, 1e-10 * std::max(exact, 1e-300)) << "pair " << k;
    }
}

TEST(HPrimitive, PinsAtTerminalTime) {
    for (double c : {1.0, 1.6473, 4.0}) {
        const double v = std::exp(-h_primitive_diff(HModeld::model1(c), 0.3, 1.0 - 1e-9));
        EXPECT_LT(v, 1e-8);
    }
}

TEST(HMin, Examples) {
    const auto m1 = h_min(HModeld::model1(1.6473));
    EXPECT_EQ(m1.s_star, 0.0);
    EXPECT_DOUBLE_EQ(m1.value, 1.6473);

    const auto m2 = h_min(HModeld::model2(1.0));
    EXPECT_EQ(m2.s_star, 0.0);
    EXPECT_DOUBLE_EQ(m2.value, 2.0);

    const auto m3 = h_min(HModeld::model2(0.3837));
    EXPECT_NEAR(m3.s_star, 0.30815, 1e-12);
    EXPECT_NEAR(m3.value, 4.0 / 1.3837, 1e-12);
    EXPECT_NEAR(m3.value, 2.8907, 2e-4);
}

TEST(HMin, IsTheMinimumOnAGrid) {
    for (double eps : {0.01, 0.0808, 0.3837, 0.9, 1.0, 2.5}) {
        const auto m = HModeld::model2(eps);
        const auto hm = h_min(m);
        EXPECT_NEAR(h_eval(m, hm.s_star), hm.value, 1e-12);
        for (int i = 0; i < 1000; ++i) EXPECT_GE(h_eval(m, i / 1000.0), hm.value - 1e-12);
    }
}

TEST(HEval, MonotoneAfterMinimizer) {
    for (auto m : {HModeld::model1(0.5), HModeld::model2(0.0808), HModeld::model2(0.3837)}) {
        const double s0 = h_min(m).s_star;
        double prev = h_eval(m, s0);
        for (int i = 1; i < 1000; ++i) {
            const double s = s0 + (1.0 - 1e-6 - s0) * i / 1000.0;
            const double v = h_eval(m, s);
            EXPECT_GE(v, prev);
            prev = v;
        }
    }
}

TEST(HighVolatility, Examples) {
    EXPECT_TRUE(is_high_volatility(BridgeParamsd(0.0599, 0.5775, HModeld::model2(0.3837))));
    EXPECT_FALSE(is_high_volatility(BridgeParamsd(1.0, 0.0, HModeld::model2(0.3837))));
    EXPECT_FALSE(is_high_volatility(BridgeParamsd(1.0, 0.0, HModeld::model1(2.0))));
    EXPECT_TRUE(is_high_volatility(BridgeParamsd(0.0600, 0.5942, HModeld::model1(1.6473))));
}

TEST(HighVolatility, InvariantUnderJointScaling) {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const double a = U(gen), sigma = 2 * U(gen), kappa = 0.1 + 10 * U(gen);
        const auto m = k % 2 ? HModeld::model1(0.05 + 3 * U(gen)) : HModeld::model2(0.05 + 3 * U(gen));
        const BridgeParamsd p(a, sigma, m);
        const BridgeParamsd q(kappa * a, std::sqrt(kappa) * sigma, m);
        const double margin = std::abs(a - sigma * sigma / 2 * h_min(m).value);
        if (margin < 1e-9) continue;
        EXPECT_EQ(is_high_volatility(p), is_high_volatility(q));
    }
}

TEST(PinningBound, Examples) {
    const auto b1 = terminal_pinning_bound(HModeld::model1(2.0));
    EXPECT_EQ(b1.h_bar, 2.0);
    EXPECT_EQ(b1.omega, 0.0);
    const auto b2 = terminal_pinning_bound(HModeld::model2(0.5));
    EXPECT_EQ(b2.h_bar, 1.0);
    EXPECT_EQ(b2.omega, 2.0);
    EXPECT_NEAR(terminal_pinning_bound(HModeld::model2(0.0808)).omega, 12.376, 1e-3);
}

TEST(PinningBound, BracketsH) {
    for (auto m : {HModeld::model1(0.7), HModeld::model2(0.0808), HModeld::model2(2.0)}) {
        const auto b = terminal_pinning_bound(m);
        for (int i = 0; i < 1000; ++i) {
            const double s = i / 1000.0;
            EXPECT_LE(b.h_bar / (1 - s), h_eval(m, s) * (1 + 1e-14));
            EXPECT_LE(h_eval(m, s), (b.h_bar / (1 - s) + b.omega) * (1 + 1e-14));
        }
    }
}

TEST(BridgeParams, Validation) {
    EXPECT_THROW(BridgeParamsd(-1.0, 0.5, HModeld::model1(1.0)), DomainError);
    EXPECT_THROW(BridgeParamsd(0.1, -0.5, HModeld::model1(1.0)), DomainError);
    EXPECT_THROW((CirParamsd{1.0, -1.0, 1.0, 0.0}.validate()), DomainError);
}

TEST(TimeGrid, Breakpoints) {
    const TimeGrid g(1000);
    EXPECT_EQ(g.n_points(), 1001);
    EXPECT_DOUBLE_EQ(g.dt(), 1e-3);
    EXPECT_EQ(g.time(0), 0.0);
    EXPECT_EQ(g.time(1000), 1.0);
    EXPECT_EQ(g.time(300), 0.3);
    EXPECT_NEAR(g.dt() * 1000, 1.0, 1e-15);

    const TimeGrid h(7, 3.5);
    EXPECT_EQ(h.time(7), 3.5);
    EXPECT_DOUBLE_EQ(h.dt(), 0.5);
    EXPECT_THROW(TimeGrid(0), DomainError);
    EXPECT_THROW(TimeGrid(10, -1.0), DomainError);
}
