#include <gtest/gtest.h>

#include <cmath>

#include "cirbridge/ensemble.hpp"
#include "cirbridge/moments.hpp"

using namespace cirb;

namespace {

const BridgeParamsd kP2023(0.0599, 0.5775, HModeld::model2(0.3837));

SimOptions threads(unsigned n, std::size_t block = 64) { return SimOptions{n, block}; }

} // namespace

TEST(Ensemble, ZeroPathWithoutSourceOrNoise) {
    const BridgeParamsd p(0.0, 0.0, HModeld::model1(1.0));
    const auto ens = simulate_bridge(p, TimeGrid(50), 1, 3);
    EXPECT_EQ(ens.states.rows(), 1);
    EXPECT_EQ(ens.states.cols(), 51);
    EXPECT_EQ(ens.states.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(ens.master_seed, 3u);
}

TEST(Ensemble, BridgeStartsAtZeroAndStaysNonnegative) {
    for (double scale : {1.0, 4.0}) {
        const BridgeParamsd p(0.0599, 0.5775 * scale, HModeld::model2(0.3837));
        for (std::uint64_t seed : {1u, 2u}) {
            const auto ens = simulate_bridge(p, TimeGrid(1000), 10000, seed);
            EXPECT_EQ(ens.states.col(0).cwiseAbs().maxCoeff(), 0.0);
            EXPECT_GE(ens.states.minCoeff(), 0.0);
            EXPECT_EQ(ens.dust_clamps, 0u);
        }
    }
}

TEST(Ensemble, RequiresUnitHorizonForBridges) {
    EXPECT_THROW(PathGenerator::bridge(kP2023, TimeGrid(10, 2.0), 1), DomainError);
    EXPECT_THROW(simulate_bridge(kP2023, TimeGrid(10), 0, 1), DomainError);
}

TEST(Ensemble, IdenticalAcrossThreadCounts) {
    const TimeGrid g(200);
    const auto ref = simulate_bridge(kP2023, g, 1000, 17, threads(1));
    for (unsigned n : {4u, 8u}) {
        const auto e = simulate_bridge(kP2023, g, 1000, 17, threads(n));
        EXPECT_TRUE((e.states.array() == ref.states.array()).all()) << n << " threads";
    }
    const auto again = simulate_bridge(kP2023, g, 1000, 17, threads(1));
    EXPECT_TRUE((again.states.array() == ref.states.array()).all());
    // a path does not depend on how many others are simulated
    const auto fewer = simulate_bridge(kP2023, g, 10, 17, threads(3));
    EXPECT_TRUE((fewer.states.array() == ref.states.topRows(10).array()).all());
    const auto other = simulate_bridge(kP2023, g, 10, 18, threads(1));
    EXPECT_FALSE((other.states.array() == ref.states.topRows(10).array()).all());
}

TEST(Ensemble, StreamingMomentsIdenticalAcrossThreadCounts) {
    const auto gen = PathGenerator::bridge(kP2023, TimeGrid(100), 5);
    const auto ref = ensemble_moments(gen, 3000, threads(1));
    for (unsigned n : {4u, 8u}) {
        const auto m = ensemble_moments(gen, 3000, threads(n));
        EXPECT_TRUE((m.mean.array() == ref.mean.array()).all());
        EXPECT_TRUE((m.std_dev.array() == ref.std_dev.array()).all());
    }
    const auto stored = ensemble_moments(simulate(gen, 3000, threads(1)));
    EXPECT_LT((stored.mean - ref.mean).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((stored.std_dev - ref.std_dev).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(ref.n_paths, 3000u);
}

TEST(Ensemble, MomentsTrackTheory) {
    const auto m = ensemble_moments(PathGenerator::bridge(kP2023, TimeGrid(500), 9), 40000);
    for (Eigen::Index i = 0; i < m.mean.size() - 1; i += 25) {
        const double t = m.time[std::size_t(i)];
        const double sd = std::sqrt(variance_closed(kP2023, t));
        const double se = sd / std::sqrt(40000.0);
        EXPECT_NEAR(m.mean(i), mean_closed(kP2023, t), 5 * se + 1e-4) << "t = " << t;
    }
    // the last step freezes h at its midpoint, so the pin is approximate:
    // the terminal mean is O(dt) and the spread is a small fraction of its peak
    const Eigen::Index last = m.mean.size() - 1;
    EXPECT_LT(std::abs(m.mean(last)), 5e-4);
    EXPECT_LT(m.std_dev(last), 0.1 * m.std_dev.maxCoeff());
}

TEST(ClassicalCir, DeterministicLimit) {
    const CirParamsd p{1.0, 1.0, 0.0, 0.0};
    const TimeGrid g(1000, 3.0);
    const auto ens = simulate_cir(p, g, 1, 1);
    for (Eigen::Index i = 0; i <= 1000; i += 50)
        EXPECT_NEAR(ens.states(0, i), 1.0 - std::exp(-g.time(i)), 5 * g.dt());
}

TEST(ClassicalCir, LowVolatilityStaysAwayFromZero) {
    const CirParamsd p{1.0, 1.0, 1.0, 1.0};
    const TimeGrid g(1000, 10.0);
    const auto ens = simulate_cir(p, g, 500, 2);
    const auto after = ens.states.rightCols(800);
    EXPECT_EQ((after.array() == 0.0).count(), 0);
    EXPECT_LT(double((after.array() < 1e-3).count()) / double(after.size()), 1e-3);
}

TEST(ClassicalCir, HighVolatilityTouchesZero) {
    const CirParamsd p{1.0, 1.0, 4.0, 1.0};
    const TimeGrid g(1000, 10.0);
    const auto ens = simulate_cir(p, g, 500, 2);
    EXPECT_GE(ens.states.minCoeff(), 0.0);
    // the source a > 0 keeps every state strictly positive; near-zero episodes
    // show up at the scale of a single step's source, a dt
    const auto after = ens.states.rightCols(800);
    const double floor = 2 * p.a * g.dt();
    EXPECT_GT(double((after.array() < floor).count()) / double(after.size()), 0.05);
}

TEST(ResolveThreads, ExplicitWins) {
    EXPECT_EQ(resolve_threads(3), 3u);
    EXPECT_GE(resolve_threads(0), 1u);
}
