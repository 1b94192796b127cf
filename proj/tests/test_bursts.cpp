#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cirbridge/bursts.hpp"

using namespace cirb;

namespace {

const BridgeParamsd kP2023(0.0599, 0.5775, HModeld::model2(0.3837));

BurstConfig cfg(double x = 0.01, double t = 0.02, double dt = 1e-3) { return {x, t, dt}; }

std::vector<double> pulse(std::size_t n, std::size_t from, std::size_t to, double level) {
    std::vector<double> v(n, 0.0);
    for (std::size_t i = from; i < to; ++i) v[i] = level;
    return v;
}

} // namespace

TEST(Detect, ZeroPathHasNoBursts) {
    std::vector<double> v(1001, 0.0);
    EXPECT_TRUE(detect_bursts(v, cfg()).empty());
}

TEST(Detect, SquarePulse) {
    const auto v = pulse(1001, 100, 150, 0.5);
    const auto ev = detect_bursts(v, cfg());
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_DOUBLE_EQ(ev[0].start_s, 0.1);
    EXPECT_DOUBLE_EQ(ev[0].end_s, 0.15);
    EXPECT_NEAR(ev[0].duration, 0.05, 1e-15);
}

TEST(Detect, ThresholdIsInclusiveOnEntry) {
    EXPECT_EQ(detect_bursts(pulse(1001, 100, 150, 0.01), cfg()).size(), 1u);
    EXPECT_TRUE(detect_bursts(pulse(1001, 100, 150, 0.0099999), cfg()).empty());
}

TEST(Detect, ShortExcursionsAreIgnored) {
    // 19 steps < 20, 20 steps == 20
    EXPECT_TRUE(detect_bursts(pulse(1001, 100, 119, 1.0), cfg()).empty());
    EXPECT_EQ(detect_bursts(pulse(1001, 100, 120, 1.0), cfg()).size(), 1u);
}

TEST(Detect, OpenExcursionClosesAtTheLastPoint) {
    const auto ev = detect_bursts(pulse(1001, 950, 1001, 1.0), cfg());
    ASSERT_EQ(ev.size(), 1u);
    EXPECT_DOUBLE_EQ(ev[0].end_s, 1.0);
    EXPECT_NEAR(ev[0].duration, 0.05, 1e-15);
}

TEST(Config, Validation) {
    EXPECT_NO_THROW(cfg().validate());
    EXPECT_THROW(cfg(0.0).validate(), DomainError);
    EXPECT_THROW(cfg(0.01, 0.001).validate(), DomainError);
    EXPECT_THROW(cfg(0.01, 1.0).validate(), DomainError);
    EXPECT_THROW(cfg(0.01, 0.02, 0.0).validate(), DomainError);
    EXPECT_EQ(cfg().min_steps(), 20);
    EXPECT_EQ(BurstConfig{}.min_steps(), 200);
}

TEST(Summary, IdenticalPulsesHaveZeroSpread) {
    BurstTally t;
    const auto c = cfg();
    for (int k = 0; k < 10; ++k) {
        t.add_path(2);
        t.add_event(50);
        t.add_event(50);
    }
    const auto s = summarize(t, c, 10);
    EXPECT_EQ(s.n_events, 20);
    EXPECT_DOUBLE_EQ(s.counts.average, 2.0);
    EXPECT_EQ(s.counts.variance, 0.0);
    EXPECT_DOUBLE_EQ(s.durations.average, 0.05);
    EXPECT_EQ(s.durations.variance, 0.0);
    EXPECT_EQ(s.durations.maximum, s.durations.minimum);
    EXPECT_TRUE(std::isnan(s.durations.skewness));
}

TEST(Summary, KnownSample) {
    BurstTally t;
    for (int n : {0, 1, 1, 2, 6}) t.add_path(n);
    const auto s = summarize(t, cfg(), 10);
    EXPECT_DOUBLE_EQ(s.counts.average, 2.0);
    EXPECT_DOUBLE_EQ(s.counts.variance, 5.5);
    EXPECT_DOUBLE_EQ(s.counts.std_dev, std::sqrt(5.5));
    EXPECT_DOUBLE_EQ(s.counts.cv, std::sqrt(5.5) / 2.0);
    // central moments m2 = 4.4, m3 = 10.8
    EXPECT_NEAR(s.counts.skewness, 10.8 / std::pow(4.4, 1.5), 1e-12);
    EXPECT_EQ(s.counts.maximum, 6.0);
    EXPECT_EQ(s.counts.minimum, 0.0);
    ASSERT_EQ(s.count_pd.size(), 7u);
    EXPECT_DOUBLE_EQ(s.count_pd[1], 0.4);
    EXPECT_FALSE(s.durations.defined());
}

TEST(Stats, NormalisationAndMonotonicity) {
    const auto gen = PathGenerator::bridge(kP2023, TimeGrid(1000), 3);
    const auto base = burst_statistics(gen, 2000, cfg());
    EXPECT_NEAR(std::accumulate(base.count_pd.begin(), base.count_pd.end(), 0.0), 1.0, 1e-12);
    double area = 0.0;
    for (const auto &b : base.duration_hist) area += b.density * (b.right - b.left);
    EXPECT_NEAR(area, 1.0, 1e-12);
    EXPECT_GE(base.durations.minimum, 0.02 - 1e-12);
    EXPECT_GT(base.counts.average, 0.5);

    const auto longer = burst_statistics(gen, 2000, cfg(0.01, 0.04));
    const auto higher = burst_statistics(gen, 2000, cfg(0.02, 0.02));
    EXPECT_LE(longer.counts.average, base.counts.average);
    EXPECT_LE(higher.counts.average, base.counts.average);
    EXPECT_GE(longer.durations.minimum, 0.04 - 1e-12);
}

TEST(Stats, ScenariosShareOneEnsemble) {
    const auto gen = PathGenerator::bridge(kP2023, TimeGrid(1000), 3);
    const std::vector<BurstScenario> all{BurstScenario::Base, BurstScenario::DoubleT,
                                         BurstScenario::DoubleX};
    const auto s = burst_scenarios(gen, 1500, cfg(), all);
    ASSERT_EQ(s.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto one = burst_statistics(gen, 1500, scenario_config(cfg(), all[i]));
        EXPECT_EQ(one.counts.average, s[i].counts.average);
        EXPECT_EQ(one.durations.average, s[i].durations.average);
    }
    EXPECT_EQ(s[1].config.t_threshold, 0.04);
    EXPECT_EQ(s[2].config.x_threshold, 0.02);
    EXPECT_THROW(burst_scenarios(gen, 10, cfg(0.01, 0.02, 1e-4), all), DomainError);
}

TEST(Stats, InvariantToChunkingAndThreads) {
    const auto gen = PathGenerator::bridge(kP2023, TimeGrid(1000), 11);
    const auto a = burst_statistics(gen, 3000, cfg(), SimOptions{1, 4096});
    const auto b = burst_statistics(gen, 3000, cfg(), SimOptions{4, 100});
    const auto c = burst_statistics(simulate(gen, 3000), cfg());
    for (const auto *o : {&b, &c}) {
        EXPECT_EQ(o->n_events, a.n_events);
        EXPECT_EQ(o->counts.average, a.counts.average);
        EXPECT_EQ(o->counts.variance, a.counts.variance);
        EXPECT_EQ(o->durations.average, a.durations.average);
        EXPECT_EQ(o->durations.kurtosis, a.durations.kurtosis);
    }
}

TEST(Scenario, Names) {
    for (auto s : {BurstScenario::Base, BurstScenario::DoubleT, BurstScenario::DoubleX})
        EXPECT_EQ(scenario_from_name(scenario_name(s)), s);
    EXPECT_THROW(scenario_from_name("triple"), DomainError);
}
