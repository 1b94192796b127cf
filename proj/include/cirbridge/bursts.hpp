// Burst events: excursions above a height threshold that last at least a
// threshold duration, and summary statistics of their counts and durations.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cirbridge/ensemble.hpp"
#include "cirbridge/error.hpp"

namespace cirb {

struct BurstConfig {
    double x_threshold = 0.01;
    double t_threshold = 0.02;
    double dt = 1e-4;

    void validate() const;
    /// Shortest retained excursion in grid steps.
    std::int64_t min_steps() const {
        return static_cast<std::int64_t>(std::ceil(t_threshold / dt - 1e-9));
    }
};

struct BurstEvent {
    double start_s;
    double end_s;
    double duration;
};

/// Calls fn(start_index, end_index) for each retained excursion of `path`.
template <typename Fn>
void for_each_burst(std::span<const double> path, double x_threshold, std::int64_t min_steps,
                    Fn &&fn) {
    const auto n = static_cast<std::int64_t>(path.size());
    std::int64_t start = -1;
    for (std::int64_t i = 0; i < n; ++i) {
        const bool above = path[static_cast<std::size_t>(i)] >= x_threshold;
        if (start < 0) {
            if (above) start = i;
        } else if (!above) {
            if (i - start >= min_steps) fn(start, i);
            start = -1;
        }
    }
    // still above at the final index: closes there
    if (start >= 0 && n - 1 - start >= min_steps) fn(start, n - 1);
}

std::vector<BurstEvent> detect_bursts(std::span<const double> path, const BurstConfig &cfg);

struct SampleSummary {
    std::int64_t n = 0;
    double average = NAN;
    /// n - 1 denominator
    double variance = NAN;
    double std_dev = NAN;
    /// m3 / m2^1.5 with central moments
    double skewness = NAN;
    /// excess: m4 / m2^2 - 3
    double kurtosis = NAN;
    double cv = NAN;
    double maximum = NAN;
    double minimum = NAN;

    bool defined() const { return n > 0; }
};

struct HistogramBin {
    double left;
    double right;
    double density;
};

/// Exact integer tallies; merging is plain addition, so any chunking of the
/// paths gives the same statistics.
struct BurstTally {
    std::int64_t paths = 0;
    /// per_path[k] = number of paths with k retained events
    std::vector<std::int64_t> per_path;
    /// by_steps[d] = number of events lasting d grid steps
    std::vector<std::int64_t> by_steps;

    void add_path(std::int64_t n_events);
    void add_event(std::int64_t steps);
    void merge(const BurstTally &o);
};

struct BurstStats {
    BurstConfig config;
    std::int64_t n_paths = 0;
    std::int64_t n_events = 0;
    SampleSummary counts;
    SampleSummary durations;
    /// probability of k events per path, k = 0..max
    std::vector<double> count_pd;
    std::vector<HistogramBin> duration_hist;
};

BurstStats summarize(const BurstTally &tally, const BurstConfig &cfg, int hist_bins = 100);

BurstStats burst_statistics(const PathEnsemble &ens, const BurstConfig &cfg, int hist_bins = 100);

BurstStats burst_statistics(const PathGenerator &gen, std::uint64_t n_paths, const BurstConfig &cfg,
                            const SimOptions &opts = {}, int hist_bins = 100);

enum class BurstScenario { Base, DoubleT, DoubleX };

std::string scenario_name(BurstScenario s);
BurstScenario scenario_from_name(const std::string &name);
BurstConfig scenario_config(const BurstConfig &base, BurstScenario s);

/// All scenarios evaluated on one shared ensemble.
std::vector<BurstStats> burst_scenarios(const PathGenerator &gen, std::uint64_t n_paths,
                                        const BurstConfig &base,
                                        const std::vector<BurstScenario> &scenarios,
                                        const SimOptions &opts = {}, int hist_bins = 100);

} // namespace cirb
