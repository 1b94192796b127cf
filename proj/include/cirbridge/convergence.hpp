// Monte Carlo error of the simulated mean and standard deviation against the
// closed forms, over a grid of (paths, steps) cells.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "cirbridge/ensemble.hpp"

namespace cirb {

struct ConvergenceCell {
    std::uint64_t n_paths;
    std::int64_t n_steps;
    bool skipped = false;
    double max_err_mean = NAN;
    double avg_err_mean = NAN;
    double max_err_std = NAN;
    double avg_err_std = NAN;
    /// |sample mean at t = 1|
    double terminal_err = NAN;
};

/// Errors of one simulated summary; averages run over all N + 1 grid points.
ConvergenceCell convergence_errors(const BridgeParamsd &p, const EnsembleMoments &m);

struct ConvergencePlan {
    std::vector<std::uint64_t> paths{10000, 100000, 1000000};
    std::vector<std::int64_t> steps{100, 1000, 10000};
    /// run the 10^6 x 10^4 cell as well
    bool include_largest = false;
    /// cells whose projected runtime exceeds this are skipped
    double budget_seconds = std::numeric_limits<double>::infinity();
};

/// Rows ordered by steps, then paths.
std::vector<ConvergenceCell> run_convergence(const BridgeParamsd &p, const ConvergencePlan &plan,
                                             std::uint64_t seed, const SimOptions &opts = {});

void write_convergence(std::ostream &out, const std::vector<ConvergenceCell> &rows);

} // namespace cirb
