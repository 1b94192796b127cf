// Path ensembles: generation, in-memory storage and streaming moment summaries.
//
// Determinism contract: path k is a pure function of (master seed, k), and all
// reductions run over fixed blocks of `block_paths` consecutive paths that are
// merged in block order. Results are therefore bit-identical for any thread
// count (they do depend on block_paths).
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "cirbridge/bridge.hpp"
#include "cirbridge/ivi.hpp"
#include "cirbridge/parallel.hpp"

namespace cirb {

struct SimOptions {
    unsigned threads = 0;
    std::size_t block_paths = 4096;
};

/// Generates individual paths of either the bridge or the classical process.
class PathGenerator {
public:
    static PathGenerator bridge(const BridgeParamsd &p, const TimeGrid &grid,
                                std::uint64_t master_seed);
    static PathGenerator cir(const CirParamsd &p, const TimeGrid &grid, std::uint64_t master_seed);

    const TimeGrid &grid() const { return grid_; }
    std::uint64_t master_seed() const { return seed_; }

    /// Writes path `index` into out[0..N]; out.size() must be N + 1.
    void generate(std::uint64_t index, std::span<double> out, StepDiagnostics &diag) const;

private:
    PathGenerator(TimeGrid grid, double x0, std::vector<StepKernel> kernels, std::uint64_t seed)
        : grid_(grid), x0_(x0), kernels_(std::move(kernels)), seed_(seed) {}

    TimeGrid grid_;
    double x0_;
    std::vector<StepKernel> kernels_;
    std::uint64_t seed_;
};

using StateMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct PathEnsemble {
    TimeGrid grid;
    /// n_paths x (N + 1), one row per path.
    StateMatrix states;
    std::uint64_t master_seed;
    std::uint64_t dust_clamps = 0;

    Eigen::Index n_paths() const { return states.rows(); }
    std::span<const double> path(Eigen::Index k) const {
        return {states.data() + k * states.cols(), static_cast<std::size_t>(states.cols())};
    }
};

PathEnsemble simulate(const PathGenerator &gen, std::uint64_t n_paths, const SimOptions &opts = {});

inline PathEnsemble simulate_bridge(const BridgeParamsd &p, const TimeGrid &grid,
                                    std::uint64_t n_paths, std::uint64_t master_seed,
                                    const SimOptions &opts = {}) {
    return simulate(PathGenerator::bridge(p, grid, master_seed), n_paths, opts);
}

inline PathEnsemble simulate_cir(const CirParamsd &p, const TimeGrid &grid, std::uint64_t n_paths,
                                 std::uint64_t master_seed, const SimOptions &opts = {}) {
    return simulate(PathGenerator::cir(p, grid, master_seed), n_paths, opts);
}

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Per-time-index sample mean and standard deviation (n - 1 denominator).
struct EnsembleMoments {
    std::vector<double> time;
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev;
    std::uint64_t n_paths = 0;
    std::uint64_t dust_clamps = 0;
};

EnsembleMoments ensemble_moments(const PathGenerator &gen, std::uint64_t n_paths,
                                 const SimOptions &opts = {});

EnsembleMoments ensemble_moments(const PathEnsemble &ens);

/// Streams every path through visit(path_index, span) block by block; each
/// block's visitor state comes from make_state() and the states are returned in
/// block order for an ordered merge.
template <typename State, typename MakeState, typename Visit>
std::vector<State> visit_paths(const PathGenerator &gen, std::uint64_t n_paths,
                               const SimOptions &opts, MakeState &&make_state, Visit &&visit,
                               std::uint64_t *dust_clamps = nullptr) {
    const std::size_t block = std::max<std::size_t>(1, opts.block_paths);
    const std::size_t n_blocks = static_cast<std::size_t>((n_paths + block - 1) / block);
    std::vector<State> states;
    states.reserve(n_blocks);
    for (std::size_t b = 0; b < n_blocks; ++b) states.push_back(make_state());
    std::vector<std::uint64_t> clamps(n_blocks, 0);
    parallel_for(n_blocks, opts.threads, [&](std::size_t b) {
        std::vector<double> buf(static_cast<std::size_t>(gen.grid().n_points()));
        StepDiagnostics diag;
        const std::uint64_t first = b * block;
        const std::uint64_t last = std::min<std::uint64_t>(n_paths, first + block);
        for (std::uint64_t k = first; k < last; ++k) {
            gen.generate(k, buf, diag);
            visit(states[b], k, std::span<const double>(buf));
        }
        clamps[b] = diag.dust_clamps;
    });
    if (dust_clamps) {
        *dust_clamps = 0;
        for (auto c : clamps) *dust_clamps += c;
    }
    return states;
}

} // namespace cirb
