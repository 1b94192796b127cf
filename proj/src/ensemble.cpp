#include "cirbridge/ensemble.hpp"

#include <cstdlib>
#include <sstream>
#include <string>

namespace cirb {

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char *env = std::getenv("CIRB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

PathGenerator PathGenerator::bridge(const BridgeParamsd &p, const TimeGrid &grid,
                                    std::uint64_t master_seed) {
    p.validate();
    if (std::abs(grid.horizon() - 1.0) > 1e-15)
        throw DomainError("bridge paths live on a grid with horizon 1");
    std::vector<StepKernel> kernels;
    kernels.reserve(static_cast<std::size_t>(grid.n_steps()));
    for (std::int64_t i = 0; i < grid.n_steps(); ++i)
        kernels.push_back(bridge_step_kernel(p, grid.time(i), grid.dt()));
    return PathGenerator(grid, 0.0, std::move(kernels), master_seed);
}

PathGenerator PathGenerator::cir(const CirParamsd &p, const TimeGrid &grid,
                                 std::uint64_t master_seed) {
    p.validate();
    std::vector<StepKernel> kernels(static_cast<std::size_t>(grid.n_steps()),
                                    cir_step_kernel(p, grid.dt()));
    return PathGenerator(grid, p.x0, std::move(kernels), master_seed);
}

void PathGenerator::generate(std::uint64_t index, std::span<double> out,
                             StepDiagnostics &diag) const {
    if (out.size() != kernels_.size() + 1)
        throw DomainError("path buffer does not match the time grid");
    PathRng rng(seed_, index);
    double x = x0_;
    out[0] = x;
    for (std::size_t i = 0; i < kernels_.size(); ++i) {
        try {
            x = kernels_[i].advance(x, rng, diag);
        } catch (const NumericError &e) {
            std::ostringstream os;
            os << "path " << index << ", step " << i << ": " << e.what();
            throw NumericError(os.str());
        }
        out[i + 1] = x;
    }
}

PathEnsemble simulate(const PathGenerator &gen, std::uint64_t n_paths, const SimOptions &opts) {
    if (n_paths == 0) throw DomainError("number of paths must be positive");
    PathEnsemble ens{gen.grid(), StateMatrix(static_cast<Eigen::Index>(n_paths),
                                             gen.grid().n_points()),
                     gen.master_seed()};
    const std::size_t block = std::max<std::size_t>(1, opts.block_paths);
    const std::size_t n_blocks = static_cast<std::size_t>((n_paths + block - 1) / block);
    std::vector<std::uint64_t> clamps(n_blocks, 0);
    parallel_for(n_blocks, opts.threads, [&](std::size_t b) {
        StepDiagnostics diag;
        const std::uint64_t first = b * block;
        const std::uint64_t last = std::min<std::uint64_t>(n_paths, first + block);
        const auto cols = static_cast<std::size_t>(ens.states.cols());
        for (std::uint64_t k = first; k < last; ++k)
            gen.generate(k, std::span<double>(ens.states.data() + k * cols, cols), diag);
        clamps[b] = diag.dust_clamps;
    });
    for (auto c : clamps) ens.dust_clamps += c;
    return ens;
}

namespace {

/// Welford accumulators per time index, merged pairwise in block order.
struct MomentBlock {
    std::uint64_t n = 0;
    std::vector<double> mean;
    std::vector<double> m2;

    explicit MomentBlock(std::size_t points) : mean(points, 0.0), m2(points, 0.0) {}

    void add(std::span<const double> path) {
        ++n;
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < path.size(); ++i) {
            const double d = path[i] - mean[i];
            mean[i] += d * inv;
            m2[i] += d * (path[i] - mean[i]);
        }
    }

    void merge(const MomentBlock &o) {
        if (o.n == 0) return;
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double nt = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = o.mean[i] - mean[i];
            mean[i] += d * nb / nt;
            m2[i] += o.m2[i] + d * d * na * nb / nt;
        }
        n += o.n;
    }
};

EnsembleMoments finish(const TimeGrid &grid, const MomentBlock &total, std::uint64_t clamps) {
    EnsembleMoments out;
    const auto points = static_cast<Eigen::Index>(total.mean.size());
    out.time.resize(total.mean.size());
    out.mean.resize(points);
    out.std_dev.resize(points);
    for (Eigen::Index i = 0; i < points; ++i) {
        out.time[static_cast<std::size_t>(i)] = grid.time(i);
        out.mean(i) = total.mean[static_cast<std::size_t>(i)];
        const double var = total.n > 1
                               ? total.m2[static_cast<std::size_t>(i)] /
                                     static_cast<double>(total.n - 1)
                               : 0.0;
        out.std_dev(i) = std::sqrt(std::max(var, 0.0));
    }
    out.n_paths = total.n;
    out.dust_clamps = clamps;
    return out;
}

} // namespace

EnsembleMoments ensemble_moments(const PathGenerator &gen, std::uint64_t n_paths,
                                 const SimOptions &opts) {
    if (n_paths == 0) throw DomainError("number of paths must be positive");
    const auto points = static_cast<std::size_t>(gen.grid().n_points());
    std::uint64_t clamps = 0;
    auto blocks = visit_paths<MomentBlock>(
        gen, n_paths, opts, [&] { return MomentBlock(points); },
        [](MomentBlock &s, std::uint64_t, std::span<const double> path) { s.add(path); },
        &clamps);
    MomentBlock total(points);
    for (const auto &b : blocks) total.merge(b);
    return finish(gen.grid(), total, clamps);
}

EnsembleMoments ensemble_moments(const PathEnsemble &ens) {
    const auto points = static_cast<std::size_t>(ens.states.cols());
    MomentBlock total(points);
    for (Eigen::Index k = 0; k < ens.n_paths(); ++k) total.add(ens.path(k));
    return finish(ens.grid, total, ens.dust_clamps);
}

} // namespace cirb
