#include "cirbridge/convergence.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "cirbridge/io.hpp"
#include "cirbridge/moments.hpp"

namespace cirb {

ConvergenceCell convergence_errors(const BridgeParamsd &p, const EnsembleMoments &m) {
    ConvergenceCell c;
    c.n_paths = m.n_paths;
    c.n_steps = static_cast<std::int64_t>(m.mean.size()) - 1;
    CompensatedSum sm, ss;
    c.max_err_mean = 0.0;
    c.max_err_std = 0.0;
    for (Eigen::Index i = 0; i < m.mean.size(); ++i) {
        const double t = m.time[static_cast<std::size_t>(i)];
        const double em = std::abs(m.mean(i) - mean_closed(p, t));
        const double es = std::abs(m.std_dev(i) - std::sqrt(variance_closed(p, t)));
        c.max_err_mean = std::max(c.max_err_mean, em);
        c.max_err_std = std::max(c.max_err_std, es);
        sm.add(em);
        ss.add(es);
    }
    const auto n = static_cast<double>(m.mean.size());
    c.avg_err_mean = sm.value() / n;
    c.avg_err_std = ss.value() / n;
    c.terminal_err = std::abs(m.mean(m.mean.size() - 1));
    return c;
}

std::vector<ConvergenceCell> run_convergence(const BridgeParamsd &p, const ConvergencePlan &plan,
                                             std::uint64_t seed, const SimOptions &opts) {
    std::vector<ConvergenceCell> rows;
    double seconds = 0.0, work = 0.0;
    for (auto steps : plan.steps) {
        for (auto paths : plan.paths) {
            const double cost = double(paths) * double(steps);
            const bool largest = paths >= 1000000 && steps >= 10000;
            const bool over_budget = work > 0.0 && seconds / work * cost > plan.budget_seconds;
            if ((largest && !plan.include_largest) || over_budget) {
                ConvergenceCell c;
                c.n_paths = paths;
                c.n_steps = steps;
                c.skipped = true;
                rows.push_back(c);
                continue;
            }
            const auto t0 = std::chrono::steady_clock::now();
            const auto m = ensemble_moments(PathGenerator::bridge(p, TimeGrid(steps), seed), paths, opts);
            seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            work += cost;
            rows.push_back(convergence_errors(p, m));
        }
    }
    return rows;
}

void write_convergence(std::ostream &out, const std::vector<ConvergenceCell> &rows) {
    write_csv_row(out, {"n_paths", "n_steps", "status", "max_err_mean", "avg_err_mean",
                        "max_err_std", "avg_err_std", "terminal_err"});
    for (const auto &c : rows)
        write_csv_row(out, {std::to_string(c.n_paths), std::to_string(c.n_steps),
                            c.skipped ? "skipped" : "ok", format_number(c.max_err_mean),
                            format_number(c.avg_err_mean), format_number(c.max_err_std),
                            format_number(c.avg_err_std), format_number(c.terminal_err)});
}

} // namespace cirb
