#include "cirbridge/bursts.hpp"

#include <algorithm>
#include <sstream>

namespace cirb {

void BurstConfig::validate() const {
    if (!(x_threshold > 0.0)) throw DomainError("burst height threshold must be positive");
    if (!(dt > 0.0)) throw DomainError("burst grid step must be positive");
    if (!(t_threshold >= 2.0 * dt) || !(t_threshold < 1.0)) {
        std::ostringstream os;
        os << "burst duration threshold must lie in [2 dt, 1), got " << t_threshold
           << " with dt = " << dt;
        throw DomainError(os.str());
    }
}

std::vector<BurstEvent> detect_bursts(std::span<const double> path, const BurstConfig &cfg) {
    cfg.validate();
    std::vector<BurstEvent> out;
    for_each_burst(path, cfg.x_threshold, cfg.min_steps(), [&](std::int64_t i, std::int64_t j) {
        const double s0 = static_cast<double>(i) * cfg.dt;
        const double s1 = static_cast<double>(j) * cfg.dt;
        out.push_back({s0, s1, static_cast<double>(j - i) * cfg.dt});
    });
    return out;
}

void BurstTally::add_path(std::int64_t n_events) {
    const auto k = static_cast<std::size_t>(n_events);
    if (per_path.size() <= k) per_path.resize(k + 1, 0);
    ++per_path[k];
    ++paths;
}

void BurstTally::add_event(std::int64_t steps) {
    const auto k = static_cast<std::size_t>(steps);
    if (by_steps.size() <= k) by_steps.resize(k + 1, 0);
    ++by_steps[k];
}

void BurstTally::merge(const BurstTally &o) {
    paths += o.paths;
    if (per_path.size() < o.per_path.size()) per_path.resize(o.per_path.size(), 0);
    for (std::size_t k = 0; k < o.per_path.size(); ++k) per_path[k] += o.per_path[k];
    if (by_steps.size() < o.by_steps.size()) by_steps.resize(o.by_steps.size(), 0);
    for (std::size_t k = 0; k < o.by_steps.size(); ++k) by_steps[k] += o.by_steps[k];
}

namespace {

// moments of the sample in which value(k) occurs weight[k] times
template <typename Value>
SampleSummary summarize_weighted(const std::vector<std::int64_t> &weight, Value &&value) {
    SampleSummary s;
    double total = 0.0, sum = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
        if (weight[k] == 0) continue;
        const double v = value(k);
        if (s.n == 0) s.minimum = v;
        s.maximum = v;
        s.n += weight[k];
        total += static_cast<double>(weight[k]);
        sum += static_cast<double>(weight[k]) * v;
    }
    if (s.n == 0) return s;
    s.average = sum / total;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t k = 0; k < weight.size(); ++k) {
        if (weight[k] == 0) continue;
        const double d = value(k) - s.average;
        const double w = static_cast<double>(weight[k]);
        m2 += w * d * d;
        m3 += w * d * d * d;
        m4 += w * d * d * d * d;
    }
    m2 /= total;
    m3 /= total;
    m4 /= total;
    s.variance = s.n > 1 ? m2 * total / (total - 1.0) : 0.0;
    s.std_dev = std::sqrt(s.variance);
    if (m2 > 0.0) {
        s.skewness = m3 / (m2 * std::sqrt(m2));
        s.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    s.cv = s.average > 0.0 ? s.std_dev / s.average : NAN;
    return s;
}

void check_grid(const TimeGrid &grid, const BurstConfig &cfg) {
    cfg.validate();
    if (std::abs(grid.dt() - cfg.dt) > 1e-12 * cfg.dt) {
        std::ostringstream os;
        os << "burst config dt = " << cfg.dt << " does not match the ensemble grid dt = "
           << grid.dt();
        throw DomainError(os.str());
    }
}

void tally_path(BurstTally &t, std::span<const double> path, const BurstConfig &cfg) {
    std::int64_t n = 0;
    for_each_burst(path, cfg.x_threshold, cfg.min_steps(), [&](std::int64_t i, std::int64_t j) {
        ++n;
        t.add_event(j - i);
    });
    t.add_path(n);
}

} // namespace

BurstStats summarize(const BurstTally &tally, const BurstConfig &cfg, int hist_bins) {
    if (hist_bins <= 0) throw DomainError("histogram needs a positive number of bins");
    BurstStats out;
    out.config = cfg;
    out.n_paths = tally.paths;
    out.counts = summarize_weighted(tally.per_path, [](std::size_t k) { return double(k); });
    out.durations = summarize_weighted(tally.by_steps, [&](std::size_t k) {
        return static_cast<double>(k) * cfg.dt;
    });
    out.n_events = out.durations.n;

    if (tally.paths > 0) {
        out.count_pd.resize(tally.per_path.size());
        for (std::size_t k = 0; k < tally.per_path.size(); ++k)
            out.count_pd[k] = static_cast<double>(tally.per_path[k]) / double(tally.paths);
    }

    if (out.durations.defined()) {
        const double lo = cfg.t_threshold;
        double hi = out.durations.maximum;
        if (!(hi > lo)) hi = lo + cfg.dt;
        const double width = (hi - lo) / hist_bins;
        std::vector<std::int64_t> bins(static_cast<std::size_t>(hist_bins), 0);
        for (std::size_t k = 0; k < tally.by_steps.size(); ++k) {
            if (tally.by_steps[k] == 0) continue;
            const double d = static_cast<double>(k) * cfg.dt;
            auto j = static_cast<std::int64_t>(std::floor((d - lo) / width));
            j = std::clamp<std::int64_t>(j, 0, hist_bins - 1);
            bins[static_cast<std::size_t>(j)] += tally.by_steps[k];
        }
        const double n = static_cast<double>(out.n_events);
        for (int j = 0; j < hist_bins; ++j)
            out.duration_hist.push_back({lo + j * width, lo + (j + 1) * width,
                                         static_cast<double>(bins[std::size_t(j)]) / (n * width)});
    }
    return out;
}

BurstStats burst_statistics(const PathEnsemble &ens, const BurstConfig &cfg, int hist_bins) {
    check_grid(ens.grid, cfg);
    BurstTally t;
    for (Eigen::Index k = 0; k < ens.n_paths(); ++k) tally_path(t, ens.path(k), cfg);
    return summarize(t, cfg, hist_bins);
}

BurstStats burst_statistics(const PathGenerator &gen, std::uint64_t n_paths, const BurstConfig &cfg,
                            const SimOptions &opts, int hist_bins) {
    return burst_scenarios(gen, n_paths, cfg, {BurstScenario::Base}, opts, hist_bins).front();
}

std::string scenario_name(BurstScenario s) {
    switch (s) {
    case BurstScenario::Base: return "base";
    case BurstScenario::DoubleT: return "double_T";
    case BurstScenario::DoubleX: return "double_X";
    }
    return "base";
}

BurstScenario scenario_from_name(const std::string &name) {
    if (name == "base") return BurstScenario::Base;
    if (name == "double_T") return BurstScenario::DoubleT;
    if (name == "double_X") return BurstScenario::DoubleX;
    throw DomainError("unknown burst scenario '" + name + "' (base, double_T, double_X)");
}

BurstConfig scenario_config(const BurstConfig &base, BurstScenario s) {
    BurstConfig c = base;
    if (s == BurstScenario::DoubleT) c.t_threshold *= 2.0;
    if (s == BurstScenario::DoubleX) c.x_threshold *= 2.0;
    return c;
}

std::vector<BurstStats> burst_scenarios(const PathGenerator &gen, std::uint64_t n_paths,
                                        const BurstConfig &base,
                                        const std::vector<BurstScenario> &scenarios,
                                        const SimOptions &opts, int hist_bins) {
    if (n_paths == 0) throw DomainError("number of paths must be positive");
    std::vector<BurstConfig> cfgs;
    for (auto s : scenarios) {
        cfgs.push_back(scenario_config(base, s));
        check_grid(gen.grid(), cfgs.back());
    }
    using Tallies = std::vector<BurstTally>;
    auto blocks = visit_paths<Tallies>(
        gen, n_paths, opts, [&] { return Tallies(cfgs.size()); },
        [&](Tallies &t, std::uint64_t, std::span<const double> path) {
            for (std::size_t c = 0; c < cfgs.size(); ++c) tally_path(t[c], path, cfgs[c]);
        });
    Tallies total(cfgs.size());
    for (const auto &b : blocks)
        for (std::size_t c = 0; c < cfgs.size(); ++c) total[c].merge(b[c]);
    std::vector<BurstStats> out;
    for (std::size_t c = 0; c < cfgs.size(); ++c) out.push_back(summarize(total[c], cfgs[c], hist_bins));
    return out;
}

} // namespace cirb
