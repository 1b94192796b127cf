#include "cirbridge/synth.hpp"

#include <cmath>
#include <random>

#include "cirbridge/ensemble.hpp"
#include "cirbridge/error.hpp"
#include "cirbridge/io.hpp"
#include "cirbridge/rng.hpp"

namespace cirb {

namespace {

// lanes of the per-day random streams
constexpr std::uint64_t kLaneAllocation = 1;
constexpr std::uint64_t kLaneTotals = 2;

} // namespace

std::vector<DaySpec> default_calendar(int n_days, std::chrono::year_month_day first,
                                      std::uint64_t seed) {
    if (n_days <= 0) throw DomainError("number of days must be positive");
    if (!first.ok()) throw DomainError("invalid first calendar date");
    std::vector<DaySpec> out;
    const std::chrono::sys_days d0(first);
    for (int k = 0; k < n_days; ++k) {
        const double f = n_days > 1 ? double(k) / (n_days - 1) : 0.0;
        PathRng rng(seed, static_cast<std::uint64_t>(k), kLaneTotals);
        const double total = 500.0 * std::pow(100.0, rng.uniform());
        out.push_back({format_date(std::chrono::year_month_day(d0 + std::chrono::days(k))),
                       static_cast<int>(std::lround(330.0 - 30.0 * f)),
                       static_cast<int>(std::lround(1110.0 + 30.0 * f)),
                       static_cast<std::int64_t>(std::lround(total))});
    }
    return out;
}

std::vector<DayRecord> synthesize_days(const BridgeParamsd &p, const std::vector<DaySpec> &specs,
                                       std::uint64_t seed, const SynthOptions &opts) {
    const TimeGrid grid(opts.n_steps);
    const auto gen = PathGenerator::bridge(p, grid, seed);
    std::vector<double> path(static_cast<std::size_t>(grid.n_points()));
    StepDiagnostics diag;

    std::vector<DayRecord> out;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        const auto &sp = specs[k];
        if (sp.t_set <= sp.t_rise) throw DomainError("day " + sp.date + ": sunset before sunrise");
        if (sp.total < 0) throw DomainError("day " + sp.date + ": negative total");
        DayRecord d{sp.date, double(sp.t_rise), double(sp.t_set), {}, sp.total};
        const double T = d.length();
        const double dT = opts.dT_minutes;

        gen.generate(k, path, diag);
        std::vector<double> w;
        for (double start = std::ceil(d.t_rise / dT) * dT; start + dT <= d.t_set; start += dT) {
            d.counts.push_back({static_cast<int>(start), 0});
            const double x = (start + 0.5 * dT - d.t_rise) / T * double(grid.n_steps());
            const auto i = std::min<std::int64_t>(static_cast<std::int64_t>(x), grid.n_steps() - 1);
            const double frac = x - double(i);
            w.push_back((1.0 - frac) * path[std::size_t(i)] + frac * path[std::size_t(i + 1)]);
        }
        if (w.empty()) throw DomainError("day " + sp.date + " is shorter than one interval");

        // sequential binomials against suffix sums of the weights
        std::vector<double> suffix(w.size() + 1, 0.0);
        for (std::size_t j = w.size(); j-- > 0;) suffix[j] = suffix[j + 1] + w[j];
        if (!(suffix[0] > 0.0)) {
            std::fill(w.begin(), w.end(), 1.0);
            for (std::size_t j = w.size(); j-- > 0;) suffix[j] = suffix[j + 1] + 1.0;
        }
        PathRng rng(seed, k, kLaneAllocation);
        std::int64_t left = sp.total;
        for (std::size_t j = 0; j < w.size() && left > 0; ++j) {
            const double q = suffix[j] > 0.0 ? std::min(1.0, w[j] / suffix[j]) : 1.0;
            std::int64_t c = left;
            if (q < 1.0) {
                std::binomial_distribution<std::int64_t> bin(left, q);
                c = bin(rng.engine());
            }
            d.counts[j].count = c;
            left -= c;
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<DaySpec> read_calendar(std::istream &in, const std::string &source) {
    CsvReader r(in, source);
    r.expect_header({"date", "sunrise", "sunset", "total"});
    std::vector<DaySpec> out;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != 4) r.fail("expected 4 fields");
        DaySpec d;
        try {
            d.date = format_date(parse_date(f[0]));
            d.t_rise = parse_clock(f[1]);
            d.t_set = parse_clock(f[2]);
        } catch (const DataError &e) {
            r.fail(e.what());
        }
        if (d.t_set <= d.t_rise) r.fail("sunset must be later than sunrise");
        try {
            std::size_t used = 0;
            d.total = std::stoll(f[3], &used);
            if (used != f[3].size() || d.total < 0) throw std::invalid_argument("total");
        } catch (const std::exception &) {
            r.fail("total must be a nonnegative integer");
        }
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace cirb
