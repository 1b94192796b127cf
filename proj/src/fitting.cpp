#include "cirbridge/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cirbridge/error.hpp"
#include "cirbridge/moments.hpp"
#include "cirbridge/nelder_mead.hpp"

namespace cirb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_total(const DayRecord &d) {
    if (d.total <= 0) throw DataError("day " + d.date + " has a zero daily total");
    if (!(d.t_set > d.t_rise)) throw DataError("day " + d.date + " has sunset before sunrise");
}

// bins that carry a mean (and, for the variance fit, a variance)
std::vector<Eigen::Index> usable_bins(const EmpiricalMoments &emp, bool need_variance) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index j = 0; j < emp.n_bins(); ++j) {
        const double v = need_variance ? emp.variance(j) : emp.mean(j);
        if (std::isfinite(v)) out.push_back(j);
    }
    return out;
}

} // namespace

NormalizedDay normalize_day(const DayRecord &d, double dT_minutes) {
    require_total(d);
    NormalizedDay out;
    const double T = d.length();
    const double inv_total = 1.0 / static_cast<double>(d.total);
    for (const auto &c : d.counts) {
        const double s = (static_cast<double>(c.start) + 0.5 * dT_minutes - d.t_rise) / T;
        if (s < 0.0 || s > 1.0) {
            ++out.dropped;
            continue;
        }
        out.s.push_back(s);
        out.y.push_back(static_cast<double>(c.count) * inv_total);
    }
    return out;
}

EmpiricalMoments empirical_moments(const std::vector<DayRecord> &days, int n_bins) {
    if (n_bins <= 0) throw DomainError("number of bins must be positive");
    const auto nb = static_cast<std::size_t>(n_bins);
    std::vector<std::int64_t> n(nb, 0);
    std::vector<double> mean(nb, 0.0), m2(nb, 0.0);

    EmpiricalMoments emp;
    for (const auto &d : days) {
        if (d.total <= 0) {
            emp.skipped_days.push_back(d.date);
            continue;
        }
        const auto nd = normalize_day(d);
        emp.dropped_intervals += nd.dropped;
        for (std::size_t i = 0; i < nd.s.size(); ++i) {
            const auto j = std::min(nb - 1, static_cast<std::size_t>(nd.s[i] * n_bins));
            ++n[j];
            const double delta = nd.y[i] - mean[j];
            mean[j] += delta / static_cast<double>(n[j]);
            m2[j] += delta * (nd.y[i] - mean[j]);
        }
        ++emp.n_days;
    }
    if (emp.n_days < 2) {
        std::ostringstream os;
        os << "insufficient data: " << emp.n_days
           << " day(s) with a positive total, at least 2 are needed";
        throw DataError(os.str());
    }

    emp.bin_centers.resize(n_bins);
    emp.mean.resize(n_bins);
    emp.variance.resize(n_bins);
    emp.cv.resize(n_bins);
    emp.n_samples = n;
    for (int j = 0; j < n_bins; ++j) {
        const auto k = static_cast<std::size_t>(j);
        emp.bin_centers(j) = (j + 0.5) / n_bins;
        emp.mean(j) = n[k] > 0 ? mean[k] : kNaN;
        emp.variance(j) = n[k] > 1 ? m2[k] / static_cast<double>(n[k] - 1) : kNaN;
        emp.cv(j) = std::isfinite(emp.variance(j)) && mean[k] > 0.0
                        ? std::sqrt(emp.variance(j)) / mean[k]
                        : kNaN;
    }
    return emp;
}

MeanFit fit_mean(const EmpiricalMoments &emp, HFamily family) {
    const auto bins = usable_bins(emp, false);
    if (bins.empty()) throw DataError("no bin carries an empirical mean");

    MeanFit res{};
    bool all_zero = true;
    for (auto j : bins) all_zero = all_zero && emp.mean(j) == 0.0;
    if (all_zero) {
        res.a = 0.0;
        res.shape = kNaN;
        res.shape_identified = false;
        res.rmse_mean = 0.0;
        return res;
    }

    auto sse = [&](double a, double shape) {
        if (!std::isfinite(a) || !std::isfinite(shape) || shape <= 0.0)
            return std::numeric_limits<double>::infinity();
        const BridgeParamsd p(a, 0.0, HModeld::make(family, shape));
        double acc = 0.0;
        for (auto j : bins) {
            const double r = emp.mean(j) - mean_closed(p, emp.bin_centers(j));
            acc += r * r;
        }
        return acc;
    };

    // coarse log grid, then simplex refinement in log coordinates
    constexpr int kGrid = 60;
    const double la0 = std::log(1e-4), la1 = std::log(1.0);
    const double ls0 = std::log(1e-3), ls1 = std::log(10.0);
    const double da = (la1 - la0) / (kGrid - 1), ds = (ls1 - ls0) / (kGrid - 1);
    double best = std::numeric_limits<double>::infinity();
    Eigen::Vector2d start(la0, ls0);
    for (int i = 0; i < kGrid; ++i) {
        for (int k = 0; k < kGrid; ++k) {
            const double la = la0 + i * da, ls = ls0 + k * ds;
            const double v = sse(std::exp(la), std::exp(ls));
            if (v < best) {
                best = v;
                start = {la, ls};
            }
        }
    }
    auto objective = [&](const Eigen::Vector2d &x) { return sse(std::exp(x(0)), std::exp(x(1))); };
    NelderMeadOptions<double> opts;
    opts.diameter_tol = 1e-10;
    const auto nm = nelder_mead(objective, start, Eigen::Vector2d(da, ds), opts);

    res.a = std::exp(nm.x(0));
    res.shape = std::exp(nm.x(1));
    res.rmse_mean = std::sqrt(nm.value / static_cast<double>(bins.size()));
    res.converged = nm.converged;
    res.evaluations = nm.evaluations + kGrid * kGrid;
    return res;
}

SigmaFit fit_sigma(const EmpiricalMoments &emp, double a, const HModeld &h) {
    const auto bins = usable_bins(emp, true);
    const BridgeParamsd unit(a, 1.0, h);
    std::vector<double> g(bins.size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        g[k] = variance_closed(unit, emp.bin_centers(bins[k]));
        num += emp.variance(bins[k]) * g[k];
        den += g[k] * g[k];
    }
    if (!(den > 0.0))
        throw NumericError("sigma is unidentifiable: the model variance vanishes on every bin");
    const double s2 = std::max(num / den, 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < bins.size(); ++k) {
        const double r = std::sqrt(s2 * g[k]) - std::sqrt(emp.variance(bins[k]));
        acc += r * r;
    }
    return {std::sqrt(s2), std::sqrt(acc / static_cast<double>(bins.size()))};
}

FitResult fit(const EmpiricalMoments &emp, HFamily family) {
    const auto m = fit_mean(emp, family);
    if (!m.shape_identified)
        throw NumericError("all empirical means are zero: a = 0 and the h shape is unidentifiable");
    const auto h = HModeld::make(family, m.shape);
    const auto s = fit_sigma(emp, m.a, h);
    const BridgeParamsd p(m.a, s.sigma, h);
    return FitResult{p,
                     model_id(family),
                     m.rmse_mean,
                     s.rmse_std,
                     emp.n_days,
                     static_cast<int>(emp.n_bins()),
                     is_high_volatility(p),
                     m.converged,
                     m.evaluations};
}

FitResult fit(const std::vector<DayRecord> &days, HFamily family, int n_bins) {
    return fit(empirical_moments(days, n_bins), family);
}

DayParams denormalize(const BridgeParamsd &p, const DayRecord &d, double dT_minutes) {
    require_total(d);
    const double S = static_cast<double>(d.total);
    const double T = d.length();
    return {S * p.a / (T * dT_minutes), std::sqrt(S / dT_minutes) * p.sigma, 1.0 / T};
}

} // namespace cirb
