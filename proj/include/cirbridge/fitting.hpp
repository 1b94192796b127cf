// Per-day count data: normalization onto the unit interval, binned empirical
// moments, the two-step least-squares calibration and denormalization.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "cirbridge/bridge.hpp"

namespace cirb {

inline constexpr double kIntervalMinutes = 10.0;
inline constexpr int kDefaultBins = 72;

struct IntervalCount {
    /// minutes after local midnight
    int start;
    std::int64_t count;
};

struct DayRecord {
    std::string date;
    double t_rise;
    double t_set;
    std::vector<IntervalCount> counts;
    std::int64_t total = 0;

    double length() const { return t_set - t_rise; }
};

struct NormalizedDay {
    std::vector<double> s;
    std::vector<double> y;
    /// intervals whose midpoint falls outside [sunrise, sunset]
    std::size_t dropped = 0;
};

/// s = (interval midpoint - sunrise) / T_k, y = count / S_k.
NormalizedDay normalize_day(const DayRecord &d, double dT_minutes = kIntervalMinutes);

struct EmpiricalMoments {
    Eigen::VectorXd bin_centers;
    /// NaN where a bin holds no sample
    Eigen::VectorXd mean;
    /// NaN where a bin holds fewer than two samples
    Eigen::VectorXd variance;
    Eigen::VectorXd cv;
    std::vector<std::int64_t> n_samples;
    std::int64_t n_days = 0;
    std::vector<std::string> skipped_days;
    std::size_t dropped_intervals = 0;

    Eigen::Index n_bins() const { return bin_centers.size(); }
};

/// Pools (s, y) pairs of all days with S_k > 0 into n_bins uniform bins.
EmpiricalMoments empirical_moments(const std::vector<DayRecord> &days, int n_bins = kDefaultBins);

struct MeanFit {
    double a;
    /// c or eps; NaN when the data carry no information on it
    double shape;
    double rmse_mean;
    bool shape_identified = true;
    bool converged = true;
    int evaluations = 0;
};

MeanFit fit_mean(const EmpiricalMoments &emp, HFamily family);

struct SigmaFit {
    double sigma;
    double rmse_std;
};

/// sigma^2 by least squares through the origin on the variances.
SigmaFit fit_sigma(const EmpiricalMoments &emp, double a, const HModeld &h);

struct FitResult {
    BridgeParamsd params;
    int model_id;
    double rmse_mean;
    double rmse_std;
    std::int64_t n_days_used;
    int n_bins;
    bool high_volatility;
    bool converged;
    int evaluations;
};

FitResult fit(const EmpiricalMoments &emp, HFamily family);
FitResult fit(const std::vector<DayRecord> &days, HFamily family, int n_bins = kDefaultBins);

struct DayParams {
    /// counts per minute^2
    double a_k;
    double sigma_k;
    /// h_k(t) = h(s) * h_scale
    double h_scale;
};

DayParams denormalize(const BridgeParamsd &p, const DayRecord &d,
                      double dT_minutes = kIntervalMinutes);

} // namespace cirb
