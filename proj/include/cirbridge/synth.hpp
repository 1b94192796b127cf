// Synthetic per-day count tables drawn from a known bridge, for checking that
// the fitting pipeline recovers its parameters.
#pragma once

#include <chrono>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "cirbridge/bridge.hpp"
#include "cirbridge/fitting.hpp"

namespace cirb {

struct DaySpec {
    std::string date;
    /// minutes after midnight
    int t_rise;
    int t_set;
    std::int64_t total;
};

/// n_days consecutive days from `first`: sunrise drifting from 05:30 to 05:00,
/// sunset from 18:30 to 19:00, totals log-uniform in [500, 50000].
std::vector<DaySpec> default_calendar(int n_days, std::chrono::year_month_day first,
                                      std::uint64_t seed);

struct SynthOptions {
    std::int64_t n_steps = 1000;
    double dT_minutes = kIntervalMinutes;
};

/// One bridge path per day (path index = day index), read off at the
/// midpoints of the clock-aligned intervals inside [sunrise, sunset], then
/// S_k allocated over the intervals multinomially with weights proportional
/// to the path. Days with S_k = 0 get all-zero counts.
std::vector<DayRecord> synthesize_days(const BridgeParamsd &p, const std::vector<DaySpec> &specs,
                                       std::uint64_t seed, const SynthOptions &opts = {});

/// Reads `date,sunrise,sunset,total`.
std::vector<DaySpec> read_calendar(std::istream &in, const std::string &source = "calendar");

} // namespace cirb
