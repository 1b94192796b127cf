// CSV/JSON plumbing: count, sun and totals tables, path and curve output.
#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cirbridge/ensemble.hpp"
#include "cirbridge/fitting.hpp"

namespace cirb {

/// Shortest round-trip decimal form; "nan" for NaN.
std::string format_number(double v);

/// "HH:MM" <-> minutes after midnight.
int parse_clock(std::string_view s);
std::string format_clock(int minutes);

/// ISO-8601 calendar date "YYYY-MM-DD".
std::chrono::year_month_day parse_date(std::string_view s);
std::string format_date(std::chrono::year_month_day d);

/// Comma-separated rows with a mandatory header; blank lines are skipped.
class CsvReader {
public:
    CsvReader(std::istream &in, std::string source);

    const std::vector<std::string> &header() const { return header_; }
    /// Throws DataError unless the header equals `expected`.
    void expect_header(const std::vector<std::string> &expected) const;
    bool next(std::vector<std::string> &fields);
    std::size_t line() const { return line_; }
    /// "source:line: msg" as a DataError
    [[noreturn]] void fail(const std::string &msg) const;

private:
    std::istream &in_;
    std::string source_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

void write_csv_row(std::ostream &out, const std::vector<std::string> &fields);

/// Opens for reading/writing or throws IoError.
std::ifstream open_input(const std::string &path);
std::ofstream open_output(const std::string &path);

struct DayTables {
    std::vector<DayRecord> days;
    /// dates whose total is zero, in calendar order
    std::vector<std::string> zero_total;
};

/// Joins the counts, sun and (optional) totals tables into one record per
/// day of the sun table, in calendar order.
DayTables read_days(std::istream &counts, std::istream &sun, std::istream *totals,
                    const std::string &counts_name = "counts", const std::string &sun_name = "sun",
                    const std::string &totals_name = "totals");
DayTables read_days(const std::string &counts_path, const std::string &sun_path,
                    const std::optional<std::string> &totals_path);

void write_counts(std::ostream &out, const std::vector<DayRecord> &days);
void write_sun(std::ostream &out, const std::vector<DayRecord> &days);
void write_totals(std::ostream &out, const std::vector<DayRecord> &days);

/// One row per path: `path,<t_0>,...,<t_N>`, keeping every `thin`-th time
/// index plus the last one.
void write_paths(std::ostream &out, const PathEnsemble &ens, int thin = 1);

struct PathTable {
    std::vector<double> time;
    StateMatrix states;
};
PathTable read_paths(std::istream &in, const std::string &source = "paths");

/// `t,mean,std`
void write_summary(std::ostream &out, const EnsembleMoments &m);

} // namespace cirb
