#include "cirbridge/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "cirbridge/error.hpp"

namespace cirb {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <typename Int> bool parse_int(std::string_view s, Int &out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double &out) {
    s = trim(s);
    if (s.empty()) return false;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

} // namespace

int parse_clock(std::string_view s) {
    s = trim(s);
    const auto colon = s.find(':');
    int h = 0, m = 0;
    if (colon == std::string_view::npos || !parse_int(s.substr(0, colon), h) ||
        !parse_int(s.substr(colon + 1), m) || colon != 2 || s.size() != 5 || h < 0 || h > 23 ||
        m < 0 || m > 59)
        throw DataError("invalid clock time '" + std::string(s) + "', expected HH:MM");
    return h * 60 + m;
}

std::string format_clock(int minutes) {
    if (minutes < 0 || minutes >= 24 * 60)
        throw DomainError("clock time out of range: " + std::to_string(minutes) + " min");
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
    return buf;
}

std::chrono::year_month_day parse_date(std::string_view s) {
    s = trim(s);
    int y = 0;
    unsigned m = 0, d = 0;
    const bool shape = s.size() == 10 && s[4] == '-' && s[7] == '-';
    if (!shape || !parse_int(s.substr(0, 4), y) || !parse_int(s.substr(5, 2), m) ||
        !parse_int(s.substr(8, 2), d))
        throw DataError("invalid date '" + std::string(s) + "', expected YYYY-MM-DD");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(s) + "'");
    return ymd;
}

std::string format_date(std::chrono::year_month_day d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

CsvReader::CsvReader(std::istream &in, std::string source) : in_(in), source_(std::move(source)) {
    if (!next(header_)) throw DataError(source_ + ": empty file, a header row is required");
}

void CsvReader::expect_header(const std::vector<std::string> &expected) const {
    if (header_ == expected) return;
    std::ostringstream os;
    os << "header must be '";
    for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? "," : "") << expected[i];
    os << "'";
    fail(os.str());
}

bool CsvReader::next(std::vector<std::string> &fields) {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        if (trim(raw).empty()) continue;
        fields.clear();
        std::string_view rest(raw);
        while (true) {
            const auto comma = rest.find(',');
            fields.emplace_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        return true;
    }
    if (in_.bad()) throw IoError(source_ + ": read error");
    return false;
}

void CsvReader::fail(const std::string &msg) const {
    throw DataError(source_ + ":" + std::to_string(line_) + ": " + msg);
}

void write_csv_row(std::ostream &out, const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

std::ifstream open_input(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

DayTables read_days(std::istream &counts, std::istream &sun, std::istream *totals,
                    const std::string &counts_name, const std::string &sun_name,
                    const std::string &totals_name) {
    using Key = std::chrono::sys_days;
    std::vector<std::string> f;

    std::map<Key, DayRecord> days;
    CsvReader sr(sun, sun_name);
    sr.expect_header({"date", "sunrise", "sunset"});
    while (sr.next(f)) {
        if (f.size() != 3) sr.fail("expected 3 fields");
        DayRecord d;
        Key key;
        try {
            key = Key(parse_date(f[0]));
            d.t_rise = parse_clock(f[1]);
            d.t_set = parse_clock(f[2]);
        } catch (const DataError &e) {
            sr.fail(e.what());
        }
        if (!(d.t_set > d.t_rise)) sr.fail("sunset must be later than sunrise");
        d.date = format_date(std::chrono::year_month_day(key));
        if (!days.emplace(key, std::move(d)).second) sr.fail("duplicate date " + f[0]);
    }

    CsvReader cr(counts, counts_name);
    cr.expect_header({"date", "interval_start", "count"});
    std::map<Key, bool> has_counts;
    while (cr.next(f)) {
        if (f.size() != 3) cr.fail("expected 3 fields");
        Key key;
        int start = 0;
        try {
            key = Key(parse_date(f[0]));
            start = parse_clock(f[1]);
        } catch (const DataError &e) {
            cr.fail(e.what());
        }
        std::int64_t c = 0;
        if (!parse_int(f[2], c) || c < 0) cr.fail("count must be a nonnegative integer");
        auto it = days.find(key);
        if (it == days.end()) cr.fail("date " + f[0] + " is missing from the sun table");
        it->second.counts.push_back({start, c});
        it->second.total += c;
        has_counts[key] = true;
    }

    for (auto &[key, d] : days) {
        auto &c = d.counts;
        std::stable_sort(c.begin(), c.end(),
                         [](const IntervalCount &l, const IntervalCount &r) { return l.start < r.start; });
        for (std::size_t i = 1; i < c.size(); ++i)
            if (c[i].start - c[i - 1].start < static_cast<int>(kIntervalMinutes))
                throw DataError(counts_name + ": intervals of " + d.date + " at " +
                                format_clock(c[i - 1].start) + " and " + format_clock(c[i].start) +
                                " overlap");
    }

    if (totals) {
        CsvReader tr(*totals, totals_name);
        tr.expect_header({"date", "total"});
        while (tr.next(f)) {
            if (f.size() != 2) tr.fail("expected 2 fields");
            Key key;
            try {
                key = Key(parse_date(f[0]));
            } catch (const DataError &e) {
                tr.fail(e.what());
            }
            std::int64_t total = 0;
            if (!parse_int(f[1], total) || total < 0) tr.fail("total must be a nonnegative integer");
            auto it = days.find(key);
            if (it == days.end()) tr.fail("date " + f[0] + " is missing from the sun table");
            if (has_counts.count(key) && it->second.total != total)
                tr.fail("total " + std::to_string(total) + " of " + f[0] +
                        " differs from the sum of its counts (" +
                        std::to_string(it->second.total) + ")");
            it->second.total = total;
        }
    }

    DayTables out;
    for (auto &[key, d] : days) {
        if (d.total == 0) out.zero_total.push_back(d.date);
        out.days.push_back(std::move(d));
    }
    return out;
}

DayTables read_days(const std::string &counts_path, const std::string &sun_path,
                    const std::optional<std::string> &totals_path) {
    auto counts = open_input(counts_path);
    auto sun = open_input(sun_path);
    if (!totals_path) return read_days(counts, sun, nullptr, counts_path, sun_path);
    auto totals = open_input(*totals_path);
    return read_days(counts, sun, &totals, counts_path, sun_path, *totals_path);
}

void write_counts(std::ostream &out, const std::vector<DayRecord> &days) {
    write_csv_row(out, {"date", "interval_start", "count"});
    for (const auto &d : days)
        for (const auto &c : d.counts)
            write_csv_row(out, {d.date, format_clock(c.start), std::to_string(c.count)});
}

void write_sun(std::ostream &out, const std::vector<DayRecord> &days) {
    write_csv_row(out, {"date", "sunrise", "sunset"});
    for (const auto &d : days)
        write_csv_row(out, {d.date, format_clock(static_cast<int>(d.t_rise)),
                            format_clock(static_cast<int>(d.t_set))});
}

void write_totals(std::ostream &out, const std::vector<DayRecord> &days) {
    write_csv_row(out, {"date", "total"});
    for (const auto &d : days) write_csv_row(out, {d.date, std::to_string(d.total)});
}

void write_paths(std::ostream &out, const PathEnsemble &ens, int thin) {
    if (thin <= 0) throw DomainError("thinning factor must be positive");
    const auto last = ens.states.cols() - 1;
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i <= last; i += thin) cols.push_back(i);
    if (cols.back() != last) cols.push_back(last);

    std::string line = "path";
    for (auto i : cols) line += "," + format_number(ens.grid.time(i));
    out << line << '\n';
    for (Eigen::Index k = 0; k < ens.n_paths(); ++k) {
        line = std::to_string(k);
        for (auto i : cols) {
            line += ',';
            line += format_number(ens.states(k, i));
        }
        out << line << '\n';
    }
}

PathTable read_paths(std::istream &in, const std::string &source) {
    CsvReader r(in, source);
    const auto &h = r.header();
    if (h.size() < 2 || h[0] != "path") r.fail("header must be 'path,<t_0>,...'");
    PathTable t;
    for (std::size_t i = 1; i < h.size(); ++i) {
        double v = 0;
        if (!parse_double(h[i], v)) r.fail("time column '" + h[i] + "' is not a number");
        t.time.push_back(v);
    }
    std::vector<std::vector<double>> rows;
    std::vector<std::string> f;
    while (r.next(f)) {
        if (f.size() != h.size()) r.fail("row width differs from the header");
        std::vector<double> row(t.time.size());
        for (std::size_t i = 1; i < f.size(); ++i)
            if (!parse_double(f[i], row[i - 1]) || row[i - 1] < 0.0)
                r.fail("state '" + f[i] + "' is not a nonnegative number");
        rows.push_back(std::move(row));
    }
    t.states.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.time.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t i = 0; i < t.time.size(); ++i)
            t.states(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = rows[k][i];
    return t;
}

void write_summary(std::ostream &out, const EnsembleMoments &m) {
    write_csv_row(out, {"t", "mean", "std"});
    for (Eigen::Index i = 0; i < m.mean.size(); ++i)
        write_csv_row(out, {format_number(m.time[static_cast<std::size_t>(i)]),
                            format_number(m.mean(i)), format_number(m.std_dev(i))});
}

} // namespace cirb
