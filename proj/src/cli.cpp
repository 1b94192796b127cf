#include "cirbridge/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "cirbridge/bursts.hpp"
#include "cirbridge/convergence.hpp"
#include "cirbridge/error.hpp"
#include "cirbridge/fitting.hpp"
#include "cirbridge/io.hpp"
#include "cirbridge/moments.hpp"
#include "cirbridge/synth.hpp"

namespace cirb::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// JSON config files: {"simulate": {"paths": 100, ...}, "threads": 4}.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App *app, bool default_also, bool, std::string) const override {
        json j;
        for (const CLI::Option *opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
            const std::string name = opt->get_lnames()[0];
            if (opt->count() > 0) {
                const auto &res = opt->results();
                j[name] = res.size() == 1 ? json(res[0]) : json(res);
            } else if (default_also && !opt->get_default_str().empty()) {
                j[name] = opt->get_default_str();
            }
        }
        for (const CLI::App *sub : app->get_subcommands({})) {
            const auto text = to_config(sub, default_also, false, "");
            if (text != "null") j[sub->get_name()] = json::parse(text);
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception &e) {
            throw CLI::ConversionError(std::string("invalid JSON config: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("JSON config must be an object");
        return collect(j, "", {});
    }

private:
    static std::string scalar(const json &v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number()) return v.dump();
        throw CLI::ConversionError("unsupported JSON config value " + v.dump());
    }

    std::vector<CLI::ConfigItem> collect(const json &j, const std::string &name,
                                         std::vector<std::string> prefix) const {
        std::vector<CLI::ConfigItem> out;
        if (j.is_object()) {
            if (!name.empty()) prefix.push_back(name);
            for (auto it = j.begin(); it != j.end(); ++it) {
                auto sub = collect(*it, it.key(), prefix);
                out.insert(out.end(), sub.begin(), sub.end());
            }
            return out;
        }
        CLI::ConfigItem item;
        item.name = name;
        item.parents = prefix;
        if (j.is_array())
            for (const auto &v : j) item.inputs.push_back(scalar(v));
        else
            item.inputs.push_back(scalar(j));
        out.push_back(std::move(item));
        return out;
    }
};

/// Writes to a file, or to `out` when the path is "-".
void emit(const std::string &path, std::ostream &out, const std::function<void(std::ostream &)> &fn) {
    if (path == "-") {
        fn(out);
        out.flush();
        return;
    }
    auto f = open_output(path);
    fn(f);
    f.flush();
    if (!f) throw IoError("write to '" + path + "' failed");
}

struct ParamArgs {
    int model = 2;
    double a = 0.0599;
    std::optional<double> c;
    std::optional<double> eps;
    double sigma = 0.5775;

    void add_to(CLI::App *sub) {
        sub->add_option("--model", model, "Bridge family: 1 (h = c/(1-s)) or 2 (h = 1/(s+eps) + 1/(1-s))")
            ->check(CLI::IsMember({1, 2}))
            ->capture_default_str();
        sub->add_option("--a", a, "Nondimensional source a")->capture_default_str();
        sub->add_option("--c", c, "Model-1 shape c (required with --model 1)");
        sub->add_option("--eps", eps, "Model-2 shape eps (default 0.3837)");
        sub->add_option("--sigma", sigma, "Nondimensional volatility sigma")->capture_default_str();
    }

    BridgeParamsd params() const {
        if (model == 1) {
            if (eps) throw DomainError("--eps applies to model 2 only");
            if (!c) throw DomainError("model 1 needs --c");
            return BridgeParamsd(a, sigma, HModeld::model1(*c));
        }
        if (c) throw DomainError("--c applies to model 1 only");
        return BridgeParamsd(a, sigma, HModeld::model2(eps.value_or(0.3837)));
    }
};

json params_json(const BridgeParamsd &p) {
    json j;
    j["model"] = model_id(p.h.family());
    j["a"] = p.a;
    j[p.h.family() == HFamily::Model1 ? "c" : "eps"] = p.h.shape();
    j["sigma"] = p.sigma;
    return j;
}

std::string normalize_table_key(std::string t) {
    std::string k;
    for (char ch : t)
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-')
            k += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (k.rfind("table", 0) == 0) k.erase(0, 5);
    return k;
}

const std::map<std::string, std::string> &explanations() {
    static const std::map<std::string, std::string> m{
        {"1", "Table 1 (fitted a, c, sigma of model 1): `fit --model 1` on count/sun tables.\n"
              "The field data behind the table are not bundled; `synth` followed by `fit` checks\n"
              "parameter recovery instead."},
        {"2", "Table 2 (fitted a, eps, sigma of model 2): `fit --model 2` on count/sun tables.\n"
              "Its 2023 column (a=0.0599, eps=0.3837, sigma=0.5775) is the default parameter set\n"
              "of every subcommand."},
        {"3", "Table 3 (RMSE of mean and standard deviation, models 1 and 2):\n"
              "`fit --model both --table rmse.csv`, rows average and standard_deviation."},
        {"4", "Table 4 (max over time of |sample mean - theoretical mean|): `converge`,\n"
              "column max_err_mean, one row per (n_paths, n_steps) cell."},
        {"5", "Table 5 (max over time of |sample std - theoretical std|): `converge`,\n"
              "column max_err_std."},
        {"6", "Table 6 (|sample mean at t = 1|, theoretical value 0): `converge`,\n"
              "column terminal_err."},
        {"7", "Table 7 (burst counts per path: average, variance, skewness, excess kurtosis,\n"
              "CV, max, min): `bursts`, stats.json -> scenarios[*].counts; the four columns are\n"
              "2023 base and 2024 base / double_T / double_X."},
        {"8", "Table 8 (burst durations, same rows): `bursts`, stats.json -> scenarios[*].durations.\n"
              "Note: the table's 'Variance' row equals the standard deviation (CV x mean),\n"
              "reported here as Std."},
        {"a2", "Table A2 (time-averaged |sample mean - theory|): `converge`, column avg_err_mean."},
        {"a3", "Table A3 (time-averaged |sample std - theory|): `converge`, column avg_err_std."},
    };
    return m;
}

json summary_json(const SampleSummary &s) {
    json j;
    j["n"] = s.n;
    j["Average"] = s.average;
    j["Variance"] = s.variance;
    j["Std"] = s.std_dev;
    j["Skewness"] = s.skewness;
    j["Kurtosis"] = s.kurtosis;
    j["CV"] = s.cv;
    j["Maximum"] = s.maximum;
    j["Minimum"] = s.minimum;
    return j;
}

json fit_json(const FitResult &r) {
    json j;
    j["model"] = r.model_id;
    j["a"] = r.params.a;
    j["c_or_eps"] = r.params.h.shape();
    j["sigma"] = r.params.sigma;
    j["rmse_mean"] = r.rmse_mean;
    j["rmse_std"] = r.rmse_std;
    j["n_days"] = r.n_days_used;
    j["n_bins"] = r.n_bins;
    j["high_volatility"] = r.high_volatility;
    j["converged"] = r.converged;
    return j;
}

class Runner {
public:
    Runner(std::ostream &out, std::ostream &err) : out_(out), err_(err) {}

    int run(int argc, const char *const *argv) {
        CLI::App app{"Simulation, moments, fitting and burst statistics of square-root diffusion bridges"};
        app.name("cirbridge");
        app.set_version_flag("--version", std::string("cirbridge ") + kVersion);
        app.config_formatter(std::make_shared<JsonConfig>());
        app.set_config("--config", "", "JSON configuration file (flags override it)");
        std::string explain_key;
        app.add_option("--explain", explain_key, "Show which table a command reproduces (1-8, A2, A3)");
        app.require_subcommand(0, 1);

        setup_simulate(app);
        setup_moments(app);
        setup_mgf(app);
        setup_fit(app);
        setup_synth(app);
        setup_bursts(app);
        setup_converge(app);

        try {
            app.parse(argc, argv);
        } catch (const CLI::FileError &e) {
            err_ << "error: " << e.what() << '\n';
            return static_cast<int>(ErrorKind::Io);
        } catch (const CLI::ParseError &e) {
            const int code = app.exit(e, out_, err_);
            return code == 0 ? 0 : static_cast<int>(ErrorKind::Validation);
        }

        try {
            if (!explain_key.empty()) {
                const auto &m = explanations();
                const auto it = m.find(normalize_table_key(explain_key));
                if (it == m.end())
                    throw DomainError("unknown table '" + explain_key + "' (1-8, A2, A3)");
                out_ << it->second << '\n';
                return 0;
            }
            if (!action_) {
                err_ << app.help();
                return static_cast<int>(ErrorKind::Validation);
            }
            action_();
            return 0;
        } catch (const Error &e) {
            err_ << "error: " << e.what() << '\n';
            return e.exit_code();
        } catch (const std::exception &e) {
            err_ << "error: " << e.what() << '\n';
            return static_cast<int>(ErrorKind::Numeric);
        }
    }

private:
    CLI::App *subcommand(CLI::App &app, const std::string &name, const std::string &desc,
                         std::function<void()> fn) {
        auto *sub = app.add_subcommand(name, desc);
        sub->callback([this, fn] { action_ = fn; });
        return sub;
    }

    void add_threads(CLI::App *sub) {
        sub->add_option("--threads", threads_, "Worker threads (0: CIRB_THREADS or all cores)")
            ->capture_default_str();
    }

    SimOptions sim_options() const { return SimOptions{threads_, 4096}; }

    void note_seed(std::uint64_t seed) { err_ << "seed: " << seed << '\n'; }

    // ------------------------------------------------------------------ simulate
    struct {
        ParamArgs p;
        bool cir = false;
        double r = 1.0;
        double x0 = 0.0;
        double horizon = 1.0;
        std::int64_t steps = 1000;
        std::uint64_t paths = 100;
        std::uint64_t seed = 1;
        std::string out;
        std::string summary;
        int thin = 1;
    } sim_;

    void setup_simulate(CLI::App &app) {
        auto *sub = subcommand(app, "simulate", "Simulate bridge (or classical CIR) paths with the iVi scheme",
                               [this] { cmd_simulate(); });
        sim_.p.add_to(sub);
        sub->add_flag("--cir", sim_.cir, "Simulate the classical process dC = (a - rC)dt + sigma sqrt(C) dB");
        sub->add_option("--r", sim_.r, "Reversion speed of the classical process")->capture_default_str();
        sub->add_option("--x0", sim_.x0, "Initial state of the classical process")->capture_default_str();
        sub->add_option("--horizon", sim_.horizon, "Time horizon of the classical process")
            ->capture_default_str();
        sub->add_option("--steps", sim_.steps, "Time steps N")->capture_default_str();
        sub->add_option("--paths", sim_.paths, "Number of paths")->capture_default_str();
        sub->add_option("--seed", sim_.seed, "Master seed")->capture_default_str();
        sub->add_option("--out", sim_.out, "Paths CSV, one row per path ('-' for stdout)");
        sub->add_option("--summary", sim_.summary, "Per-time mean/std CSV ('-' for stdout)");
        sub->add_option("--thin", sim_.thin, "Keep every k-th time column in the paths CSV")
            ->capture_default_str();
        add_threads(sub);
    }

    void cmd_simulate() {
        if (sim_.steps <= 0) throw DomainError("--steps must be positive");
        if (sim_.out.empty() && sim_.summary.empty()) sim_.out = "-";
        const auto gen = sim_.cir
                             ? PathGenerator::cir(CirParamsd{sim_.p.a, sim_.r, sim_.p.sigma, sim_.x0},
                                                  TimeGrid(sim_.steps, sim_.horizon), sim_.seed)
                             : PathGenerator::bridge(sim_.p.params(), TimeGrid(sim_.steps), sim_.seed);
        note_seed(sim_.seed);
        if (!sim_.out.empty()) {
            const auto ens = simulate(gen, sim_.paths, sim_options());
            emit(sim_.out, out_, [&](std::ostream &o) { write_paths(o, ens, sim_.thin); });
            if (!sim_.summary.empty())
                emit(sim_.summary, out_, [&](std::ostream &o) { write_summary(o, ensemble_moments(ens)); });
            if (ens.dust_clamps) err_ << "warning: " << ens.dust_clamps << " negative rounding dust clamps\n";
        } else {
            const auto m = ensemble_moments(gen, sim_.paths, sim_options());
            emit(sim_.summary, out_, [&](std::ostream &o) { write_summary(o, m); });
        }
    }

    // ------------------------------------------------------------------ moments
    struct {
        ParamArgs p;
        int points = 100;
        std::string out = "-";
    } mom_;

    void setup_moments(CLI::App &app) {
        auto *sub = subcommand(app, "moments", "Closed-form mean, variance and CV on a uniform grid",
                               [this] { cmd_moments(); });
        mom_.p.add_to(sub);
        sub->add_option("--points", mom_.points, "Grid intervals (points + 1 rows)")->capture_default_str();
        sub->add_option("--out", mom_.out, "Output CSV ('-' for stdout)")->capture_default_str();
    }

    void cmd_moments() {
        const auto c = moment_curve(mom_.p.params(), mom_.points);
        emit(mom_.out, out_, [&](std::ostream &o) {
            write_csv_row(o, {"s", "mean", "variance", "std", "cv"});
            const Eigen::VectorXd sd = c.std_dev();
            for (Eigen::Index k = 0; k < c.s.size(); ++k)
                write_csv_row(o, {format_number(c.s(k)), format_number(c.mean(k)),
                                  format_number(c.variance(k)), format_number(sd(k)),
                                  format_number(c.cv(k))});
        });
    }

    // ------------------------------------------------------------------ mgf
    struct {
        ParamArgs p;
        std::vector<double> lambda{0.5};
        std::vector<double> mu{0.5};
        double t = 0.0;
        double x = 0.0;
        std::string out = "-";
    } mgf_;

    void setup_mgf(CLI::App &app) {
        auto *sub = subcommand(app, "mgf", "Conditional moment-generating function E[exp(lambda X_{1-mu}) | X_t = x]",
                               [this] { cmd_mgf(); });
        mgf_.p.add_to(sub);
        sub->add_option("--lambda", mgf_.lambda, "One or more lambda values (lambda sigma^2 < 1)")
            ->capture_default_str();
        sub->add_option("--mu", mgf_.mu, "One or more lags mu in (0, 1)")->capture_default_str();
        sub->add_option("--t", mgf_.t, "Conditioning time, 0 <= t < 1 - mu")->capture_default_str();
        sub->add_option("--x", mgf_.x, "Conditioning state")->capture_default_str();
        sub->add_option("--out", mgf_.out, "Output CSV ('-' for stdout)")->capture_default_str();
    }

    void cmd_mgf() {
        const auto p = mgf_.p.params();
        std::vector<std::vector<std::string>> rows;
        for (double l : mgf_.lambda)
            for (double m : mgf_.mu)
                rows.push_back({format_number(l), format_number(m), format_number(mgf_.t),
                                format_number(mgf_.x),
                                format_number(mgf(p, MgfQuery<double>{l, m, mgf_.t, mgf_.x}))});
        emit(mgf_.out, out_, [&](std::ostream &o) {
            write_csv_row(o, {"lambda", "mu", "t", "x", "value"});
            for (const auto &r : rows) write_csv_row(o, r);
        });
    }

    // ------------------------------------------------------------------ fit
    struct {
        std::string counts;
        std::string sun;
        std::string totals;
        std::string model = "both";
        int bins = kDefaultBins;
        std::string out = "-";
        std::string table;
        std::string empirical;
    } fit_;

    void setup_fit(CLI::App &app) {
        auto *sub = subcommand(app, "fit", "Two-step least-squares fit of models 1 and/or 2 to count data",
                               [this] { cmd_fit(); });
        sub->add_option("--counts", fit_.counts, "CSV date,interval_start,count")->required();
        sub->add_option("--sun", fit_.sun, "CSV date,sunrise,sunset")->required();
        sub->add_option("--totals", fit_.totals, "CSV date,total (default: sums of the counts)");
        sub->add_option("--model", fit_.model, "1, 2 or both")
            ->check(CLI::IsMember({"1", "2", "both"}))
            ->capture_default_str();
        sub->add_option("--bins", fit_.bins, "Bins of the normalized-time grid")->capture_default_str();
        sub->add_option("--out", fit_.out, "Fit results JSON ('-' for stdout)")->capture_default_str();
        sub->add_option("--table", fit_.table, "RMSE comparison CSV");
        sub->add_option("--empirical", fit_.empirical, "Binned empirical moments CSV");
    }

    void cmd_fit() {
        const auto tables =
            read_days(fit_.counts, fit_.sun,
                      fit_.totals.empty() ? std::nullopt : std::optional<std::string>(fit_.totals));
        for (const auto &d : tables.zero_total)
            err_ << "warning: day " << d << " has a zero total and is excluded\n";
        const auto emp = empirical_moments(tables.days, fit_.bins);
        if (emp.dropped_intervals)
            err_ << "warning: " << emp.dropped_intervals
                 << " interval(s) outside [sunrise, sunset] were dropped\n";

        std::vector<HFamily> families;
        if (fit_.model != "2") families.push_back(HFamily::Model1);
        if (fit_.model != "1") families.push_back(HFamily::Model2);
        std::vector<FitResult> fits;
        json arr = json::array();
        for (auto f : families) {
            fits.push_back(fit(emp, f));
            if (!fits.back().converged)
                err_ << "warning: simplex refinement of model " << model_id(f)
                     << " stopped at the evaluation limit\n";
            arr.push_back(fit_json(fits.back()));
        }
        emit(fit_.out, out_, [&](std::ostream &o) { o << arr.dump(2) << '\n'; });
        if (!fit_.table.empty())
            emit(fit_.table, out_, [&](std::ostream &o) {
                std::vector<std::string> h{"statistic"}, ra{"average"}, rs{"standard_deviation"};
                for (const auto &r : fits) {
                    h.push_back("model_" + std::to_string(r.model_id));
                    ra.push_back(format_number(r.rmse_mean));
                    rs.push_back(format_number(r.rmse_std));
                }
                write_csv_row(o, h);
                write_csv_row(o, ra);
                write_csv_row(o, rs);
            });
        if (!fit_.empirical.empty())
            emit(fit_.empirical, out_, [&](std::ostream &o) {
                write_csv_row(o, {"s", "mean", "variance", "std", "cv", "n"});
                for (Eigen::Index j = 0; j < emp.n_bins(); ++j)
                    write_csv_row(o, {format_number(emp.bin_centers(j)), format_number(emp.mean(j)),
                                      format_number(emp.variance(j)),
                                      format_number(std::sqrt(emp.variance(j))), format_number(emp.cv(j)),
                                      std::to_string(emp.n_samples[std::size_t(j)])});
            });
    }

    // ------------------------------------------------------------------ synth
    struct {
        ParamArgs p;
        std::string calendar;
        int days = 125;
        std::string start = "2023-04-01";
        std::uint64_t seed = 1;
        std::int64_t steps = 1000;
        std::string out_dir = ".";
    } syn_;

    void setup_synth(CLI::App &app) {
        auto *sub = subcommand(app, "synth", "Write synthetic counts/sun/totals tables from known parameters",
                               [this] { cmd_synth(); });
        syn_.p.add_to(sub);
        sub->add_option("--calendar", syn_.calendar, "CSV date,sunrise,sunset,total (overrides --days)");
        sub->add_option("--days", syn_.days, "Days of the built-in calendar")->capture_default_str();
        sub->add_option("--start", syn_.start, "First date of the built-in calendar")->capture_default_str();
        sub->add_option("--seed", syn_.seed, "Master seed")->capture_default_str();
        sub->add_option("--steps", syn_.steps, "Time steps per simulated day")->capture_default_str();
        sub->add_option("--out-dir", syn_.out_dir, "Directory for counts.csv, sun.csv, totals.csv")
            ->capture_default_str();
    }

    void cmd_synth() {
        std::vector<DaySpec> specs;
        if (!syn_.calendar.empty()) {
            auto in = open_input(syn_.calendar);
            specs = read_calendar(in, syn_.calendar);
        } else {
            specs = default_calendar(syn_.days, parse_date(syn_.start), syn_.seed);
        }
        note_seed(syn_.seed);
        const auto days = synthesize_days(syn_.p.params(), specs, syn_.seed, {syn_.steps, kIntervalMinutes});
        for (const auto &d : days)
            if (d.total == 0) err_ << "warning: day " << d.date << " has a zero total\n";
        std::error_code ec;
        fs::create_directories(syn_.out_dir, ec);
        if (ec) throw IoError("cannot create '" + syn_.out_dir + "': " + ec.message());
        const fs::path dir(syn_.out_dir);
        emit((dir / "counts.csv").string(), out_, [&](std::ostream &o) { write_counts(o, days); });
        emit((dir / "sun.csv").string(), out_, [&](std::ostream &o) { write_sun(o, days); });
        emit((dir / "totals.csv").string(), out_, [&](std::ostream &o) { write_totals(o, days); });
    }

    // ------------------------------------------------------------------ bursts
    struct {
        ParamArgs p;
        std::int64_t steps = 10000;
        std::uint64_t paths = 100000;
        std::uint64_t seed = 1;
        double x_threshold = 0.01;
        double t_threshold = 0.02;
        std::vector<std::string> scenarios{"base", "double_T", "double_X"};
        int bins = 100;
        std::string out_dir = ".";
    } bur_;

    void setup_bursts(CLI::App &app) {
        auto *sub = subcommand(app, "bursts", "Burst counts and durations over a simulated bridge ensemble",
                               [this] { cmd_bursts(); });
        bur_.p.add_to(sub);
        sub->add_option("--steps", bur_.steps, "Time steps N (dt = 1/N)")->capture_default_str();
        sub->add_option("--paths", bur_.paths, "Number of paths")->capture_default_str();
        sub->add_option("--seed", bur_.seed, "Master seed")->capture_default_str();
        sub->add_option("--x-threshold", bur_.x_threshold, "Height threshold")->capture_default_str();
        sub->add_option("--t-threshold", bur_.t_threshold, "Duration threshold")->capture_default_str();
        sub->add_option("--scenario", bur_.scenarios, "base, double_T and/or double_X")
            ->check(CLI::IsMember({"base", "double_T", "double_X"}))
            ->capture_default_str();
        sub->add_option("--bins", bur_.bins, "Bins of the duration histogram")->capture_default_str();
        sub->add_option("--out-dir", bur_.out_dir, "Directory for stats.json and the CSVs")
            ->capture_default_str();
        add_threads(sub);
    }

    void cmd_bursts() {
        if (bur_.steps <= 0) throw DomainError("--steps must be positive");
        const auto p = bur_.p.params();
        const TimeGrid grid(bur_.steps);
        const BurstConfig cfg{bur_.x_threshold, bur_.t_threshold, grid.dt()};
        std::vector<BurstScenario> sc;
        for (const auto &s : bur_.scenarios) sc.push_back(scenario_from_name(s));
        note_seed(bur_.seed);
        const auto stats =
            burst_scenarios(PathGenerator::bridge(p, grid, bur_.seed), bur_.paths, cfg, sc, sim_options(), bur_.bins);

        std::error_code ec;
        fs::create_directories(bur_.out_dir, ec);
        if (ec) throw IoError("cannot create '" + bur_.out_dir + "': " + ec.message());
        const fs::path dir(bur_.out_dir);
        json j;
        j["params"] = params_json(p);
        j["n_steps"] = bur_.steps;
        j["seed"] = bur_.seed;
        j["scenarios"] = json::array();
        for (std::size_t k = 0; k < stats.size(); ++k) {
            const auto &s = stats[k];
            const auto name = scenario_name(sc[k]);
            json e;
            e["name"] = name;
            e["x_threshold"] = s.config.x_threshold;
            e["t_threshold"] = s.config.t_threshold;
            e["n_paths"] = s.n_paths;
            e["n_events"] = s.n_events;
            e["counts"] = summary_json(s.counts);
            e["durations"] = summary_json(s.durations);
            j["scenarios"].push_back(e);
            emit((dir / ("counts_pd_" + name + ".csv")).string(), out_, [&](std::ostream &o) {
                write_csv_row(o, {"k", "probability"});
                for (std::size_t i = 0; i < s.count_pd.size(); ++i)
                    write_csv_row(o, {std::to_string(i), format_number(s.count_pd[i])});
            });
            emit((dir / ("durations_" + name + ".csv")).string(), out_, [&](std::ostream &o) {
                write_csv_row(o, {"bin_left", "bin_right", "density"});
                for (const auto &b : s.duration_hist)
                    write_csv_row(o, {format_number(b.left), format_number(b.right), format_number(b.density)});
            });
        }
        emit((dir / "stats.json").string(), out_, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
    }

    // ------------------------------------------------------------------ converge
    struct {
        ParamArgs p;
        std::vector<std::uint64_t> paths{10000, 100000, 1000000};
        std::vector<std::int64_t> steps{100, 1000, 10000};
        bool full = false;
        double budget = -1.0;
        std::uint64_t seed = 1;
        std::string out = "-";
    } conv_;

    void setup_converge(CLI::App &app) {
        auto *sub = subcommand(app, "converge", "Mean/std error of simulated ensembles over a (paths x steps) grid",
                               [this] { cmd_converge(); });
        conv_.p.add_to(sub);
        sub->add_option("--paths", conv_.paths, "Sample sizes")->capture_default_str();
        sub->add_option("--steps", conv_.steps, "Time-step counts")->capture_default_str();
        sub->add_flag("--full", conv_.full, "Also run the 10^6 paths x 10^4 steps cell");
        sub->add_option("--budget", conv_.budget,
                        "Skip cells projected to take longer than this many seconds (default: no limit)");
        sub->add_option("--seed", conv_.seed, "Master seed")->capture_default_str();
        sub->add_option("--out", conv_.out, "Report CSV ('-' for stdout)")->capture_default_str();
        add_threads(sub);
    }

    void cmd_converge() {
        ConvergencePlan plan;
        plan.paths = conv_.paths;
        plan.steps = conv_.steps;
        plan.include_largest = conv_.full;
        if (conv_.budget >= 0.0) plan.budget_seconds = conv_.budget;
        for (auto s : plan.steps)
            if (s <= 0) throw DomainError("--steps values must be positive");
        for (auto n : plan.paths)
            if (n == 0) throw DomainError("--paths values must be positive");
        note_seed(conv_.seed);
        const auto rows = run_convergence(conv_.p.params(), plan, conv_.seed, sim_options());
        emit(conv_.out, out_, [&](std::ostream &o) { write_convergence(o, rows); });
    }

    std::ostream &out_;
    std::ostream &err_;
    unsigned threads_ = 0;
    std::function<void()> action_;
};

} // namespace

std::string explain(const std::string &table) {
    const auto &m = explanations();
    const auto it = m.find(normalize_table_key(table));
    return it == m.end() ? std::string() : it->second;
}

int run(int argc, const char *const *argv) { return Runner(std::cout, std::cerr).run(argc, argv); }

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<const char *> argv{"cirbridge"};
    for (const auto &a : args) argv.push_back(a.c_str());
    return Runner(out, err).run(static_cast<int>(argv.size()), argv.data());
}

} // namespace cirb::cli
