// sirhawkes command-line front end.
#include "sirhawkes/cascades.hpp"
#include "sirhawkes/csv.hpp"
#include "sirhawkes/errors.hpp"
#include "sirhawkes/fit.hpp"
#include "sirhawkes/gof.hpp"
#include "sirhawkes/kernels.hpp"
#include "sirhawkes/likelihood.hpp"
#include "sirhawkes/parallel.hpp"
#include "sirhawkes/predict.hpp"
#include "sirhawkes/serialize.hpp"
#include "sirhawkes/simulate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sirhawkes;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Snapshot of every option that was given or has a default.
Json config_snapshot(const CLI::App& app) {
    Json j = Json::object();
    for (const CLI::Option* opt : app.get_options()) {
        const std::string name = opt->get_name(false, true);
        if (name.empty() || name == "--help" || name == "-h" || name == "--config") continue;
        const std::string key = opt->get_single_name();
        if (opt->count() > 0) {
            const auto& results = opt->results();
            if (results.size() == 1) {
                j[key] = results.front();
            } else {
                j[key] = results;
            }
        } else if (!opt->get_default_str().empty()) {
            j[key] = opt->get_default_str();
        }
    }
    return j;
}

struct Manifest {
    std::string subcommand;
    std::string started = timestamp();

    void write(const fs::path& path, const CLI::App& app, std::uint64_t seed) const {
        Json j;
        j["subcommand"] = subcommand;
        j["config"] = config_snapshot(app);
        j["seed"] = seed;
        j["version"] = kVersion;
        j["started"] = started;
        j["finished"] = timestamp();
        save_json(path, j);
    }
};

fs::path manifest_for(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

// Output sink: a file, or stdout for "-".
class Sink {
public:
    explicit Sink(const std::string& path) : path_(path) {
        if (path != "-") file_ = csv::open_output(path);
    }
    std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
    [[nodiscard]] bool is_file() const { return path_ != "-"; }
    [[nodiscard]] fs::path path() const { return path_; }
    void finish() {
        stream().flush();
        if (!stream()) throw IoError("cannot write " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
};

std::vector<Cascade> require_cascades(const std::string& path) {
    auto cascades = load_cascades(path);
    if (cascades.empty()) throw PreconditionError(path + ": no cascades");
    return cascades;
}

std::vector<FitSummaryRow> load_fits(const std::vector<std::string>& paths) {
    std::vector<FitSummaryRow> rows;
    for (const auto& p : paths) {
        std::ifstream in = csv::open_input(p);
        auto part = read_fit_summary(in);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    if (rows.empty()) throw PreconditionError("no fitted models in the fit summaries");
    return rows;
}

FitResult as_fit_result(const FitSummaryRow& row) {
    FitResult f;
    f.params = row.params;
    f.neg_loglik = row.neg_loglik;
    f.converged = row.converged;
    const double N = std::isfinite(row.params.N) ? std::floor(row.params.N) : 1e18;
    f.sir_view = to_sir(row.params.kernel, static_cast<std::int64_t>(std::max(1.0, N)), row.params.rho);
    return f;
}

// "name=value" pairs.
std::map<std::string, double> parse_pins(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        double v = 0.0;
        if (eq == std::string::npos || !csv::parse_number(item.substr(eq + 1), v))
            throw PreconditionError("expected name=value, got " + item);
        out[item.substr(0, eq)] = v;
    }
    return out;
}

// "name=lo:hi" pairs.
std::map<std::string, ParameterBox> parse_bounds(const std::vector<std::string>& items) {
    std::map<std::string, ParameterBox> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        const auto colon = item.find(':', eq == std::string::npos ? 0 : eq);
        ParameterBox b{};
        if (eq == std::string::npos || colon == std::string::npos ||
            !csv::parse_number(item.substr(eq + 1, colon - eq - 1), b.lower) ||
            !csv::parse_number(item.substr(colon + 1), b.upper))
            throw PreconditionError("expected name=lo:hi, got " + item);
        out[item.substr(0, eq)] = b;
    }
    return out;
}

// ---- model flags shared by simulate, convert and size-dist ----

struct ModelFlags {
    std::string spec_path;
    std::string family = "exp";
    std::optional<double> beta, gamma, theta, kappa, c, rho;
    std::optional<double> N;

    void add(CLI::App* app, bool with_kernel) {
        app->add_option("--spec", spec_path, "JSON spec file (flags override its fields)");
        app->add_option("--family", family, "kernel / recovery family")->capture_default_str();
        app->add_option("--beta", beta, "infection rate");
        app->add_option("--gamma", gamma, "exp recovery rate (alias of --theta)");
        app->add_option("--theta", theta, "family shape parameter");
        app->add_option("--c", c, "power-law offset");
        app->add_option("--N", N, "population size");
        app->add_option("--rho", rho, "mark exponent");
        if (with_kernel) app->add_option("--kappa", kappa, "kernel scale");
    }

    [[nodiscard]] Json merged() const {
        Json j = spec_path.empty() ? Json::object() : load_json(spec_path);
        if (!spec_path.empty() && !j.contains("family")) j["family"] = family;
        if (spec_path.empty() || family != "exp") j["family"] = family;
        auto set = [&](const char* key, const std::optional<double>& v) {
            if (v) j[key] = *v;
        };
        set("beta", beta);
        set("kappa", kappa);
        set("c", c);
        set("N", N);
        set("rho", rho);
        if (gamma) {
            j["gamma"] = *gamma;
            j.erase("theta");
        }
        if (theta) {
            j["theta"] = *theta;
            j.erase("gamma");
        }
        return j;
    }

    [[nodiscard]] bool is_kernel(const Json& j) const { return j.contains("kappa") && !j.contains("beta"); }

    [[nodiscard]] SirSpec sir() const {
        const Json j = merged();
        if (is_kernel(j)) {
            KernelSpec k = kernel_from_json(j);
            if (!j.contains("N")) throw PreconditionError("--N is required");
            return to_sir(k, static_cast<std::int64_t>(j.at("N").get<double>()),
                          j.contains("rho") ? j.at("rho").get<double>() : 0.0);
        }
        return sir_from_json(j);
    }
};

// ---- subcommands ----

struct SimulateCmd {
    ModelFlags model;
    std::string kind = "sir";
    std::int64_t runs = 1;
    std::uint64_t seed = 0;
    std::int64_t max_events = 1'000'000;
    std::optional<double> horizon;
    std::optional<double> alpha;
    std::string out = "-";
    unsigned jobs = default_jobs();

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("simulate", "simulate SIR realizations or HawkesN cascades");
        model.add(app, true);
        app->add_option("--model", kind, "sir (with recoveries) or hawkesn")
            ->check(CLI::IsMember({"sir", "hawkesn"}))
            ->capture_default_str();
        app->add_option("--runs", runs, "number of realizations")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--seed", seed, "random seed")->capture_default_str();
        app->add_option("--max-events", max_events, "event cap per realization")->capture_default_str();
        app->add_option("--horizon", horizon, "time cap");
        app->add_option("--alpha", alpha, "sample power-law marks with this exponent");
        app->add_option("--out", out, "output CSV ('-' for stdout)")->capture_default_str();
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
        app->callback([this, app] { run(*app); });
    }

    void run(const CLI::App& app) const {
        Manifest manifest{"simulate"};
        Sink sink(out);
        if (kind == "sir") {
            SimConfig cfg;
            cfg.sir = model.sir();
            cfg.seed = seed;
            cfg.max_events = max_events;
            cfg.horizon = horizon;
            auto reals = simulate_batch(cfg, static_cast<std::size_t>(runs), jobs, alpha);
            write_realizations(sink.stream(), reals);
        } else {
            const Json j = model.merged();
            HawkesNParams p;
            p.kernel = j.contains("kappa") ? kernel_from_json(j) : to_kernel(sir_from_json(j));
            p.N = j.contains("N") ? j.at("N").get<double>() : kInf;
            p.rho = j.contains("rho") ? j.at("rho").get<double>() : 0.0;
            p.validate();
            HawkesSimConfig cfg;
            cfg.seed = seed;
            cfg.max_events = max_events;
            cfg.horizon = horizon;
            cfg.mark_alpha = alpha;
            std::vector<Cascade> cascades(static_cast<std::size_t>(runs));
            parallel_for(cascades.size(), jobs, [&](std::size_t r) {
                cascades[r] = simulate_hawkesn(p, cfg, r);
                cascades[r].id = std::to_string(r);
            });
            write_cascades(sink.stream(), cascades);
        }
        sink.finish();
        if (sink.is_file()) manifest.write(manifest_for(sink.path()), app, seed);
    }
};

struct FitCmd {
    std::string input;
    std::string family = "exp";
    bool marked = false;
    bool joint = false;
    bool sir = false;
    int restarts = 10;
    std::vector<std::string> pins;
    std::vector<std::string> bounds;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    unsigned jobs = default_jobs();
    std::optional<double> window;
    std::optional<double> upto;
    std::optional<double> train_fraction;
    std::string out_dir = "fit_out";

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("fit", "maximum-likelihood fits of cascades");
        app->add_option("--input", input, "cascades CSV (realizations CSV with --sir)")->required();
        app->add_option("--family", family, "kernel family")->capture_default_str();
        app->add_flag("--marked", marked, "fit the mark exponent rho");
        app->add_flag("--joint", joint, "one parameter set for all cascades");
        app->add_flag("--sir", sir, "fit the SIR likelihood to realizations with recoveries");
        app->add_option("--restarts", restarts, "random initializations")->capture_default_str();
        app->add_option("--pin", pins, "fix a parameter, name=value");
        app->add_option("--bound", bounds, "parameter box, name=lo:hi");
        app->add_option("--tol", tol, "relative nll tolerance")->capture_default_str();
        app->add_option("--seed", seed, "random seed")->capture_default_str();
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
        app->add_option("--window", window, "fit only events at or before this time");
        app->add_option("--upto", upto, "censoring time of the compensator");
        app->add_option("--train-fraction", train_fraction, "fit only the first ceil(f * n) events (pairs with holdout --split f)")
            ->check(CLI::Range(0.0, 1.0))
            ->excludes("--window");
        app->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
        app->callback([this, app] { run(*app); });
    }

    [[nodiscard]] FitConfig config() const {
        FitConfig cfg;
        cfg.family = parse_family(family);
        cfg.marked = marked;
        cfg.restarts = restarts;
        cfg.pinned = parse_pins(pins);
        cfg.bounds = parse_bounds(bounds);
        cfg.tol = tol;
        cfg.seed = seed;
        cfg.upto = upto;
        cfg.validate();
        return cfg;
    }

    void run(const CLI::App& app) const {
        Manifest manifest{"fit"};
        FitConfig cfg = config();
        fs::create_directories(out_dir);
        if (sir) {
            auto reals = load_realizations(input);
            if (reals.empty()) throw PreconditionError(input + ": no realizations");
            cfg.jobs = jobs;
            save_json(fs::path(out_dir) / "sir_fit.json", to_json(fit_sir(reals, cfg)));
            manifest.write(fs::path(out_dir) / "manifest.json", app, seed);
            return;
        }
        auto cascades = require_cascades(input);
        if (window) {
            for (auto& c : cascades) c = c.observed_until(*window);
        }
        if (train_fraction) {
            for (auto& c : cascades) c = c.first_events(holdout_train_count(c.size(), *train_fraction));
        }
        std::vector<FitSummaryRow> rows;
        if (joint) {
            cfg.jobs = jobs;
            const FitResult r = fit_joint(cascades, cfg);
            save_json(fs::path(out_dir) / "joint.json", to_json(r, "joint"));
            rows.push_back(summary_row(r, "joint"));
        } else {
            std::vector<std::optional<FitResult>> results(cascades.size());
            std::mutex log;
            parallel_for(cascades.size(), jobs, [&](std::size_t i) {
                if (cascades[i].size() < 3) {
                    std::lock_guard lock(log);
                    std::cerr << "skipping cascade " << cascades[i].id << ": fewer than 3 events\n";
                    return;
                }
                FitConfig local = cfg;
                local.jobs = 1;
                results[i] = fit_cascade(cascades[i], local);
            });
            for (std::size_t i = 0; i < cascades.size(); ++i) {
                if (!results[i]) continue;
                save_json(fs::path(out_dir) / (cascades[i].id + ".json"), to_json(*results[i], cascades[i].id));
                rows.push_back(summary_row(*results[i], cascades[i].id));
            }
            if (rows.empty()) throw PreconditionError("no cascade has at least 3 events");
        }
        std::ofstream summary = csv::open_output(fs::path(out_dir) / "summary.csv");
        write_fit_summary(summary, rows);
        summary.flush();
        if (!summary) throw IoError("cannot write summary.csv");
        manifest.write(fs::path(out_dir) / "manifest.json", app, seed);
    }
};

// Indexes fit rows by cascade; a "joint" row applies to every cascade.
struct FitIndex {
    std::map<std::string, std::vector<FitSummaryRow>> by_id;
    std::vector<FitSummaryRow> shared;

    explicit FitIndex(const std::vector<FitSummaryRow>& rows) {
        for (const auto& r : rows) (r.cascade_id == "joint" ? shared : by_id[r.cascade_id]).push_back(r);
    }
    [[nodiscard]] std::vector<FitSummaryRow> for_cascade(const std::string& id) const {
        std::vector<FitSummaryRow> out = shared;
        if (auto it = by_id.find(id); it != by_id.end()) out.insert(out.end(), it->second.begin(), it->second.end());
        return out;
    }
};

struct GofCmd {
    std::string input;
    std::vector<std::string> fits;
    std::string out = "-";
    std::string compare_out;
    double level = 0.01;
    double min_gap = 0.05;
    std::optional<int> lags;

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("gof", "time-rescaling goodness-of-fit tests and model comparison");
        app->add_option("--input", input, "cascades CSV")->required();
        app->add_option("--fits", fits, "fit summary CSV(s)")->required();
        app->add_option("--out", out, "report CSV ('-' for stdout)")->capture_default_str();
        app->add_option("--compare-out", compare_out, "pairwise comparison CSV");
        app->add_option("--level", level, "significance level")->capture_default_str();
        app->add_option("--min-gap", min_gap, "KS distance gap for a decision")->capture_default_str();
        app->add_option("--lags", lags, "Ljung-Box lags");
        app->callback([this, app] { run(*app); });
    }

    void run(const CLI::App& app) const {
        Manifest manifest{"gof"};
        const auto cascades = require_cascades(input);
        const FitIndex index(load_fits(fits));
        Sink sink(out);
        std::ostream& os = sink.stream();
        os << "cascade_id,model,n,ks_D,ks_p,ed_p,lb_p,pass_ks,pass_ed,pass_lb\n";
        std::vector<std::string> cmp_rows;
        for (const auto& c : cascades) {
            std::vector<std::pair<std::string, GofReport>> reports;
            for (const auto& row : index.for_cascade(c.id)) {
                const std::string model(to_string(row.params.kernel.family));
                GofReport rep;
                try {
                    rep = gof_report(rescale(row.params, c), lags);
                } catch (const PreconditionError& e) {
                    std::cerr << "skipping " << c.id << " / " << model << ": " << e.what() << '\n';
                    continue;
                }
                const auto pass = rep.pass_at(level);
                os << csv::quote(c.id) << ',' << model << ',' << rep.n << ',' << csv::format(rep.ks_D) << ','
                   << csv::format(rep.ks_p) << ',' << csv::format(rep.ed_p) << ',' << csv::format(rep.lb_p) << ','
                   << pass.ks << ',' << pass.ed << ',' << pass.lb << '\n';
                reports.emplace_back(model, rep);
            }
            for (std::size_t a = 0; a < reports.size(); ++a) {
                for (std::size_t b = a + 1; b < reports.size(); ++b) {
                    const Comparison cmp = compare_models(reports[a].second, reports[b].second, min_gap);
                    std::ostringstream line;
                    line << csv::quote(c.id) << ',' << reports[a].first << ',' << reports[b].first << ','
                         << csv::format(reports[a].second.ks_D) << ',' << csv::format(reports[b].second.ks_D) << ','
                         << to_string(cmp);
                    cmp_rows.push_back(line.str());
                }
            }
        }
        sink.finish();
        if (!compare_out.empty()) {
            std::ofstream cmp = csv::open_output(compare_out);
            cmp << "cascade_id,model_a,model_b,ks_D_a,ks_D_b,result\n";
            for (const auto& l : cmp_rows) cmp << l << '\n';
            cmp.flush();
            if (!cmp) throw IoError("cannot write " + compare_out);
        }
        if (sink.is_file()) manifest.write(manifest_for(sink.path()), app, 0);
    }
};

struct HoldoutCmd {
    std::string input;
    std::vector<std::string> fits;
    double split = 0.4;
    std::string out = "-";

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("holdout", "per-event negative log-likelihood on held-out events");
        app->add_option("--input", input, "cascades CSV")->required();
        app->add_option("--fits", fits, "fit summary CSV(s)")->required();
        app->add_option("--split", split, "training fraction")->check(CLI::Range(0.0, 1.0))->capture_default_str();
        app->add_option("--out", out, "output CSV ('-' for stdout)")->capture_default_str();
        app->callback([this, app] { run(*app); });
    }

    void run(const CLI::App& app) const {
        Manifest manifest{"holdout"};
        const auto cascades = require_cascades(input);
        const FitIndex index(load_fits(fits));
        Sink sink(out);
        std::ostream& os = sink.stream();
        os << "cascade_id,model,split,n_holdout,neg_loglik_per_event\n";
        for (const auto& c : cascades) {
            for (const auto& row : index.for_cascade(c.id)) {
                LikelihoodValue v;
                try {
                    v = holdout_loglik(row.params, c, split);
                } catch (const PreconditionError& e) {
                    std::cerr << "skipping " << c.id << ": " << e.what() << '\n';
                    continue;
                }
                os << csv::quote(c.id) << ',' << to_string(row.params.kernel.family) << ',' << csv::format(split)
                   << ',' << v.n_events << ',' << csv::format(-v.per_event) << '\n';
            }
        }
        sink.finish();
        if (sink.is_file()) manifest.write(manifest_for(sink.path()), app, 0);
    }
};

struct PredictCmd {
    std::string input;
    std::vector<std::string> fits;
    double horizon = kDefaultObservationWindow;
    std::string out = "-";
    std::string export_features;
    std::uint64_t seed = 0;
    unsigned jobs = default_jobs();

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("predict", "final-size prediction with a cross-validated sigma model");
        app->add_option("--input", input, "full cascades CSV (final sizes are the targets)")->required();
        app->add_option("--fits", fits, "fit summary CSV(s) of the observed windows")->required();
        app->add_option("--horizon", horizon, "observation window")->capture_default_str();
        app->add_option("--out", out, "ARE CSV ('-' for stdout)")->capture_default_str();
        app->add_option("--export-features", export_features, "write the feature matrix to this CSV");
        app->add_option("--seed", seed, "fold assignment seed")->capture_default_str();
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
        app->callback([this, app] { run(*app); });
    }

    struct Row {
        std::string id;
        PredictionFeatures features;
        std::int64_t C_inf;
    };

    void run(const CLI::App& app) const {
        Manifest manifest{"predict"};
        const auto cascades = require_cascades(input);
        const FitIndex index(load_fits(fits));
        std::map<KernelFamily, std::vector<Row>> by_model;
        for (const auto& c : cascades) {
            const Cascade observed = c.observed_until(horizon);
            for (const auto& fit_row : index.for_cascade(c.id)) {
                auto f = extract_features(as_fit_result(fit_row), observed, horizon);
                if (!f) {
                    std::cerr << "dropping " << c.id << ": non-finite fitted parameters\n";
                    continue;
                }
                by_model[f->family].push_back({c.id, *f, static_cast<std::int64_t>(c.size())});
            }
        }
        if (by_model.empty()) throw PreconditionError("no cascades matched the fits");

        std::ofstream features_out;
        if (!export_features.empty()) features_out = csv::open_output(export_features);
        Sink sink(out);
        std::ostream& os = sink.stream();
        os << "cascade_id,model,C_t,N_hat,sigma,C_inf_hat,C_inf_true,are\n";
        std::map<std::string, std::vector<double>> per_cascade;
        std::map<std::string, std::pair<std::int64_t, std::int64_t>> sizes;
        for (const auto& [family, rows] : by_model) {
            const std::string model(to_string(family));
            if (features_out.is_open()) {
                features_out << "cascade_id,model";
                for (const auto& n : rows.front().features.names) features_out << ',' << n;
                features_out << ",C_t,t_obs,C_inf\n";
                for (const auto& r : rows) {
                    features_out << csv::quote(r.id) << ',' << model;
                    for (double v : r.features.values) features_out << ',' << csv::format(v);
                    features_out << ',' << r.features.C_t << ',' << csv::format(r.features.t_obs) << ',' << r.C_inf
                                 << '\n';
                }
            }
            std::vector<CvRow> cv_rows;
            for (const auto& r : rows) cv_rows.push_back({r.features.values, r.features.C_t, r.features.N_hat, r.C_inf});
            CvConfig cv;
            cv.seed = seed;
            cv.jobs = jobs;
            const CvResult res = cross_validate(cv_rows, cv);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                os << csv::quote(rows[i].id) << ',' << model << ',' << rows[i].features.C_t << ','
                   << csv::format(rows[i].features.N_hat) << ',' << csv::format(res.sigma_hat[i]) << ','
                   << csv::format(res.size_hat[i]) << ',' << rows[i].C_inf << ',' << csv::format(res.are[i]) << '\n';
                per_cascade[rows[i].id].push_back(res.size_hat[i]);
                sizes[rows[i].id] = {rows[i].features.C_t, rows[i].C_inf};
            }
        }
        if (by_model.size() >= 2) {
            for (const auto& [id, preds] : per_cascade) {
                if (preds.size() < 2) continue;
                const double combined = combine_predictions(preds);
                os << csv::quote(id) << ",combined," << sizes[id].first << ",,," << csv::format(combined) << ','
                   << sizes[id].second << ',' << csv::format(are(combined, sizes[id].second)) << '\n';
            }
        }
        sink.finish();
        if (features_out.is_open()) {
            features_out.flush();
            if (!features_out) throw IoError("cannot write " + export_features);
        }
        if (sink.is_file()) manifest.write(manifest_for(sink.path()), app, seed);
    }
};

struct ConvertCmd {
    ModelFlags model;
    std::string to;
    std::string out = "-";

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("convert", "convert between kernel and SIR parameters");
        model.add(app, true);
        app->add_option("--to", to, "target parametrization")->required()->check(CLI::IsMember({"sir", "kernel"}));
        app->add_option("--out", out, "output JSON ('-' for stdout)")->capture_default_str();
        app->callback([this, app] { run(*app); });
    }

    void run(const CLI::App& app) const {
        Manifest manifest{"convert"};
        const Json in = model.merged();
        Json result;
        if (to == "sir") {
            if (!in.contains("kappa")) throw PreconditionError("--to sir needs --kappa and --theta");
            const KernelSpec k = kernel_from_json(in);
            const RecoveryDistribution rec = recovery_of(k);
            const SirSpec s = to_sir(k, 1);
            if (k.family != KernelFamily::Exp) result["family"] = std::string(to_string(k.family));
            result["beta"] = csv::round9(s.beta);
            result[k.family == KernelFamily::Exp ? "gamma" : "theta"] = csv::round9(rec.theta);
            if (has_offset(k.family)) result["c"] = csv::round9(rec.c);
            if (in.contains("N")) result["N"] = in.at("N");
            if (in.contains("rho")) result["rho"] = in.at("rho");
        } else {
            if (!in.contains("beta")) throw PreconditionError("--to kernel needs --beta");
            RecoveryDistribution rec;
            rec.family = parse_family(in.at("family").get<std::string>());
            rec.theta = in.contains("gamma") ? in.at("gamma").get<double>() : in.value("theta", 0.0);
            rec.c = in.value("c", 0.0);
            rec.validate();
            result = to_json(to_kernel(in.at("beta").get<double>(), rec));
        }
        Sink sink(out);
        sink.stream() << result.dump() << '\n';
        sink.finish();
        if (sink.is_file()) manifest.write(manifest_for(sink.path()), app, 0);
    }
};

struct SizeDistCmd {
    ModelFlags model;
    std::int64_t runs = 1000;
    std::uint64_t seed = 0;
    std::optional<double> alpha;
    std::string out = "-";
    unsigned jobs = default_jobs();

    void add(CLI::App& root) {
        CLI::App* app = root.add_subcommand("size-dist", "empirical final-size distribution");
        model.add(app, true);
        app->add_option("--runs", runs, "simulations")->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--seed", seed, "random seed")->capture_default_str();
        app->add_option("--alpha", alpha, "mark exponent for marked SIR");
        app->add_option("--out", out, "output CSV ('-' for stdout)")->capture_default_str();
        app->add_option("--jobs", jobs, "worker threads")->capture_default_str();
        app->callback([this, app] { run(*app); });
    }

    void run(const CLI::App& app) const {
        Manifest manifest{"size-dist"};
        const Json j = model.merged();
        SizeDistribution d;
        if (model.is_kernel(j)) {
            if (!j.contains("N")) throw PreconditionError("--N is required");
            d = size_distribution(kernel_from_json(j), j.at("N").get<double>(), runs, seed, jobs);
        } else {
            d = size_distribution(sir_from_json(j), runs, seed, jobs, alpha);
        }
        Sink sink(out);
        std::ostream& os = sink.stream();
        os << "size,count,pmf,cdf,likelihood\n";
        for (std::int64_t n = 1; n <= d.N; ++n) {
            os << n << ',' << d.counts[static_cast<std::size_t>(n - 1)] << ',' << csv::format(d.pmf(n)) << ','
               << csv::format(d.cdf(n)) << ',' << csv::format(d.likelihood(n)) << '\n';
        }
        sink.finish();
        if (sink.is_file()) manifest.write(manifest_for(sink.path()), app, seed);
    }
};

// Expands "--config file.json" into flags placed before the user's own flags;
// with take-last semantics the explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        const Json cfg = load_json(args[i + 1]);
        if (!cfg.is_object()) throw PreconditionError("--config must hold a JSON object");
        std::vector<std::string> injected;
        for (const auto& [key, value] : cfg.items()) {
            auto push = [&](const Json& v) {
                injected.push_back("--" + key);
                injected.push_back(v.is_string() ? v.get<std::string>() : v.dump());
            };
            if (value.is_boolean()) {
                if (value.get<bool>()) injected.push_back("--" + key);
            } else if (value.is_array()) {
                for (const auto& v : value) push(v);
            } else {
                push(value);
            }
        }
        args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        // Insert right after the subcommand name.
        const std::size_t at = args.empty() ? 0 : 1;
        args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), injected.begin(), injected.end());
        break;
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic SIR and HawkesN cascade modelling"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_version_flag("--version", kVersion);

    SimulateCmd simulate;
    FitCmd fit;
    GofCmd gof;
    HoldoutCmd holdout;
    PredictCmd predict;
    ConvertCmd convert;
    SizeDistCmd size_dist;
    simulate.add(app);
    fit.add(app);
    gof.add(app);
    holdout.add(app);
    predict.add(app);
    convert.add(app);
    size_dist.add(app);
    // Consumed by expand_config before parsing; registered for the help text.
    std::string config_path;
    for (CLI::App* sub : app.get_subcommands({})) {
        sub->add_option("--config", config_path, "JSON file of option defaults");
    }
    // Vector options accumulate.
    for (CLI::App* sub : app.get_subcommands({})) {
        for (const char* name : {"--pin", "--bound", "--fits"}) {
            try {
                sub->get_option(name)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
            } catch (const CLI::OptionNotFound&) {
            }
        }
    }

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
