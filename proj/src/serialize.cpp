#include "sirhawkes/serialize.hpp"

#include "sirhawkes/csv.hpp"
#include "sirhawkes/errors.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace sirhawkes {

namespace {

Json number(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return csv::round9(v);
}

double get_number(const Json& j, const char* key) {
    if (!j.contains(key)) throw PreconditionError(std::string("missing field \"") + key + "\"");
    const Json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        double out = 0.0;
        if (csv::parse_number(v.get<std::string>(), out)) return out;
    }
    throw PreconditionError(std::string("field \"") + key + "\" is not a number");
}

double get_number_or(const Json& j, const char* key, double fallback) {
    return j.contains(key) ? get_number(j, key) : fallback;
}

KernelFamily get_family(const Json& j) {
    if (!j.contains("family") || !j.at("family").is_string()) throw PreconditionError("missing field \"family\"");
    return parse_family(j.at("family").get<std::string>());
}

Json params_json(const std::map<std::string, double>& m) {
    Json out = Json::object();
    for (const auto& [k, v] : m) out[k] = number(v);
    return out;
}

bool parse_bool(const std::string& s) { return s == "1" || s == "true" || s == "True"; }

}  // namespace

Json to_json(const KernelSpec& spec) {
    Json j;
    j["family"] = std::string(to_string(spec.family));
    j["kappa"] = number(spec.kappa);
    j["theta"] = number(spec.theta);
    if (has_offset(spec.family)) j["c"] = number(spec.c);
    return j;
}

KernelSpec kernel_from_json(const Json& j) {
    KernelSpec s;
    s.family = get_family(j);
    s.kappa = get_number(j, "kappa");
    s.theta = get_number(j, "theta");
    s.c = get_number_or(j, "c", 0.0);
    s.validate();
    return s;
}

Json to_json(const SirSpec& sir) {
    Json j;
    j["family"] = std::string(to_string(sir.recovery.family));
    j["beta"] = number(sir.beta);
    if (sir.recovery.family == KernelFamily::Exp) {
        j["gamma"] = number(sir.recovery.theta);
    } else {
        j["theta"] = number(sir.recovery.theta);
    }
    if (has_offset(sir.recovery.family)) j["c"] = number(sir.recovery.c);
    j["N"] = sir.N;
    j["rho"] = number(sir.rho);
    return j;
}

SirSpec sir_from_json(const Json& j) {
    SirSpec s;
    s.recovery.family = j.contains("family") ? get_family(j) : KernelFamily::Exp;
    s.beta = get_number(j, "beta");
    s.recovery.theta = j.contains("gamma") ? get_number(j, "gamma") : get_number(j, "theta");
    s.recovery.c = get_number_or(j, "c", 0.0);
    s.N = static_cast<std::int64_t>(get_number(j, "N"));
    s.rho = get_number_or(j, "rho", 0.0);
    s.validate();
    return s;
}

Json to_json(const Cascade& cascade) {
    Json events = Json::array();
    for (const auto& e : cascade.events) events.push_back({{"time", number(e.time)}, {"mark", number(e.mark)}});
    return {{"id", cascade.id}, {"events", events}};
}

Cascade cascade_from_json(const Json& j) {
    if (!j.contains("events") || !j.at("events").is_array()) throw PreconditionError("missing array \"events\"");
    std::vector<Event> events;
    for (const auto& e : j.at("events")) events.push_back({get_number(e, "time"), get_number_or(e, "mark", 1.0)});
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (events[i].time < 0.0) throw ParseError(i + 1, "negative event time");
        if (events[i].mark < 1.0) throw ParseError(i + 1, "mark below 1");
    }
    std::string id = j.contains("id") ? (j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump()) : "";
    return make_cascade(std::move(id), std::move(events));
}

Json to_json(const FitResult& fit, const std::string& id) {
    Json j;
    j["cascade_id"] = id;
    j["kernel"] = to_json(fit.params.kernel);
    j["N"] = number(fit.params.N);
    j["rho"] = number(fit.params.rho);
    j["neg_loglik"] = number(fit.neg_loglik);
    j["converged"] = fit.converged;
    j["branching_factor"] = number(fit.branching_factor());
    j["n_events"] = fit.n_events;
    j["n_cascades"] = fit.n_cascades;
    j["sir_view"] = to_json(fit.sir_view);
    Json restarts = Json::array();
    for (const auto& r : fit.restarts_summary) {
        restarts.push_back({{"init", params_json(r.init)},
                            {"final", params_json(r.final)},
                            {"neg_loglik", number(r.final_nll)},
                            {"iterations", r.iterations},
                            {"converged", r.converged}});
    }
    j["restarts"] = restarts;
    return j;
}

Json to_json(const SirFitResult& fit) {
    Json j;
    j["sir"] = to_json(fit.sir);
    j["N"] = number(fit.N);
    j["neg_loglik"] = number(fit.neg_loglik);
    j["converged"] = fit.converged;
    j["kernel_view"] = fit.kernel_view ? to_json(*fit.kernel_view) : Json(nullptr);
    Json restarts = Json::array();
    for (const auto& r : fit.restarts_summary) {
        restarts.push_back({{"init", params_json(r.init)},
                            {"final", params_json(r.final)},
                            {"neg_loglik", number(r.final_nll)},
                            {"iterations", r.iterations},
                            {"converged", r.converged}});
    }
    j["restarts"] = restarts;
    return j;
}

FitSummaryRow summary_row(const FitResult& fit, const std::string& id) {
    return {id, fit.params, fit.neg_loglik, fit.branching_factor(), fit.converged};
}

void write_fit_summary(std::ostream& out, const std::vector<FitSummaryRow>& rows) {
    out << "cascade_id,family,kappa,theta,c,N,rho,nll,nstar,converged\n";
    for (const auto& r : rows) {
        const KernelSpec& k = r.params.kernel;
        out << csv::quote(r.cascade_id) << ',' << to_string(k.family) << ',' << csv::format(k.kappa) << ','
            << csv::format(k.theta) << ',' << csv::format(k.c) << ',' << csv::format(r.params.N) << ','
            << csv::format(r.params.rho) << ',' << csv::format(r.neg_loglik) << ',' << csv::format(r.branching_factor)
            << ',' << (r.converged ? "true" : "false") << '\n';
    }
}

std::vector<FitSummaryRow> read_fit_summary(std::istream& in) {
    const csv::Table table = csv::read_table(in);
    std::vector<FitSummaryRow> out;
    if (table.header.empty()) return out;
    const char* required[] = {"cascade_id", "family", "kappa", "theta", "c", "N", "rho", "nll", "converged"};
    for (const char* name : required) {
        if (table.column(name) < 0) throw ParseError(1, std::string("missing column ") + name);
    }
    auto num = [&](std::size_t r, const char* name) {
        double v = 0.0;
        if (!csv::parse_number(table.rows[r][static_cast<std::size_t>(table.column(name))], v))
            throw ParseError(table.line_numbers[r], std::string("bad number in column ") + name);
        return v;
    };
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        FitSummaryRow row;
        const auto& fields = table.rows[r];
        row.cascade_id = fields[static_cast<std::size_t>(table.column("cascade_id"))];
        try {
            row.params.kernel.family = parse_family(fields[static_cast<std::size_t>(table.column("family"))]);
        } catch (const std::exception& e) {
            throw ParseError(table.line_numbers[r], e.what());
        }
        row.params.kernel.kappa = num(r, "kappa");
        row.params.kernel.theta = num(r, "theta");
        row.params.kernel.c = num(r, "c");
        row.params.N = num(r, "N");
        row.params.rho = num(r, "rho");
        row.neg_loglik = num(r, "nll");
        row.branching_factor = table.column("nstar") >= 0 ? num(r, "nstar") : 0.0;
        row.converged = parse_bool(fields[static_cast<std::size_t>(table.column("converged"))]);
        try {
            row.params.validate();
        } catch (const std::exception& e) {
            throw ParseError(table.line_numbers[r], e.what());
        }
        out.push_back(std::move(row));
    }
    return out;
}

void save_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out = csv::open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + path.string());
}

Json load_json(const std::filesystem::path& path) {
    std::ifstream in = csv::open_input(path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw PreconditionError(path.string() + ": " + e.what());
    }
}

}  // namespace sirhawkes
