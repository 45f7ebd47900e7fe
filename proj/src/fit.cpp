#include "sirhawkes/fit.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/optimize.hpp"
#include "sirhawkes/parallel.hpp"
#include "sirhawkes/random.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace sirhawkes {

namespace {

constexpr int kMaxRedraws = 50;
constexpr std::uint64_t kRestartLane = 7;

enum class Coord { Log, Identity };

struct ParamDef {
    std::string name;
    Coord coord = Coord::Log;
    double shift = 0.0;   // Log coordinate is log(value - shift)
    ParameterBox box{};   // natural scale
    ParameterBox init{};  // natural scale
    bool pinned = false;
    double value = 0.0;   // when pinned
};

// Maps an unconstrained-ish coordinate vector (the free parameters only) to
// named natural-scale values. Log coordinates keep positivity and N > C_max
// feasible by construction; the box is enforced by the optimizer.
class ParamSpace {
public:
    void add(ParamDef def) { defs_.push_back(std::move(def)); }

    void apply(const FitConfig& cfg) {
        for (auto& d : defs_) {
            if (auto b = cfg.bounds.find(d.name); b != cfg.bounds.end()) {
                if (!(b->second.lower <= b->second.upper))
                    throw PreconditionError("bounds for " + d.name + " are empty");
                d.box.lower = std::max(d.box.lower, b->second.lower);
                d.box.upper = std::min(d.box.upper, b->second.upper);
                if (!(d.box.lower <= d.box.upper))
                    throw PreconditionError("bounds for " + d.name + " violate the parameter domain");
                d.init.lower = std::clamp(d.init.lower, d.box.lower, d.box.upper);
                d.init.upper = std::clamp(d.init.upper, d.box.lower, d.box.upper);
            }
            if (auto p = cfg.pinned.find(d.name); p != cfg.pinned.end()) {
                d.pinned = true;
                d.value = p->second;
            }
        }
    }

    [[nodiscard]] Eigen::Index dim() const {
        return static_cast<Eigen::Index>(std::count_if(defs_.begin(), defs_.end(), [](auto& d) { return !d.pinned; }));
    }

    [[nodiscard]] Eigen::VectorXd lower() const { return bound(true); }
    [[nodiscard]] Eigen::VectorXd upper() const { return bound(false); }

    [[nodiscard]] std::map<std::string, double> natural(const Eigen::VectorXd& z) const {
        std::map<std::string, double> out;
        Eigen::Index k = 0;
        for (const auto& d : defs_) {
            if (d.pinned) {
                out[d.name] = d.value;
                continue;
            }
            double v = from_coord(d, z[k++]);
            out[d.name] = std::clamp(v, d.box.lower, d.box.upper);
        }
        return out;
    }

    [[nodiscard]] Eigen::VectorXd random_start(Rng& rng) const {
        Eigen::VectorXd z(dim());
        Eigen::Index k = 0;
        for (const auto& d : defs_) {
            if (d.pinned) continue;
            const double u = rng.uniform();
            if (d.coord == Coord::Log) {
                // Log-uniform on the natural value, then shifted; drawing in
                // log(value - shift) would pile starts onto the shift itself.
                const double v = d.init.lower * std::pow(d.init.upper / d.init.lower, u);
                z[k++] = std::log(std::max(v - d.shift, 1e-6 * std::max(1.0, d.shift)));
            } else {
                z[k++] = d.init.lower + u * (d.init.upper - d.init.lower);
            }
        }
        return z.cwiseMax(lower()).cwiseMin(upper());
    }

private:
    static double to_coord(const ParamDef& d, double v) {
        return d.coord == Coord::Log ? std::log(v - d.shift) : v;
    }
    static double from_coord(const ParamDef& d, double z) {
        return d.coord == Coord::Log ? d.shift + std::exp(z) : z;
    }

    [[nodiscard]] Eigen::VectorXd bound(bool is_lower) const {
        Eigen::VectorXd b(dim());
        Eigen::Index k = 0;
        for (const auto& d : defs_) {
            if (d.pinned) continue;
            const double v = is_lower ? d.box.lower : d.box.upper;
            b[k++] = d.coord == Coord::Log && v - d.shift <= 0.0 ? std::log(1e-12) : to_coord(d, v);
        }
        return b;
    }

    std::vector<ParamDef> defs_;
};

double as_number(const std::map<std::string, double>& m, const std::string& key, double fallback = 0.0) {
    auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

std::map<std::string, double> normalize_names(std::map<std::string, double> m) {
    if (auto g = m.find("gamma"); g != m.end()) {
        m["theta"] = g->second;
        m.erase(g);
    }
    return m;
}

FitConfig normalized(const FitConfig& cfg) {
    FitConfig out = cfg;
    out.pinned = normalize_names(cfg.pinned);
    if (auto g = out.bounds.find("gamma"); g != out.bounds.end()) {
        out.bounds["theta"] = g->second;
        out.bounds.erase(g);
    }
    return out;
}

// Shared parameter layout. `rate` is kappa for HawkesN fits and beta for SIR
// fits; theta may be pinned at 0 for the SI limit of an exp-recovery SIR.
ParamSpace build_space(const FitConfig& cfg, const std::string& rate, double c_max) {
    ParamSpace space;
    space.add({rate, Coord::Log, 0.0, {1e-8, 1e4}, {1e-2, 10.0}});
    if (cfg.family == KernelFamily::QExp) {
        space.add({"theta", Coord::Log, 1.0, {1.0 + 1e-6, 1e3}, {1.0 + 1e-2, 10.0}});
    } else {
        space.add({"theta", Coord::Log, 0.0, {1e-6, 1e3}, {1e-2, 10.0}});
    }
    if (has_offset(cfg.family)) space.add({"c", Coord::Log, 0.0, {1e-4, 1e4}, {0.1, 10.0}});
    space.add({"N", Coord::Log, c_max, {c_max + 1e-6, c_max + 1e9}, {c_max, 10.0 * c_max}});
    ParamDef rho{"rho", Coord::Identity, 0.0, {0.0, 10.0}, {0.0, 1.0}};
    if (!cfg.marked) {
        rho.pinned = true;
        rho.value = 0.0;
    }
    space.add(rho);
    space.apply(cfg);
    return space;
}

struct RestartOutcome {
    RestartRecord record;
    Eigen::VectorXd z;
};

// Runs cfg.restarts local minimizations and returns them in restart order.
std::vector<RestartOutcome> run_restarts(const ParamSpace& space, const FitConfig& cfg,
                                         const std::function<double(const std::map<std::string, double>&)>& nll) {
    const Objective objective = [&](const Eigen::VectorXd& z) { return nll(space.natural(z)); };
    OptimizerOptions options;
    options.rel_tol = cfg.tol;
    options.grad_tol = cfg.grad_tol;
    options.max_iterations = cfg.max_iterations;
    const Eigen::VectorXd lo = space.lower();
    const Eigen::VectorXd hi = space.upper();

    std::vector<RestartOutcome> out(static_cast<std::size_t>(cfg.restarts));
    parallel_for(out.size(), cfg.jobs, [&](std::size_t r) {
        Rng rng = Rng::stream(cfg.seed, r, kRestartLane);
        Eigen::VectorXd z0 = space.random_start(rng);
        for (int attempt = 0; attempt < kMaxRedraws && !std::isfinite(objective(z0)); ++attempt) {
            z0 = space.random_start(rng);
        }
        RestartOutcome& o = out[r];
        o.record.init = space.natural(z0);
        const OptimizerResult res = minimize_box(objective, z0, lo, hi, options);
        o.z = res.x;
        o.record.final = space.natural(res.x);
        o.record.final_nll = std::isfinite(res.value) ? res.value : kInf;
        o.record.iterations = res.iterations;
        o.record.converged = res.converged && std::isfinite(res.value);
    });
    return out;
}

const RestartOutcome& best_of(const std::vector<RestartOutcome>& outcomes) {
    const RestartOutcome* best = &outcomes.front();
    for (const auto& o : outcomes) {
        const double a = o.record.final_nll;
        const double b = best->record.final_nll;
        if (a < b) {
            best = &o;
        } else if (a == b &&
                   std::lexicographical_compare(o.z.begin(), o.z.end(), best->z.begin(), best->z.end())) {
            best = &o;
        }
    }
    return *best;
}

HawkesNParams hawkes_params(KernelFamily family, const std::map<std::string, double>& v) {
    HawkesNParams p;
    p.kernel.family = family;
    p.kernel.kappa = as_number(v, "kappa");
    p.kernel.theta = as_number(v, "theta");
    p.kernel.c = as_number(v, "c");
    p.N = as_number(v, "N", kInf);
    p.rho = as_number(v, "rho");
    return p;
}

std::int64_t floor_population(double N) {
    if (!std::isfinite(N)) return std::numeric_limits<std::int64_t>::max();
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(N)));
}

double max_size(const std::vector<Cascade>& cascades) {
    std::size_t m = 0;
    for (const auto& c : cascades) m = std::max(m, c.size());
    return static_cast<double>(m);
}

}  // namespace

void FitConfig::validate() const {
    if (restarts < 1) throw PreconditionError("restarts must be >= 1");
    if (!(tol > 0.0) || !(grad_tol > 0.0)) throw PreconditionError("tolerances must be > 0");
    if (max_iterations < 1) throw PreconditionError("max_iterations must be >= 1");
    if (!(alpha > 1.0)) throw ParameterDomainError("mark alpha must be > 1");
    static const std::vector<std::string> known{"kappa", "beta", "theta", "gamma", "c", "N", "rho"};
    for (const auto& [name, v] : pinned) {
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw PreconditionError("unknown parameter: " + name);
        if (!std::isfinite(v) && name != "N") throw ParameterDomainError("pinned " + name + " must be finite");
    }
    for (const auto& [name, b] : bounds) {
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw PreconditionError("unknown parameter: " + name);
    }
}

double FitResult::branching_factor() const { return sirhawkes::branching_factor(params.kernel, params.rho, alpha); }

FitResult fit_cascade(const Cascade& cascade, const FitConfig& cfg) {
    if (cascade.size() < 3) throw PreconditionError("cascade " + cascade.id + " has fewer than 3 events");
    return fit_joint({cascade}, cfg);
}

FitResult fit_joint(const std::vector<Cascade>& cascades, const FitConfig& raw) {
    if (cascades.empty()) throw PreconditionError("fit_joint needs at least one cascade");
    const FitConfig cfg = normalized(raw);
    cfg.validate();
    std::int64_t n_events = 0;
    for (const auto& c : cascades) {
        c.validate();
        n_events += static_cast<std::int64_t>(c.size());
    }
    if (n_events < 3) throw PreconditionError("fit needs at least 3 events in total");
    const double c_max = max_size(cascades);
    if (auto n = cfg.pinned.find("N"); n != cfg.pinned.end() && n->second < c_max)
        throw ParameterDomainError("pinned N is below the observed cascade size");

    const ParamSpace space = build_space(cfg, "kappa", c_max);
    auto nll = [&](const std::map<std::string, double>& v) {
        const HawkesNParams p = hawkes_params(cfg.family, v);
        try {
            p.validate();
        } catch (const std::exception&) {
            return kInf;
        }
        double total = 0.0;
        for (const auto& c : cascades) {
            const LikelihoodValue ll = hawkesn_loglik(p, c, cfg.upto);
            if (!std::isfinite(ll.loglik)) return kInf;
            total -= ll.loglik;
        }
        return total;
    };

    const auto outcomes = run_restarts(space, cfg, nll);
    const RestartOutcome& best = best_of(outcomes);

    FitResult result;
    result.params = hawkes_params(cfg.family, best.record.final);
    result.neg_loglik = best.record.final_nll;
    result.converged = best.record.converged;
    for (const auto& o : outcomes) result.restarts_summary.push_back(o.record);
    result.n_events = n_events;
    result.n_cascades = static_cast<std::int64_t>(cascades.size());
    result.alpha = cfg.alpha;
    result.sir_view = to_sir(result.params.kernel, floor_population(result.params.N), result.params.rho);
    return result;
}

SirFitResult fit_sir(const std::vector<SirRealization>& realizations, const FitConfig& raw) {
    if (realizations.empty()) throw PreconditionError("fit_sir needs at least one realization");
    const FitConfig cfg = normalized(raw);
    cfg.validate();
    std::size_t largest = 0;
    for (const auto& r : realizations) {
        r.validate();
        largest = std::max(largest, r.size());
    }
    if (largest < 2) throw PreconditionError("fit_sir needs a realization with at least 2 infections");
    const double c_max = static_cast<double>(largest);
    if (auto n = cfg.pinned.find("N"); n != cfg.pinned.end() && n->second < c_max)
        throw ParameterDomainError("pinned N is below the observed cascade size");

    const ParamSpace space = build_space(cfg, "beta", c_max);
    auto spec_of = [&](const std::map<std::string, double>& v) {
        SirSpec s;
        s.beta = as_number(v, "beta");
        s.recovery = RecoveryDistribution{cfg.family, as_number(v, "theta"), as_number(v, "c")};
        s.N = floor_population(as_number(v, "N"));
        s.rho = as_number(v, "rho");
        return s;
    };
    auto nll = [&](const std::map<std::string, double>& v) {
        const SirSpec s = spec_of(v);
        const double N = as_number(v, "N");
        double total = 0.0;
        try {
            s.validate();
            for (const auto& r : realizations) {
                const LikelihoodValue ll = sir_loglik(s, N, r, cfg.upto);
                if (!std::isfinite(ll.loglik)) return kInf;
                total -= ll.loglik;
            }
        } catch (const std::domain_error&) {
            return kInf;
        }
        return total;
    };

    const auto outcomes = run_restarts(space, cfg, nll);
    const RestartOutcome& best = best_of(outcomes);

    SirFitResult result;
    result.sir = spec_of(best.record.final);
    result.N = as_number(best.record.final, "N");
    result.neg_loglik = best.record.final_nll;
    result.converged = best.record.converged;
    for (const auto& o : outcomes) result.restarts_summary.push_back(o.record);
    if (result.sir.recovery.theta > 0.0) result.kernel_view = to_kernel(result.sir);
    return result;
}

}  // namespace sirhawkes
