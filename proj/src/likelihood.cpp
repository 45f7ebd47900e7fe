#include "sirhawkes/likelihood.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace sirhawkes {

namespace {

constexpr double kQuadratureTol = 1e-10;

// phi at a lag together with a primitive P such that int_a^b phi = P(a) - P(b).
struct LagValue {
    double phi;
    double primitive;
};

class LagEvaluator {
public:
    explicit LagEvaluator(const KernelSpec& spec) : spec_(spec) {
        const double theta = spec.theta;
        switch (spec.family) {
            case KernelFamily::QExp:
                q_ = (2.0 - theta) / (1.0 - theta);
                break;
            case KernelFamily::Gaussian:
                gauss_scale_ = spec.kappa * theta * std::sqrt(std::numbers::pi / 2.0);
                break;
            default:
                break;
        }
    }

    [[nodiscard]] LagValue operator()(double x) const {
        const double k = spec_.kappa;
        const double theta = spec_.theta;
        switch (spec_.family) {
            case KernelFamily::Exp: {
                const double e = k * std::exp(-theta * x);
                return {theta * e, e};
            }
            case KernelFamily::PowerLaw: {
                const double shifted = x + spec_.c;
                const double p = k / theta * std::exp(-theta * std::log(shifted));
                return {p * theta / shifted, p};
            }
            case KernelFamily::QExp: {
                const double l = std::log1p((theta - 1.0) * x);
                return {k * std::exp(l / (1.0 - theta)), k / (1.0 - theta) * expm1_ratio(l)};
            }
            case KernelFamily::Gaussian:
                return {k * std::exp(-x * x / (2.0 * theta * theta)),
                        gauss_scale_ * std::erfc(x / (theta * std::numbers::sqrt2))};
            case KernelFamily::Linear: {
                const double xc = std::min(x, 1.0 / theta);
                return {x < 1.0 / theta ? k * (1.0 - theta * x) : 0.0, -k * (xc - 0.5 * theta * xc * xc)};
            }
            case KernelFamily::Quadratic: {
                const double s = x < 2.0 / theta ? 1.0 - 0.5 * theta * x : 0.0;
                return {k * s * s, 2.0 * k / (3.0 * theta) * s * s * s};
            }
        }
        return {0.0, 0.0};
    }

    // P(+inf); +inf when the kernel has infinite mass.
    [[nodiscard]] double primitive_at_infinity() const {
        const double k = spec_.kappa;
        const double theta = spec_.theta;
        switch (spec_.family) {
            case KernelFamily::Linear:
                return -k / (2.0 * theta);
            case KernelFamily::QExp:
                return q_ < 0.0 ? -k / (2.0 - theta) : -kInf;
            default:
                return 0.0;
        }
    }

private:
    [[nodiscard]] double expm1_ratio(double l) const {
        if (q_ == 0.0) return l;
        return std::expm1(q_ * l) / q_;
    }

    KernelSpec spec_;
    double q_ = 0.0;
    double gauss_scale_ = 0.0;
};

struct Prepared {
    std::vector<double> times;
    std::vector<double> weights;
};

Prepared prepare(const HawkesNParams& params, const Cascade& cascade) {
    Prepared p;
    p.times.reserve(cascade.size());
    p.weights.reserve(cascade.size());
    for (const auto& e : cascade.events) {
        p.times.push_back(e.time);
        p.weights.push_back(params.rho == 0.0 ? 1.0 : std::pow(e.mark, params.rho));
    }
    return p;
}

// (N - count) / N, clamped at 0; 1 for the plain Hawkes limit.
double depletion(double N, std::size_t count) {
    if (std::isinf(N)) return 1.0;
    return std::max(0.0, (N - static_cast<double>(count)) / N);
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : -kInf; }

double scaled(double factor, double mass) { return factor == 0.0 ? 0.0 : factor * mass; }

void recursive_trace(const HawkesNParams& params, const Prepared& p, double upto, IntensityTrace& out) {
    const double kappa = params.kernel.kappa;
    const double theta = params.kernel.theta;
    const std::size_t n = p.times.size();
    double decayed = 0.0;  // sum_{i<j} w_i exp(-theta (t_j - t_i))
    for (std::size_t j = 1; j < n; ++j) {
        const double dt = p.times[j] - p.times[j - 1];
        const double carried = decayed + p.weights[j - 1];
        const double f = depletion(params.N, j);
        out.increments[j - 1] = scaled(f, kappa * carried * -std::expm1(-theta * dt));
        decayed = carried * std::exp(-theta * dt);
        out.log_intensity[j] = safe_log(f * kappa * theta * decayed);
    }
    const double carried = decayed + p.weights[n - 1];
    const double dt = upto - p.times[n - 1];
    const double frac = std::isinf(dt) ? 1.0 : -std::expm1(-theta * dt);
    out.tail = dt > 0.0 ? scaled(depletion(params.N, n), kappa * carried * frac) : 0.0;
}

void direct_trace(const HawkesNParams& params, const Prepared& p, double upto, IntensityTrace& out) {
    const LagEvaluator lag(params.kernel);
    const double p0 = lag(0.0).primitive;
    const std::size_t n = p.times.size();
    std::vector<double> previous(n, p0);  // P(t_{j-1} - t_i) for each source i
    for (std::size_t j = 1; j < n; ++j) {
        double rate = 0.0;
        double mass = 0.0;
        for (std::size_t i = 0; i < j; ++i) {
            const LagValue v = lag(p.times[j] - p.times[i]);
            rate += p.weights[i] * v.phi;
            mass += p.weights[i] * (previous[i] - v.primitive);
            previous[i] = v.primitive;
        }
        const double f = depletion(params.N, j);
        out.increments[j - 1] = scaled(f, mass);
        out.log_intensity[j] = safe_log(f * rate);
    }
    if (upto > p.times[n - 1]) {
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double end = std::isinf(upto) ? lag.primitive_at_infinity() : lag(upto - p.times[i]).primitive;
            mass += p.weights[i] * (previous[i] - end);
        }
        out.tail = scaled(depletion(params.N, n), mass);
    }
}

// Integral over [a, b] of sum_{i < count} w_i phi(tau - t_i), split at the
// support ends of bounded kernels.
double segment_quadrature(const HawkesNParams& params, const Prepared& p, std::size_t count, double a, double b) {
    const KernelSpec& spec = params.kernel;
    auto rate = [&](double tau) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            const double lag = tau - p.times[i];
            if (lag >= 0.0) s += p.weights[i] * phi(spec, lag);
        }
        return s;
    };
    const double end = support_end(spec);
    std::vector<double> cuts{a};
    if (std::isfinite(end)) {
        for (std::size_t i = 0; i < count; ++i) {
            const double c = p.times[i] + end;
            if (c > a && c < b) cuts.push_back(c);
        }
        if (std::isinf(b)) {
            double last = a;
            for (std::size_t i = 0; i < count; ++i) last = std::max(last, p.times[i] + end);
            b = last;
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        if (cuts[k + 1] > cuts[k]) total += integrate(rate, cuts[k], cuts[k + 1], kQuadratureTol).value;
    }
    return total;
}

void quadrature_trace(const HawkesNParams& params, const Prepared& p, double upto, IntensityTrace& out) {
    const std::size_t n = p.times.size();
    for (std::size_t j = 1; j < n; ++j) {
        const double f = depletion(params.N, j);
        out.increments[j - 1] = scaled(f, segment_quadrature(params, p, j, p.times[j - 1], p.times[j]));
        double rate = 0.0;
        for (std::size_t i = 0; i < j; ++i) rate += p.weights[i] * phi(params.kernel, p.times[j] - p.times[i]);
        out.log_intensity[j] = safe_log(f * rate);
    }
    if (upto > p.times[n - 1]) {
        if (std::isinf(upto) && std::isinf(kernel_integral(params.kernel, 0.0, kInf))) {
            out.tail = scaled(depletion(params.N, n), kInf);
        } else {
            out.tail = scaled(depletion(params.N, n), segment_quadrature(params, p, n, p.times[n - 1], upto));
        }
    }
}

double sum_loglik(const IntensityTrace& trace, std::size_t first_scored, std::size_t first_increment) {
    double ll = 0.0;
    for (std::size_t j = first_scored; j < trace.log_intensity.size(); ++j) ll += trace.log_intensity[j];
    for (std::size_t k = first_increment; k < trace.increments.size(); ++k) ll -= trace.increments[k];
    ll -= trace.tail;
    return std::isnan(ll) ? -kInf : ll;
}

}  // namespace

void HawkesNParams::validate() const {
    kernel.validate();
    if (!(N > 0.0)) throw ParameterDomainError("N must be > 0");
    if (!(std::isfinite(rho) && rho >= 0.0)) throw ParameterDomainError("rho must be finite and >= 0");
}

LikelihoodValue LikelihoodValue::make(double loglik, std::int64_t n_events) {
    LikelihoodValue v;
    v.impossible = !(loglik > -kInf) || std::isnan(loglik);
    v.loglik = v.impossible ? -kInf : loglik;
    v.n_events = n_events;
    v.per_event = n_events > 0 ? v.loglik / static_cast<double>(n_events) : 0.0;
    return v;
}

IntensityTrace intensity_trace(const HawkesNParams& params, const Cascade& cascade, std::optional<double> upto,
                               CompensatorMethod method) {
    params.validate();
    if (cascade.events.empty()) throw PreconditionError("cascade is empty");
    const double end = upto.value_or(cascade.last_time());
    if (!(end >= cascade.last_time())) throw PreconditionError("upto precedes the last event");

    if (method == CompensatorMethod::Auto) {
        switch (params.kernel.family) {
            case KernelFamily::Exp:
                method = CompensatorMethod::Recursive;
                break;
            case KernelFamily::PowerLaw:
            case KernelFamily::QExp:
                method = CompensatorMethod::Direct;
                break;
            default:
                method = CompensatorMethod::Quadrature;
                break;
        }
    }
    if (method == CompensatorMethod::Recursive && params.kernel.family != KernelFamily::Exp) {
        throw PreconditionError("recursive compensator is only available for the exp kernel");
    }

    const Prepared p = prepare(params, cascade);
    IntensityTrace trace;
    trace.log_intensity.assign(p.times.size(), 0.0);
    trace.increments.assign(p.times.size() - 1, 0.0);
    switch (method) {
        case CompensatorMethod::Recursive:
            recursive_trace(params, p, end, trace);
            break;
        case CompensatorMethod::Direct:
            direct_trace(params, p, end, trace);
            break;
        default:
            quadrature_trace(params, p, end, trace);
            break;
    }
    return trace;
}

double hawkesn_intensity(const HawkesNParams& params, const Cascade& cascade, double t) {
    params.validate();
    if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
    std::size_t before = 0;
    double rate = 0.0;
    for (const auto& e : cascade.events) {
        if (!(e.time < t)) break;
        ++before;
        const double w = params.rho == 0.0 ? 1.0 : std::pow(e.mark, params.rho);
        rate += w * phi(params.kernel, t - e.time);
    }
    if (before == 0) return 0.0;
    return depletion(params.N, before) * rate;
}

double hawkesn_compensator(const HawkesNParams& params, const Cascade& cascade, double t) {
    const Cascade prefix = cascade.observed_until(t);
    if (prefix.events.empty()) return 0.0;
    const IntensityTrace trace = intensity_trace(params, prefix, t);
    return std::accumulate(trace.increments.begin(), trace.increments.end(), 0.0) + trace.tail;
}

LikelihoodValue hawkesn_loglik(const HawkesNParams& params, const Cascade& cascade, std::optional<double> upto,
                               CompensatorMethod method) {
    const IntensityTrace trace = intensity_trace(params, cascade, upto, method);
    return LikelihoodValue::make(sum_loglik(trace, 1, 0), static_cast<std::int64_t>(cascade.size()));
}

std::size_t holdout_train_count(std::size_t n_events, double split_fraction) {
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw PreconditionError("split_fraction must be in (0, 1)");
    return static_cast<std::size_t>(std::ceil(split_fraction * static_cast<double>(n_events) - 1e-9));
}

LikelihoodValue holdout_loglik(const HawkesNParams& params, const Cascade& cascade, double split_fraction,
                               CompensatorMethod method) {
    const std::size_t n = cascade.size();
    const std::size_t train = holdout_train_count(n, split_fraction);
    if (train < 2 || n < train + 2) {
        throw PreconditionError("holdout split leaves fewer than 2 events on one side (n=" + std::to_string(n) +
                                ", train=" + std::to_string(train) + ")");
    }
    const auto held = static_cast<std::int64_t>(n - train);
    if (params.N < static_cast<double>(train)) return LikelihoodValue::make(-kInf, held);
    const IntensityTrace trace = intensity_trace(params, cascade, std::nullopt, method);
    return LikelihoodValue::make(sum_loglik(trace, train, train - 1), held);
}

double sir_intensity(const SirSpec& sir, const SirRealization& realization, double t) {
    sir.validate();
    std::int64_t infected_before = 0;
    double active = 0.0;
    for (std::size_t i = 0; i < realization.infections.size(); ++i) {
        const auto& e = realization.infections[i];
        if (!(e.time < t)) break;
        ++infected_before;
        if (!(realization.recoveries[i] < t)) active += sir.rho == 0.0 ? 1.0 : std::pow(e.mark, sir.rho);
    }
    const double susceptible = static_cast<double>(sir.N - infected_before);
    if (susceptible <= 0.0) return 0.0;
    return sir.beta * susceptible / static_cast<double>(sir.N) * active;
}

namespace {

struct SirEvent {
    double time;
    bool infection;
    std::size_t index;
};

// Walks infections and recoveries in time order, calling on_event with the
// compensator accumulated since the previous event.
template <typename OnEvent>
double sir_walk(const SirSpec& sir, double N, const SirRealization& realization, double upto, OnEvent on_event) {
    std::vector<SirEvent> events;
    events.reserve(2 * realization.size());
    for (std::size_t i = 0; i < realization.size(); ++i) {
        if (realization.infections[i].time <= upto) events.push_back({realization.infections[i].time, true, i});
        if (realization.recoveries[i] <= upto) events.push_back({realization.recoveries[i], false, i});
    }
    std::stable_sort(events.begin(), events.end(), [](const SirEvent& a, const SirEvent& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.infection && !b.infection;
    });
    std::int64_t cumulative = 0;
    std::int64_t infected = 0;
    double active = 0.0;
    double last = 0.0;
    auto rate = [&] { return infected == 0 ? 0.0 : sir.beta * std::max(0.0, N - cumulative) / N * active; };
    for (const auto& ev : events) {
        const double r = rate();
        const double mass = r == 0.0 ? 0.0 : r * (ev.time - last);
        on_event(ev, mass, r);
        const double w = sir.rho == 0.0 ? 1.0 : std::pow(realization.infections[ev.index].mark, sir.rho);
        if (ev.infection) {
            ++cumulative;
            ++infected;
            active += w;
        } else {
            --infected;
            active = infected == 0 ? 0.0 : active - w;
        }
        last = ev.time;
    }
    const double r = rate();
    return r == 0.0 ? 0.0 : r * (upto - last);
}

double default_sir_upto(const SirRealization& realization) {
    double end = realization.infections.back().time;
    for (double r : realization.recoveries) {
        if (std::isfinite(r)) end = std::max(end, r);
    }
    return end;
}

}  // namespace

LikelihoodValue sir_loglik(const SirSpec& sir, const SirRealization& realization, std::optional<double> upto) {
    return sir_loglik(sir, static_cast<double>(sir.N), realization, upto);
}

LikelihoodValue sir_loglik(const SirSpec& sir, double population, const SirRealization& realization,
                           std::optional<double> upto) {
    sir.validate();
    realization.validate();
    if (!(population > 0.0)) throw ParameterDomainError("population must be > 0");
    if (static_cast<double>(realization.size()) > population) return LikelihoodValue::make(-kInf, 0);
    const double end = upto.value_or(default_sir_upto(realization));
    if (!(end >= realization.infections.back().time)) throw PreconditionError("upto precedes the last infection");

    double ll = 0.0;
    std::int64_t scored = 0;
    const double tail = sir_walk(sir, population, realization, end, [&](const SirEvent& ev, double mass, double rate) {
        ll -= mass;
        if (ev.infection) {
            if (ev.index > 0) {
                ll += safe_log(rate);
                ++scored;
            }
        } else {
            ll += safe_log(sir.recovery.density(realization.recoveries[ev.index] -
                                                realization.infections[ev.index].time));
        }
    });
    ll -= tail;
    return LikelihoodValue::make(std::isnan(ll) ? -kInf : ll, scored);
}

std::vector<double> sir_compensator_increments(const SirSpec& sir, const SirRealization& realization) {
    sir.validate();
    realization.validate();
    std::vector<double> out;
    out.reserve(realization.size());
    double accumulated = 0.0;
    sir_walk(sir, static_cast<double>(sir.N), realization, realization.infections.back().time,
             [&](const SirEvent& ev, double mass, double) {
                 accumulated += mass;
                 if (ev.infection && ev.index > 0) {
                     out.push_back(accumulated);
                     accumulated = 0.0;
                 }
             });
    return out;
}

}  // namespace sirhawkes
