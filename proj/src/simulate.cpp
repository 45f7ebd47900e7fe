#include "sirhawkes/simulate.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/parallel.hpp"
#include "sirhawkes/random.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace sirhawkes {

namespace {

constexpr std::uint64_t kMainLane = 0;
constexpr std::uint64_t kMarkLane = 1;

struct PendingRecovery {
    double time;
    double weight;
    bool operator>(const PendingRecovery& o) const { return time > o.time; }
};

SirRealization run_sir(const SimConfig& cfg, std::optional<double> alpha, std::uint64_t run) {
    const SirSpec& sir = cfg.sir;
    sir.validate();
    if (cfg.max_events < 1) throw PreconditionError("max_events must be >= 1");
    Rng rng = Rng::stream(cfg.seed, run, kMainLane);
    Rng mark_rng = Rng::stream(cfg.seed, run, kMarkLane);
    const double N = static_cast<double>(sir.N);

    auto draw_mark = [&] { return alpha ? sample_mark(mark_rng.uniform(), *alpha) : 1.0; };
    auto weight_of = [&](double mark) { return sir.rho == 0.0 ? 1.0 : std::pow(mark, sir.rho); };

    SirRealization out;
    out.id = std::to_string(run);
    std::priority_queue<PendingRecovery, std::vector<PendingRecovery>, std::greater<>> pending;
    std::int64_t active = 0;
    double active_weight = 0.0;

    auto infect = [&](double t) {
        const double eta = sir.recovery.quantile(rng.uniform());
        const double mark = draw_mark();
        const double w = weight_of(mark);
        out.infections.push_back({t, mark});
        out.recoveries.push_back(t + eta);
        pending.push({t + eta, w});
        ++active;
        active_weight += w;
    };

    infect(0.0);
    double now = 0.0;
    while (static_cast<std::int64_t>(out.infections.size()) < std::min(sir.N, cfg.max_events)) {
        double s = rng.exponential();
        const double susceptible = N - static_cast<double>(out.infections.size());
        const double per_weight = sir.beta * susceptible / N;
        bool exhausted = false;
        // Consume the unit-rate draw across piecewise-constant segments.
        while (true) {
            const double rate = active == 0 ? 0.0 : per_weight * active_weight;
            if (rate <= 0.0) {
                exhausted = true;
                break;
            }
            const double next_recovery = pending.top().time;
            const double mass = std::isinf(next_recovery) ? kInf : rate * (next_recovery - now);
            if (s <= mass) {
                now += s / rate;
                break;
            }
            s -= mass;
            now = next_recovery;
            const double w = pending.top().weight;
            pending.pop();
            --active;
            active_weight = active == 0 ? 0.0 : active_weight - w;
        }
        if (exhausted) break;
        if (cfg.horizon && now > *cfg.horizon) break;
        infect(now);
    }
    return out;
}

}  // namespace

double sample_mark(double u, double alpha) {
    if (!(alpha > 1.0)) throw ParameterDomainError("mark exponent alpha must be > 1");
    if (!(u > 0.0 && u < 1.0)) throw PreconditionError("sample_mark needs u in (0, 1)");
    return std::max(1.0, std::exp(-std::log1p(-u) / (alpha - 1.0)));
}

SirRealization simulate_sir(const SimConfig& cfg, std::uint64_t run) { return run_sir(cfg, std::nullopt, run); }

SirRealization simulate_marked(const SimConfig& cfg, double alpha, std::uint64_t run) {
    if (!(alpha > 1.0)) throw ParameterDomainError("mark exponent alpha must be > 1");
    return run_sir(cfg, alpha, run);
}

std::vector<SirRealization> simulate_batch(const SimConfig& cfg, std::size_t runs, unsigned jobs,
                                           std::optional<double> mark_alpha) {
    if (mark_alpha && !(*mark_alpha > 1.0)) throw ParameterDomainError("mark exponent alpha must be > 1");
    std::vector<SirRealization> out(runs);
    parallel_for(runs, jobs, [&](std::size_t r) { out[r] = run_sir(cfg, mark_alpha, r); });
    return out;
}

Cascade simulate_hawkesn(const HawkesNParams& params, const HawkesSimConfig& cfg, std::uint64_t run) {
    params.validate();
    if (cfg.max_events < 1) throw PreconditionError("max_events must be >= 1");
    if (cfg.mark_alpha && !(*cfg.mark_alpha > 1.0)) throw ParameterDomainError("mark exponent alpha must be > 1");
    Rng rng = Rng::stream(cfg.seed, run, kMainLane);
    Rng mark_rng = Rng::stream(cfg.seed, run, kMarkLane);
    const KernelSpec& kernel = params.kernel;

    Cascade out{std::to_string(run), {}};
    std::vector<double> weights;
    auto add_event = [&](double t) {
        const double mark = cfg.mark_alpha ? sample_mark(mark_rng.uniform(), *cfg.mark_alpha) : 1.0;
        out.events.push_back({t, mark});
        weights.push_back(params.rho == 0.0 ? 1.0 : std::pow(mark, params.rho));
    };
    add_event(0.0);

    while (static_cast<std::int64_t>(out.events.size()) < cfg.max_events) {
        const auto n = out.events.size();
        const double depletion = std::isinf(params.N) ? 1.0 : (params.N - static_cast<double>(n)) / params.N;
        if (depletion <= 0.0) break;
        const double last = out.events.back().time;
        const double s = rng.exponential();
        double dt = 0.0;
        if (kernel.family == KernelFamily::Exp) {
            double decayed = 0.0;
            for (std::size_t i = 0; i < n; ++i) decayed += weights[i] * std::exp(-kernel.theta * (last - out.events[i].time));
            const double total = depletion * kernel.kappa * decayed;
            if (!(s < total)) break;
            dt = -std::log1p(-s / total) / kernel.theta;
        } else {
            // Compensator mass over (last, last + x] and its derivative.
            auto mass = [&](double x) {
                double m = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double lag = last - out.events[i].time;
                    m += weights[i] * kernel_integral(kernel, lag, lag + x);
                }
                return depletion * m;
            };
            auto rate = [&](double x) {
                double r = 0.0;
                for (std::size_t i = 0; i < n; ++i) r += weights[i] * phi(kernel, last + x - out.events[i].time);
                return depletion * r;
            };
            if (!(s < mass(kInf))) break;
            double lo = 0.0;
            double hi = 1.0;
            while (mass(hi) < s) {
                lo = hi;
                hi *= 2.0;
            }
            // Safeguarded Newton on the bracket [lo, hi].
            dt = 0.5 * (lo + hi);
            for (int it = 0; it < 100; ++it) {
                const double g = mass(dt) - s;
                if (std::abs(g) <= 1e-13 * s) break;
                (g < 0.0 ? lo : hi) = dt;
                const double slope = rate(dt);
                double next = slope > 0.0 ? dt - g / slope : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
                dt = next;
            }
        }
        const double t = last + dt;
        if (cfg.horizon && t > *cfg.horizon) break;
        add_event(std::max(t, std::nextafter(last, kInf)));
    }
    return out;
}

double SizeDistribution::pmf(std::int64_t n) const {
    if (n < 1 || n > N || runs == 0) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(n - 1)]) / static_cast<double>(runs);
}

double SizeDistribution::cdf(std::int64_t n) const {
    if (n < 1) return 0.0;
    n = std::min(n, N);
    std::int64_t total = 0;
    for (std::int64_t k = 1; k <= n; ++k) total += counts[static_cast<std::size_t>(k - 1)];
    return runs == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(runs);
}

double SizeDistribution::likelihood(std::int64_t n) const {
    if (n < 1 || n > N) return 0.0;
    return static_cast<double>(counts[static_cast<std::size_t>(n - 1)] + 1) / static_cast<double>(runs + N);
}

double SizeDistribution::mean() const {
    double total = 0.0;
    for (std::int64_t k = 1; k <= N; ++k) total += static_cast<double>(k * counts[static_cast<std::size_t>(k - 1)]);
    return runs == 0 ? 0.0 : total / static_cast<double>(runs);
}

SizeDistribution size_distribution(const SirSpec& sir, std::int64_t runs, std::uint64_t seed, unsigned jobs,
                                   std::optional<double> mark_alpha) {
    sir.validate();
    if (runs < 1) throw PreconditionError("runs must be >= 1");
    SimConfig cfg{sir, seed, 1'000'000, std::nullopt};
    std::vector<std::int64_t> sizes(static_cast<std::size_t>(runs));
    parallel_for(sizes.size(), jobs, [&](std::size_t r) {
        sizes[r] = static_cast<std::int64_t>(run_sir(cfg, mark_alpha, r).size());
    });
    SizeDistribution dist;
    dist.N = sir.N;
    dist.runs = runs;
    dist.counts.assign(static_cast<std::size_t>(sir.N), 0);
    for (auto s : sizes) ++dist.counts[static_cast<std::size_t>(s - 1)];
    return dist;
}

SizeDistribution size_distribution(const KernelSpec& kernel, double N, std::int64_t runs, std::uint64_t seed,
                                   unsigned jobs) {
    if (!(N >= 1.0)) throw PreconditionError("N must be >= 1");
    return size_distribution(to_sir(kernel, static_cast<std::int64_t>(std::floor(N))), runs, seed, jobs);
}

}  // namespace sirhawkes
