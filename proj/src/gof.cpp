#include "sirhawkes/gof.hpp"

#include "sirhawkes/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace sirhawkes {

namespace {

constexpr std::size_t kMinSample = 5;

void require_sample(const std::vector<double>& taus, const char* test) {
    if (taus.size() < kMinSample)
        throw InsufficientSampleError(std::string(test) + " needs at least 5 residuals, got " +
                                      std::to_string(taus.size()));
    for (double t : taus) {
        if (!std::isfinite(t) || t < 0.0) throw PreconditionError(std::string(test) + ": residuals must be finite and >= 0");
    }
}

double corrected_lambda(double ne, double D) { return (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * D; }

}  // namespace

RescaledIntervals rescale(const HawkesNParams& params, const Cascade& cascade, CompensatorMethod method) {
    if (cascade.size() < 3) throw PreconditionError("rescaling needs at least 3 events");
    IntensityTrace trace = intensity_trace(params, cascade, std::nullopt, method);
    return {std::move(trace.increments)};
}

RescaledIntervals rescale(const std::function<double(double)>& compensator, const std::vector<double>& times) {
    RescaledIntervals r;
    if (times.size() < 2) return r;
    double previous = compensator(times.front());
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double current = compensator(times[i]);
        r.taus.push_back(current - previous);
        previous = current;
    }
    return r;
}

RescaledIntervals rescale_sir(const SirSpec& sir, const SirRealization& realization) {
    return {sir_compensator_increments(sir, realization)};
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Small-argument form of the CDF, converges fast where the other does not.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double cdf = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double j = 2.0 * k - 1.0;
            cdf += std::exp(-j * j * pi2 / (8.0 * lambda * lambda));
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double q = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

TestResult ks_test(const std::vector<double>& taus) {
    require_sample(taus, "KS test");
    std::vector<double> x = taus;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double D = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double F = -std::expm1(-x[i]);
        D = std::max({D, (static_cast<double>(i) + 1.0) / n - F, F - static_cast<double>(i) / n});
    }
    return {D, kolmogorov_survival(corrected_lambda(n, D))};
}

TestResult ed_test(const std::vector<double>& taus) {
    require_sample(taus, "ED test");
    const double n = static_cast<double>(taus.size());
    const double mean = std::accumulate(taus.begin(), taus.end(), 0.0) / n;
    double ss = 0.0;
    for (double t : taus) ss += (t - mean) * (t - mean);
    const double var = ss / (n - 1.0);
    const double stat = std::sqrt(n / 8.0) * (var - 1.0);
    return {stat, std::erfc(std::abs(stat) / std::numbers::sqrt2)};
}

int default_lags(std::size_t n) { return std::max(1, std::min(10, static_cast<int>(n / 5))); }

TestResult lb_test(const std::vector<double>& taus, int lags) {
    require_sample(taus, "LB test");
    const std::size_t n = taus.size();
    if (lags < 1 || static_cast<std::size_t>(lags) >= n)
        throw PreconditionError("LB test needs 1 <= lags < n");
    const double mean = std::accumulate(taus.begin(), taus.end(), 0.0) / static_cast<double>(n);
    double c0 = 0.0;
    for (double t : taus) c0 += (t - mean) * (t - mean);
    double Q = 0.0;
    if (c0 > 0.0) {
        for (int k = 1; k <= lags; ++k) {
            double ck = 0.0;
            for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i) ck += (taus[i] - mean) * (taus[i - k] - mean);
            const double r = ck / c0;
            Q += r * r / static_cast<double>(n - static_cast<std::size_t>(k));
        }
        Q *= static_cast<double>(n) * (static_cast<double>(n) + 2.0);
    }
    const double p = Q > 0.0 ? boost::math::gamma_q(0.5 * lags, 0.5 * Q) : 1.0;
    return {Q, p};
}

TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw InsufficientSampleError("two-sample KS needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double D = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    return {D, kolmogorov_survival(corrected_lambda(ne, D))};
}

GofReport::Passes GofReport::pass_at(double level) const { return {ks_p > level, ed_p > level, lb_p > level}; }

GofReport gof_report(const RescaledIntervals& r, std::optional<int> lags) {
    GofReport rep;
    rep.n = r.taus.size();
    const TestResult ks = ks_test(r.taus);
    const TestResult ed = ed_test(r.taus);
    rep.lags = lags.value_or(default_lags(rep.n));
    const TestResult lb = lb_test(r.taus, rep.lags);
    rep.ks_D = ks.statistic;
    rep.ks_p = ks.p_value;
    rep.ed_stat = ed.statistic;
    rep.ed_p = ed.p_value;
    rep.lb_Q = lb.statistic;
    rep.lb_p = lb.p_value;
    return rep;
}

Comparison compare_models(const GofReport& a, const GofReport& b, double min_gap) {
    if (std::abs(a.ks_D - b.ks_D) < min_gap) return Comparison::Tie;
    return a.ks_D < b.ks_D ? Comparison::ABetter : Comparison::BBetter;
}

const char* to_string(Comparison c) {
    switch (c) {
        case Comparison::ABetter:
            return "A_better";
        case Comparison::BBetter:
            return "B_better";
        case Comparison::Tie:
            return "tie";
    }
    return "tie";
}

}  // namespace sirhawkes
