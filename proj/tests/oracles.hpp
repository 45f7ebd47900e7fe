#pragma once
// Reference computations for the tests. Nothing here calls the library's
// quadrature, compensator or simulator code.

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/kernels.hpp"
#include "sirhawkes/likelihood.hpp"
#include "sirhawkes/random.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

using sirhawkes::KernelFamily;
using sirhawkes::KernelSpec;

inline constexpr KernelFamily kAllFamilies[] = {KernelFamily::Linear, KernelFamily::Quadratic,
                                                KernelFamily::Gaussian, KernelFamily::QExp,
                                                KernelFamily::Exp,    KernelFamily::PowerLaw};

// Integral over [a, b]; b may be +inf.
inline double integral(const std::function<double(double)>& f, double a, double b) {
    if (std::isinf(b)) {
        boost::math::quadrature::exp_sinh<double> q;
        return q.integrate([&](double x) { return f(x); }, a, b, 1e-14);
    }
    if (b <= a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-12);
}

// Integral over [a, inf) in log time, s = a * e^v: power-law tails decay
// exponentially in v, which plain exp_sinh on s resolves poorly. Needs a > 0.
inline double tail_integral(const std::function<double(double)>& f, double a) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate(
        [&](double v) {
            const double s = a * std::exp(v);
            if (!std::isfinite(s)) return 0.0;
            const double fs = f(s);
            return fs == 0.0 ? 0.0 : fs * s;
        },
        0.0,
                       std::numeric_limits<double>::infinity(), 1e-14);
}

// Same, split at the listed breakpoints inside (a, b).
inline double integral(const std::function<double(double)>& f, double a, double b, std::vector<double> cuts) {
    cuts.push_back(a);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] < a || cuts[i + 1] > b || cuts[i + 1] <= cuts[i]) continue;
        s += integral(f, cuts[i], cuts[i + 1]);
    }
    return s;
}

// Five-point central difference.
inline double derivative(const std::function<double(double)>& f, double x, double h) {
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

// Table 1 kernels written out independently of the library.
inline double phi(const KernelSpec& k, double t) {
    const double th = k.theta;
    switch (k.family) {
        case KernelFamily::Linear:
            return t < 1 / th ? k.kappa * (1 - th * t) : 0.0;
        case KernelFamily::Quadratic:
            return t < 2 / th ? k.kappa * (1 - th * t / 2) * (1 - th * t / 2) : 0.0;
        case KernelFamily::Gaussian:
            return k.kappa * std::exp(-t * t / (2 * th * th));
        case KernelFamily::QExp:
            return k.kappa * std::pow(1 + (th - 1) * t, 1 / (1 - th));
        case KernelFamily::Exp:
            return k.kappa * th * std::exp(-th * t);
        case KernelFamily::PowerLaw:
            return k.kappa * std::pow(t + k.c, -(1 + th));
    }
    return 0.0;
}

inline double support_end(const KernelSpec& k) {
    if (k.family == KernelFamily::Linear) return 1 / k.theta;
    if (k.family == KernelFamily::Quadratic) return 2 / k.theta;
    return INFINITY;
}

// Parameter draws with finite branching factor.
inline KernelSpec random_kernel(KernelFamily family, sirhawkes::Rng& rng) {
    auto log_uniform = [&](double lo, double hi) { return lo * std::exp(rng.uniform() * std::log(hi / lo)); };
    KernelSpec k;
    k.family = family;
    k.kappa = log_uniform(0.05, 5.0);
    switch (family) {
        case KernelFamily::QExp:
            k.theta = 1.05 + 0.9 * rng.uniform();
            break;
        case KernelFamily::PowerLaw:
            k.theta = log_uniform(0.2, 3.0);
            k.c = log_uniform(0.1, 5.0);
            break;
        default:
            k.theta = log_uniform(0.1, 5.0);
    }
    return k;
}

// HawkesN log-likelihood straight from the definition: left-limit intensity
// at each event after the first, compensator by numerical integration of the
// piecewise intensity.
inline double hawkesn_loglik(const sirhawkes::HawkesNParams& p, const sirhawkes::Cascade& c, double upto) {
    const std::size_t n = c.size();
    auto weight = [&](std::size_t i) { return std::pow(c.events[i].mark, p.rho); };
    auto depletion = [&](std::size_t count) {
        return std::isinf(p.N) ? 1.0 : std::max(0.0, (p.N - static_cast<double>(count)) / p.N);
    };
    auto excitation = [&](double t, std::size_t count) {
        double s = 0.0;
        for (std::size_t i = 0; i < count; ++i) s += weight(i) * oracle::phi(p.kernel, t - c.events[i].time);
        return s;
    };
    double ll = 0.0;
    for (std::size_t j = 1; j < n; ++j) ll += std::log(depletion(j) * excitation(c.events[j].time, j));
    for (std::size_t j = 0; j < n; ++j) {
        const double a = c.events[j].time;
        const double b = j + 1 < n ? c.events[j + 1].time : upto;
        if (!(b > a)) continue;
        std::vector<double> cuts;
        const double end = oracle::support_end(p.kernel);
        for (std::size_t i = 0; i <= j; ++i) cuts.push_back(c.events[i].time + end);
        ll -= depletion(j + 1) * integral([&](double t) { return excitation(t, j + 1); }, a, b, cuts);
    }
    return ll;
}

// Constant-rate SIR by the two-reaction Gillespie method. Returns the final
// size and fills the infection times when asked.
inline std::int64_t gillespie_sir(double beta, double gamma, std::int64_t N, sirhawkes::Rng& rng,
                                  std::vector<double>* infection_times = nullptr) {
    std::int64_t S = N - 1, I = 1;
    double t = 0.0;
    if (infection_times) infection_times->assign(1, 0.0);
    while (I > 0) {
        const double infect = beta * static_cast<double>(S) * static_cast<double>(I) / static_cast<double>(N);
        const double recover = gamma * static_cast<double>(I);
        const double total = infect + recover;
        t += rng.exponential() / total;
        if (rng.uniform() * total < infect) {
            --S;
            ++I;
            if (infection_times) infection_times->push_back(t);
        } else {
            --I;
        }
    }
    return N - S;
}

// Labelled classic-SIR complete-data log-likelihood: with recoveries known,
// each recovery is a specific individual recovering at rate gamma, and each
// infection an event of rate beta S I / N. Covers [0, upto].
inline double classic_sir_loglik(double beta, double gamma, std::int64_t N, const sirhawkes::SirRealization& r,
                                 double upto) {
    struct Ev {
        double t;
        bool infection;
    };
    std::vector<Ev> evs;
    for (std::size_t i = 1; i < r.infections.size(); ++i) evs.push_back({r.infections[i].time, true});
    for (double rec : r.recoveries)
        if (rec <= upto) evs.push_back({rec, false});
    std::stable_sort(evs.begin(), evs.end(), [](const Ev& a, const Ev& b) {
        return a.t < b.t || (a.t == b.t && a.infection && !b.infection);
    });
    double S = static_cast<double>(N - 1), I = 1.0, t = 0.0, ll = 0.0;
    for (const Ev& e : evs) {
        ll -= (beta * S * I / static_cast<double>(N) + gamma * I) * (e.t - t);
        t = e.t;
        if (e.infection) {
            ll += std::log(beta * S * I / static_cast<double>(N));
            S -= 1;
            I += 1;
        } else {
            ll += std::log(gamma);
            I -= 1;
        }
    }
    ll -= (beta * S * I / static_cast<double>(N) + gamma * I) * (upto - t);
    return ll;
}

}  // namespace oracle
