#include "oracles.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/gof.hpp"
#include "sirhawkes/simulate.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace sirhawkes;
using doctest::Approx;

namespace {

SimConfig exp_config(double beta, double gamma, std::int64_t N, std::uint64_t seed) {
    SimConfig cfg;
    cfg.sir.beta = beta;
    cfg.sir.recovery = {KernelFamily::Exp, gamma, 0};
    cfg.sir.N = N;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> final_sizes(const std::vector<SirRealization>& rs) {
    std::vector<double> out;
    for (const auto& r : rs) out.push_back(static_cast<double>(r.size()));
    return out;
}

}  // namespace

TEST_CASE("single individual") {
    const SirRealization r = simulate_sir(exp_config(2.0, 1.0, 1, 3));
    REQUIRE(r.size() == 1);
    CHECK(r.infections[0].time == 0.0);
    CHECK(r.recoveries[0] > 0.0);
    CHECK(std::isfinite(r.recoveries[0]));
}

TEST_CASE("zero infection rate") {
    for (std::uint64_t run = 0; run < 20; ++run) {
        const SirRealization r = simulate_sir(exp_config(0.0, 1.0, 50, 3), run);
        CHECK(r.size() == 1);
        CHECK(r.recoveries[0] > 0.0);
    }
}

TEST_CASE("reproducible and independent of worker count") {
    const SimConfig cfg = exp_config(2.5, 0.5, 200, 42);
    CHECK(simulate_sir(cfg, 5) == simulate_sir(cfg, 5));
    CHECK(simulate_batch(cfg, 16, 1) == simulate_batch(cfg, 16, 3));
}

TEST_CASE("recoveries follow infections") {
    for (KernelFamily fam : oracle::kAllFamilies) {
        SimConfig cfg;
        cfg.sir.beta = 1.5;
        cfg.sir.N = 100;
        cfg.sir.recovery = {fam, fam == KernelFamily::QExp ? 1.5 : 0.8, fam == KernelFamily::PowerLaw ? 2.0 : 0.0};
        cfg.seed = 9;
        for (const auto& r : simulate_batch(cfg, 20)) {
            CHECK_NOTHROW(r.validate());
            for (std::size_t i = 0; i < r.size(); ++i) {
                CHECK(r.recoveries[i] > r.infections[i].time);
                const double end = support_end(to_kernel(cfg.sir));
                if (std::isfinite(end)) CHECK(r.recoveries[i] - r.infections[i].time <= end);
            }
            for (std::size_t i = 1; i < r.size(); ++i) CHECK(r.infections[i].time > r.infections[i - 1].time);
        }
    }
}

TEST_CASE("event cap and horizon") {
    SimConfig cfg = exp_config(5.0, 0.1, 1000, 1);
    cfg.max_events = 25;
    CHECK(simulate_sir(cfg).size() <= 25);
    cfg.max_events = 1'000'000;
    cfg.horizon = 0.5;
    for (const auto& e : simulate_sir(cfg).infections) CHECK(e.time <= 0.5);
}

TEST_CASE("mark sampling") {
    CHECK(sample_mark(0.5, 2.016) == Approx(std::pow(0.5, -1.0 / 1.016)).epsilon(1e-12));
    CHECK(sample_mark(0.5, 2.016) == Approx(1.978).epsilon(1e-3));
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) CHECK(sample_mark(rng.uniform(), 2.016) >= 1.0);
    CHECK_THROWS_AS((void)sample_mark(0.5, 1.0), ParameterDomainError);
    CHECK_THROWS_AS((void)simulate_marked(exp_config(1, 1, 10, 0), 0.9), ParameterDomainError);
}

TEST_CASE("rho = 0 marks leave event times unchanged") {
    SimConfig cfg = exp_config(2.0, 0.7, 150, 77);
    for (std::uint64_t run = 0; run < 10; ++run) {
        const SirRealization plain = simulate_sir(cfg, run);
        const SirRealization marked = simulate_marked(cfg, 2.016, run);
        REQUIRE(plain.size() == marked.size());
        for (std::size_t i = 0; i < plain.size(); ++i) {
            CHECK(plain.infections[i].time == marked.infections[i].time);
            CHECK(plain.recoveries[i] == marked.recoveries[i]);
        }
    }
}

TEST_CASE("mean final size agrees with the Gillespie oracle") {
    const int runs = 1000;
    const auto sim = final_sizes(simulate_batch(exp_config(2.5, 0.5, 200, 11), runs));
    Rng rng(12345);
    std::vector<double> ref;
    for (int i = 0; i < runs; ++i) ref.push_back(static_cast<double>(oracle::gillespie_sir(2.5, 0.5, 200, rng)));
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    auto var = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / (v.size() - 1);
    };
    const double se = std::sqrt(var(sim) / runs + var(ref) / runs);
    CHECK(std::abs(mean(sim) - mean(ref)) < 2.576 * se);
}

TEST_CASE("k-th infection time agrees with the Gillespie oracle") {
    const std::size_t k = 10;
    std::vector<double> sim, ref;
    for (const auto& r : simulate_batch(exp_config(1.5, 0.5, 200, 21), 1000))
        if (r.size() > k) sim.push_back(r.infections[k].time);
    Rng rng(99);
    std::vector<double> times;
    for (int i = 0; i < 1000; ++i) {
        oracle::gillespie_sir(1.5, 0.5, 200, rng, &times);
        if (times.size() > k) ref.push_back(times[k]);
    }
    REQUIRE(sim.size() > 200);
    CHECK(ks_two_sample(sim, ref).p_value > 0.01);
}

TEST_CASE("size distribution basics") {
    SirSpec s{0.0, {KernelFamily::Exp, 1.0, 0}, 30, 0};
    const SizeDistribution d = size_distribution(s, 200, 5);
    CHECK(d.pmf(1) == 1.0);
    CHECK(d.cdf(1) == 1.0);
    CHECK(d.mean() == 1.0);
    // Laplace smoothing over [1, N].
    CHECK(d.likelihood(1) == Approx(201.0 / 230.0));
    CHECK(d.likelihood(7) == Approx(1.0 / 230.0));

    SirSpec live{2.0, {KernelFamily::Exp, 0.8, 0}, 40, 0};
    const SizeDistribution e = size_distribution(live, 500, 6);
    double prev = 0.0;
    for (std::int64_t n = 1; n <= 40; ++n) {
        CHECK(e.cdf(n) >= prev);
        prev = e.cdf(n);
    }
    CHECK(e.cdf(40) == Approx(1.0));
}

TEST_CASE("two-individual race") {
    // One infective, one susceptible: infection at rate beta/2 races recovery at gamma.
    const double beta = 1.3, gamma = 1.3;
    const double exact = (beta / 2) / (beta / 2 + gamma);
    const SizeDistribution d = size_distribution(SirSpec{beta, {KernelFamily::Exp, gamma, 0}, 2, 0}, 5000, 8);
    CHECK(std::abs(d.pmf(2) - exact) < 0.02);
    CHECK(std::abs(d.pmf(2) - 1.0 / 3.0) < 0.02);
}

TEST_CASE("kernel-side size distribution floors N") {
    const SizeDistribution d = size_distribution(KernelSpec{KernelFamily::Exp, 1.5, 1.0, 0}, 25.7, 300, 3);
    CHECK(d.N == 25);
    CHECK(d.cdf(25) == Approx(1.0));
}

TEST_CASE("infection residuals with known recoveries are unit exponential") {
    SimConfig cfg = exp_config(5.0, 1.0, 150, 31);
    cfg.sir.recovery = {KernelFamily::PowerLaw, 1.5, 1.0};
    int tested = 0, passed = 0;
    for (const auto& r : simulate_batch(cfg, 1200)) {
        if (r.size() < 20) continue;
        const auto taus = rescale_sir(cfg.sir, r).taus;
        ++tested;
        if (ks_test(taus).p_value > 0.01) ++passed;
        if (tested == 500) break;
    }
    REQUIRE(tested >= 300);
    CHECK(static_cast<double>(passed) / tested >= 0.95);
}

// Supercritical with finite N so each cascade exhausts its compensator; an extinct
// cascade drops the overshooting draw and biases its residuals low.
TEST_CASE("HawkesN cascades rescale to unit exponential under the true parameters") {
    const HawkesNParams p{{KernelFamily::PowerLaw, 20.0, 1.0, 2.0}, 300, 0};
    std::vector<double> all;
    HawkesSimConfig cfg;
    cfg.seed = 8;
    for (std::uint64_t run = 0; run < 60; ++run) {
        const Cascade c = simulate_hawkesn(p, cfg, run);
        if (c.size() < 3) continue;
        const auto taus = rescale(p, c).taus;
        all.insert(all.end(), taus.begin(), taus.end());
    }
    REQUIRE(all.size() > 100);
    const double n = static_cast<double>(all.size());
    const double mean = std::accumulate(all.begin(), all.end(), 0.0) / n;
    CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(n));
    CHECK(ks_test(all).p_value > 0.01);
}

TEST_CASE("HawkesN simulation respects the population cap") {
    const HawkesNParams p{{KernelFamily::Exp, 5.0, 1.0, 0}, 40, 0};
    HawkesSimConfig cfg;
    for (std::uint64_t run = 0; run < 20; ++run) CHECK(simulate_hawkesn(p, cfg, run).size() <= 40);
}
