#include "oracles.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/fit.hpp"
#include "sirhawkes/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace sirhawkes;
using doctest::Approx;

namespace {

std::vector<Cascade> hawkesn_batch(const HawkesNParams& p, std::size_t count, std::uint64_t seed) {
    HawkesSimConfig cfg;
    cfg.seed = seed;
    std::vector<Cascade> out;
    for (std::uint64_t run = 0; run < count; ++run) out.push_back(simulate_hawkesn(p, cfg, run));
    return out;
}

Cascade one_cascade() {
    const HawkesNParams p{{KernelFamily::Exp, 3.0, 1.0, 0}, 120, 0};
    HawkesSimConfig cfg;
    cfg.seed = 4;
    return simulate_hawkesn(p, cfg);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("configuration validation") {
    FitConfig cfg;
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    cfg.restarts = 1;
    cfg.pinned["delta"] = 1.0;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    cfg.pinned.clear();
    cfg.bounds["kappa"] = {2.0, 1.0};
    CHECK_THROWS((void)fit_cascade(one_cascade(), cfg));
}

TEST_CASE("fewer than three events is a precondition error") {
    const Cascade two = make_cascade("two", {{0, 1}, {1, 1}});
    CHECK_THROWS_AS((void)fit_cascade(two, FitConfig{}), PreconditionError);
    CHECK_THROWS_AS((void)fit_joint({}, FitConfig{}), PreconditionError);
}

TEST_CASE("pinned offset never moves") {
    const HawkesNParams p{{KernelFamily::PowerLaw, 6.0, 1.0, 2.0}, 150, 0};
    FitConfig cfg;
    cfg.family = KernelFamily::PowerLaw;
    cfg.pinned["c"] = 2.0;
    cfg.restarts = 4;
    const FitResult r = fit_joint(hawkesn_batch(p, 5, 12), cfg);
    CHECK(r.params.kernel.c == 2.0);
    for (const auto& rec : r.restarts_summary) {
        CHECK(rec.init.at("c") == 2.0);
        CHECK(rec.final.at("c") == 2.0);
    }
}

TEST_CASE("result satisfies the parameter constraints") {
    const Cascade c = one_cascade();
    for (KernelFamily fam : oracle::kAllFamilies) {
        CAPTURE(to_string(fam));
        FitConfig cfg;
        cfg.family = fam;
        cfg.restarts = 3;
        const FitResult r = fit_cascade(c, cfg);
        CHECK_NOTHROW(r.params.validate());
        CHECK(r.params.N >= static_cast<double>(c.size()));
        CHECK(std::isfinite(r.neg_loglik));
        CHECK(r.sir_view == to_sir(r.params.kernel, static_cast<std::int64_t>(std::floor(r.params.N)), r.params.rho));
        CHECK(r.n_events == static_cast<std::int64_t>(c.size()));
        // The reported optimum is the best restart.
        for (const auto& rec : r.restarts_summary) CHECK(r.neg_loglik <= rec.final_nll);
        CHECK(r.neg_loglik == Approx(-hawkesn_loglik(r.params, c).loglik).epsilon(1e-9));
    }
}

TEST_CASE("k identical copies share the single-cascade argmin") {
    const Cascade c = one_cascade();
    FitConfig cfg;
    cfg.restarts = 5;
    const FitResult single = fit_cascade(c, cfg);
    const FitResult triple = fit_joint({c, c, c}, cfg);
    CHECK(rel(triple.params.kernel.kappa, single.params.kernel.kappa) < 1e-3);
    CHECK(rel(triple.params.kernel.theta, single.params.kernel.theta) < 1e-3);
    CHECK(rel(triple.params.N, single.params.N) < 1e-3);
    CHECK(triple.neg_loglik == Approx(3 * single.neg_loglik).epsilon(1e-6));
}

TEST_CASE("identical configuration gives an identical result") {
    const Cascade c = one_cascade();
    FitConfig cfg;
    cfg.family = KernelFamily::PowerLaw;
    cfg.restarts = 3;
    cfg.seed = 19;
    const FitResult a = fit_cascade(c, cfg);
    cfg.jobs = 2;
    const FitResult b = fit_cascade(c, cfg);
    CHECK(a.params == b.params);
    CHECK(a.neg_loglik == b.neg_loglik);
    REQUIRE(a.restarts_summary.size() == b.restarts_summary.size());
    for (std::size_t i = 0; i < a.restarts_summary.size(); ++i)
        CHECK(a.restarts_summary[i].final == b.restarts_summary[i].final);
}

TEST_CASE("best-of-k restarts is non-increasing in k") {
    const Cascade c = one_cascade();
    FitConfig cfg;
    cfg.family = KernelFamily::QExp;
    cfg.seed = 5;
    double previous = INFINITY;
    std::vector<RestartRecord> pool;
    for (int k = 1; k <= 6; ++k) {
        cfg.restarts = k;
        const FitResult r = fit_cascade(c, cfg);
        CHECK(r.neg_loglik <= previous);
        previous = r.neg_loglik;
        // Earlier restarts are replayed unchanged.
        for (std::size_t i = 0; i < pool.size(); ++i) CHECK(r.restarts_summary[i].init == pool[i].init);
        pool = r.restarts_summary;
    }
}

// The simulated cascades are complete, so the compensator runs to infinity;
// stopping it at the last event ignores that each cascade died out.
TEST_CASE("joint fit recovers the generating EXPN parameters") {
    const HawkesNParams truth{{KernelFamily::Exp, 0.9, 1.0, 0}, 200, 0};
    FitConfig cfg;
    cfg.restarts = 5;
    cfg.upto = kInf;
    const FitResult r = fit_joint(hawkesn_batch(truth, 100, 2026), cfg);
    CHECK(r.converged);
    CHECK(rel(r.params.kernel.kappa, 0.9) < 0.10);
    CHECK(rel(r.params.kernel.theta, 1.0) < 0.10);
    CHECK(r.n_cascades == 100);
}

TEST_CASE("short cascades still contribute to a joint fit") {
    const HawkesNParams truth{{KernelFamily::Exp, 0.9, 1.0, 0}, 200, 0};
    std::vector<Cascade> batch = hawkesn_batch(truth, 30, 6);
    std::size_t short_ones = 0;
    for (const auto& c : batch) short_ones += c.size() < 3;
    CHECK(short_ones > 0);
    FitConfig cfg;
    cfg.restarts = 2;
    CHECK_NOTHROW((void)fit_joint(batch, cfg));
}

TEST_CASE("SIR fit with observed recoveries") {
    SimConfig sim;
    sim.sir.beta = 2.5;
    sim.sir.recovery = {KernelFamily::Exp, 0.5, 0};
    sim.sir.N = 200;
    sim.seed = 71;
    const auto realizations = simulate_batch(sim, 100);
    FitConfig cfg;
    cfg.restarts = 4;
    const SirFitResult r = fit_sir(realizations, cfg);
    CHECK(rel(r.sir.beta, 2.5) < 0.05);
    CHECK(rel(r.sir.recovery.theta, 0.5) < 0.05);
    REQUIRE(r.kernel_view.has_value());
    CHECK(*r.kernel_view == to_kernel(r.sir));
    CHECK(r.N >= 200.0 - 1e-9);
}

TEST_CASE("SI limit with the recovery rate pinned at zero") {
    SimConfig sim;
    sim.sir.beta = 1.5;
    sim.sir.recovery = {KernelFamily::Exp, 0.0, 0};
    sim.sir.N = 80;
    sim.seed = 3;
    const auto realizations = simulate_batch(sim, 40);
    for (const auto& r : realizations) CHECK(r.size() == 80);
    FitConfig cfg;
    cfg.restarts = 3;
    cfg.pinned["gamma"] = 0.0;
    cfg.pinned["N"] = 80;
    const SirFitResult r = fit_sir(realizations, cfg);
    CHECK(r.sir.recovery.theta == 0.0);
    CHECK_FALSE(r.kernel_view.has_value());
    CHECK(rel(r.sir.beta, 1.5) < 0.05);
}
