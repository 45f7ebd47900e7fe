#include "oracles.hpp"

#include "sirhawkes/errors.hpp"
#include "sirhawkes/kernels.hpp"
#include "sirhawkes/serialize.hpp"

#include <doctest.h>

#include <cmath>

using namespace sirhawkes;
using doctest::Approx;

TEST_CASE("phi values") {
    CHECK(phi({KernelFamily::Exp, 2, 1, 0}, 0) == Approx(2.0));
    CHECK(phi({KernelFamily::Linear, 1, 2, 0}, 1) == 0.0);
    CHECK(phi({KernelFamily::Linear, 1, 2, 0}, 0.5) == 0.0);
    CHECK(phi({KernelFamily::PowerLaw, 1, 0.5, 2}, 0) == Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
    CHECK_THROWS_AS((void)phi({KernelFamily::Exp, 1, 1, 0}, -1), PreconditionError);
}

TEST_CASE("phi over an Eigen array matches the scalar form") {
    const KernelSpec k{KernelFamily::Quadratic, 1.5, 0.7, 0};
    Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(50, 0.0, 4.0);
    const Eigen::ArrayXd v = phi(k, t);
    for (Eigen::Index i = 0; i < t.size(); ++i) CHECK(v[i] == phi(k, t[i]));
}

TEST_CASE("parameter domain") {
    CHECK_THROWS_AS(KernelSpec({KernelFamily::Exp, 0, 1, 0}).validate(), ParameterDomainError);
    CHECK_THROWS_AS(KernelSpec({KernelFamily::Exp, 1, -1, 0}).validate(), ParameterDomainError);
    CHECK_THROWS_AS(KernelSpec({KernelFamily::QExp, 1, 1, 0}).validate(), ParameterDomainError);
    CHECK_THROWS_AS(KernelSpec({KernelFamily::PowerLaw, 1, 1, 0}).validate(), ParameterDomainError);
    CHECK_THROWS_AS((void)phi({KernelFamily::QExp, 1, 0.5, 0}, 1.0), ParameterDomainError);
    CHECK_NOTHROW(KernelSpec({KernelFamily::QExp, 1, 1.5, 0}).validate());
}

TEST_CASE("recovery density") {
    CHECK(recovery_density({KernelFamily::Exp, 5, 1, 0}, 0) == Approx(1.0));
    CHECK(recovery_density({KernelFamily::QExp, 1, 2, 0}, 1) == Approx(0.25));
    CHECK(recovery_density({KernelFamily::Linear, 1, 2, 0}, 0.75) == 0.0);
}

TEST_CASE("recovery density stays finite in the far tail") {
    sirhawkes::Rng rng(13);
    for (KernelFamily fam : oracle::kAllFamilies) {
        const KernelSpec k = oracle::random_kernel(fam, rng);
        for (double t : {1e100, 1e300, 1.5e308}) {
            const double f = recovery_density(k, t);
            CHECK(std::isfinite(f));
            CHECK(f >= 0.0);
        }
    }
}

TEST_CASE("hazard") {
    CHECK(hazard({KernelFamily::Exp, 0.3, 3, 0}, 7) == Approx(3.0));
    CHECK(hazard({KernelFamily::QExp, 1, 2, 0}, 1) == Approx(0.5));
    CHECK(hazard({KernelFamily::PowerLaw, 1, 1, 2}, 0) == Approx(1.0));
    CHECK_THROWS_AS((void)hazard({KernelFamily::Linear, 1, 2, 0}, 0.5), SingularHazardError);
    CHECK_THROWS_AS((void)hazard({KernelFamily::Quadratic, 1, 2, 0}, 3), SingularHazardError);
}

TEST_CASE("kernel integral") {
    CHECK(kernel_integral({KernelFamily::Exp, 0.8, 5, 0}, 0, kInf) == Approx(0.8));
    // kappa c^-theta / theta = 2^-0.5 / 0.5
    const KernelSpec pl{KernelFamily::PowerLaw, 1, 0.5, 2};
    CHECK(kernel_integral(pl, 0, kInf) == Approx(1.41421356).epsilon(1e-8));
    CHECK(kernel_integral(pl, 0, kInf) == Approx(oracle::integral([](double t) { return std::pow(t + 2, -1.5); }, 0, kInf)).epsilon(1e-10));
    CHECK(kernel_integral({KernelFamily::Gaussian, 1, 2, 0}, 1.5, 1.5) == 0.0);
    CHECK(kernel_integral({KernelFamily::QExp, 1, 2.5, 0}, 0, kInf) == kInf);
    CHECK_THROWS_AS((void)kernel_integral({KernelFamily::Exp, 1, 1, 0}, 2, 1), PreconditionError);
}

TEST_CASE("branching factor") {
    CHECK(branching_factor({KernelFamily::Exp, 0.8, 5, 0}) == Approx(0.8));
    CHECK(branching_factor({KernelFamily::Exp, 1, 1, 0}, 0.5, 2.016) == Approx(1.016 / 0.516).epsilon(1e-9));
    CHECK(branching_factor({KernelFamily::Exp, 1, 1, 0}, 0.5, 2.016) == Approx(1.968992).epsilon(1e-6));
    const KernelSpec k{KernelFamily::Gaussian, 0.7, 1.3, 0};
    CHECK(branching_factor(k, 0.0, 2.016) == branching_factor(k));
    CHECK_THROWS_AS((void)branching_factor(k, 1.016, 2.016), DivergentBranchingError);
    CHECK_THROWS_AS((void)branching_factor(k, 2.0, 2.016), DivergentBranchingError);
}

TEST_CASE("kernel to SIR mapping") {
    const SirSpec s = to_sir({KernelFamily::Exp, 2, 1.5, 0}, 100);
    CHECK(s.beta == Approx(3.0));
    CHECK(s.recovery.theta == Approx(1.5));
    const SirSpec p = to_sir({KernelFamily::PowerLaw, 1, 0.5, 2}, 10);
    CHECK(p.beta == Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
}

TEST_CASE("round trip through the SIR view on random parameters") {
    Rng rng(17);
    for (KernelFamily fam : oracle::kAllFamilies) {
        for (int i = 0; i < 20; ++i) {
            const KernelSpec k = oracle::random_kernel(fam, rng);
            const KernelSpec back = to_kernel(to_sir(k, 50));
            CHECK(back.family == k.family);
            CHECK(back.theta == k.theta);
            CHECK(back.c == k.c);
            // kappa goes through beta = kappa * phi~(0) and back: equal up to rounding.
            CHECK(std::abs(back.kappa - k.kappa) <= 8 * std::numeric_limits<double>::epsilon() * k.kappa);
        }
    }
}

TEST_CASE("family names") {
    CHECK(parse_family("PowerLaw") == KernelFamily::PowerLaw);
    CHECK(parse_family("q-exp") == KernelFamily::QExp);
    CHECK(parse_family("tsallis") == KernelFamily::QExp);
    CHECK(parse_family("EXPN") == KernelFamily::Exp);
    for (KernelFamily f : oracle::kAllFamilies) CHECK(parse_family(to_string(f)) == f);
    CHECK_THROWS_AS((void)parse_family("rayleigh"), ParameterDomainError);
}

TEST_CASE("kernel JSON") {
    const KernelSpec k{KernelFamily::PowerLaw, 1.25, 0.5, 2};
    const Json j = to_json(k);
    CHECK(j.at("family") == "powerlaw");
    CHECK(kernel_from_json(j) == k);
    CHECK_FALSE(to_json(KernelSpec{KernelFamily::Exp, 1, 1, 0}).contains("c"));
    CHECK_THROWS((void)kernel_from_json(Json{{"family", "exp"}, {"kappa", 1}}));
}

// Properties over all six families and random draws.
TEST_CASE("transform properties") {
    Rng rng(2024);
    for (KernelFamily fam : oracle::kAllFamilies) {
        CAPTURE(to_string(fam));
        for (int draw = 0; draw < 20; ++draw) {
            const KernelSpec k = oracle::random_kernel(fam, rng);
            CAPTURE(k.kappa);
            CAPTURE(k.theta);
            const double end = support_end(k);
            // A span where phi is still well above underflow.
            double scale = 3.0;
            if (std::isfinite(end)) scale = end;
            if (fam == KernelFamily::Gaussian) scale = 3.0 * k.theta;
            if (fam == KernelFamily::Exp) scale = 3.0 / k.theta;

            // phi matches the independent formula.
            for (double u : {0.0, 0.1, 0.45, 0.8}) CHECK(phi(k, u * scale) == Approx(oracle::phi(k, u * scale)).epsilon(1e-12));

            // f integrates to one.
            const double mass = oracle::integral([&](double t) { return recovery_density(k, t); }, 0.0, end);
            CHECK(mass == Approx(1.0).epsilon(1e-8));

            for (double u : {0.05, 0.3, 0.7, 0.95}) {
                const double t = u * scale;
                const double h = 1e-6 * std::max(1.0, t);
                const double d = oracle::derivative([&](double x) { return oracle::phi(k, x); }, t, h);
                CHECK(-phi(k, 0) * recovery_density(k, t) == Approx(d).epsilon(1e-4));
                CHECK(phi_derivative(k, t) == Approx(d).epsilon(1e-4));
                CHECK(hazard(k, t) == Approx(-d / oracle::phi(k, t)).epsilon(1e-4));
                CHECK(recovery_density(k, t) == Approx(hazard(k, t) * phi(k, t) / phi(k, 0)).epsilon(1e-12));
                // d/dt of the tail integral is -phi.
                const double tail = oracle::derivative([&](double x) { return kernel_integral(k, x, kInf); }, t, h);
                CHECK(tail == Approx(-phi(k, t)).epsilon(1e-4));
            }

            // R0 equivalence: beta E[tau] equals the kernel mass.
            const double beta = phi(k, 0);
            const double mean_tau =
                oracle::integral([&](double t) { return t * recovery_density(k, t); }, 0.0, end);
            const double double_integral = oracle::integral([&](double t) { return phi(k, t); }, 0.0, end);
            CHECK(beta * mean_tau == Approx(branching_factor(k)).epsilon(1e-6));
            CHECK(double_integral == Approx(branching_factor(k)).epsilon(1e-6));
            CHECK(recovery_of(k).mean() == Approx(mean_tau).epsilon(1e-6));

            // Monotone non-increasing.
            double t1 = rng.uniform() * scale, t2 = rng.uniform() * scale;
            if (t1 > t2) std::swap(t1, t2);
            CHECK(phi(k, t1) >= phi(k, t2));

            // Recovery quantile inverts the survival function.
            const RecoveryDistribution rec = recovery_of(k);
            for (double u : {0.1, 0.5, 0.9}) CHECK(rec.survival(rec.quantile(u)) == Approx(1 - u).epsilon(1e-9));
        }
    }
}
