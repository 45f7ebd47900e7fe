#pragma once

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/kernels.hpp"
#include "sirhawkes/likelihood.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace sirhawkes {

// Compensator increments between consecutive events; under the generating
// intensity these are i.i.d. Exp(1).
struct RescaledIntervals {
    std::vector<double> taus;
};

// Requires at least 3 events.
[[nodiscard]] RescaledIntervals rescale(const HawkesNParams& params, const Cascade& cascade,
                                        CompensatorMethod method = CompensatorMethod::Auto);
// Same from any cumulative intensity Lambda(t) evaluated at the event times.
[[nodiscard]] RescaledIntervals rescale(const std::function<double(double)>& compensator,
                                        const std::vector<double>& times);
// Infection residuals of an SIR realization (recoveries observed).
[[nodiscard]] RescaledIntervals rescale_sir(const SirSpec& sir, const SirRealization& realization);

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Kolmogorov-Smirnov against Exp(1); p from the asymptotic Kolmogorov
// distribution at the corrected argument (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
[[nodiscard]] TestResult ks_test(const std::vector<double>& taus);
// Excess dispersion sqrt(n/8) (s^2 - 1), two-sided normal p.
[[nodiscard]] TestResult ed_test(const std::vector<double>& taus);
// Ljung-Box Q over lags 1..lags, chi-square p with `lags` degrees of freedom.
[[nodiscard]] TestResult lb_test(const std::vector<double>& taus, int lags);
[[nodiscard]] int default_lags(std::size_t n);

// Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
[[nodiscard]] double kolmogorov_survival(double lambda);

// Two-sample KS on arbitrary samples (ties handled by joint stepping).
[[nodiscard]] TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct GofReport {
    std::size_t n = 0;
    double ks_D = 0.0;
    double ks_p = 1.0;
    double ed_stat = 0.0;
    double ed_p = 1.0;
    double lb_Q = 0.0;
    double lb_p = 1.0;
    int lags = 0;

    struct Passes {
        bool ks;
        bool ed;
        bool lb;
    };
    [[nodiscard]] Passes pass_at(double level = 0.01) const;
};

[[nodiscard]] GofReport gof_report(const RescaledIntervals& r, std::optional<int> lags = std::nullopt);

enum class Comparison { ABetter, BBetter, Tie };

[[nodiscard]] Comparison compare_models(const GofReport& a, const GofReport& b, double min_gap = 0.05);
[[nodiscard]] const char* to_string(Comparison c);

}  // namespace sirhawkes
