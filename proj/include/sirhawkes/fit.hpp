#pragma once

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/kernels.hpp"
#include "sirhawkes/likelihood.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sirhawkes {

// Natural-scale box for one parameter.
struct ParameterBox {
    double lower;
    double upper;
};

/// Maximum-likelihood settings. Parameter names are "kappa", "theta", "c",
/// "N" and "rho" for HawkesN fits and "beta", "theta" (alias "gamma"), "c",
/// "N" and "rho" for SIR fits.
struct FitConfig {
    KernelFamily family = KernelFamily::Exp;
    bool marked = false;
    int restarts = 10;
    std::map<std::string, double> pinned;
    std::map<std::string, ParameterBox> bounds;
    double tol = 1e-8;
    double grad_tol = 1e-6;
    int max_iterations = 1000;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    // Censoring time applied to every cascade; default is each last event.
    std::optional<double> upto;
    double alpha = kDefaultMarkAlpha;

    void validate() const;
};

struct RestartRecord {
    std::map<std::string, double> init;
    std::map<std::string, double> final;
    double final_nll = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct FitResult {
    HawkesNParams params;
    double neg_loglik = 0.0;
    bool converged = false;
    std::vector<RestartRecord> restarts_summary;
    SirSpec sir_view;  // to_sir(params.kernel, floor(N), rho)
    std::int64_t n_events = 0;
    std::int64_t n_cascades = 0;
    double alpha = kDefaultMarkAlpha;

    [[nodiscard]] double branching_factor() const;
};

/// Best of cfg.restarts local fits of the HawkesN likelihood. N is kept
/// above the observed event count through the coordinate log(N - C_max).
/// Throws PreconditionError for cascades with fewer than 3 events.
[[nodiscard]] FitResult fit_cascade(const Cascade& cascade, const FitConfig& cfg);

// One parameter set (and one N) maximizing the summed log-likelihood.
[[nodiscard]] FitResult fit_joint(const std::vector<Cascade>& cascades, const FitConfig& cfg);

struct SirFitResult {
    SirSpec sir;        // N floored
    double N = 0.0;     // continuous estimate
    double neg_loglik = 0.0;
    bool converged = false;
    std::vector<RestartRecord> restarts_summary;
    std::optional<KernelSpec> kernel_view;  // absent in the SI limit
};

// Joint fit of the complete-data SIR likelihood (infections and recoveries).
[[nodiscard]] SirFitResult fit_sir(const std::vector<SirRealization>& realizations, const FitConfig& cfg);

}  // namespace sirhawkes
