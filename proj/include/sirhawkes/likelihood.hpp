#pragma once

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/kernels.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sirhawkes {

/// HawkesN model: intensity ((N - N_t) / N) * sum_{t_i < t} m_i^rho phi(t - t_i).
/// N is a positive real (continuous relaxation); N = +inf gives the plain
/// Hawkes process with zero background rate.
struct HawkesNParams {
    KernelSpec kernel;
    double N = kInf;
    double rho = 0.0;

    void validate() const;

    friend bool operator==(const HawkesNParams&, const HawkesNParams&) = default;
};

struct LikelihoodValue {
    double loglik = 0.0;
    std::int64_t n_events = 0;
    double per_event = 0.0;
    // True when some scored event has zero intensity; loglik is then -inf.
    bool impossible = false;

    [[nodiscard]] static LikelihoodValue make(double loglik, std::int64_t n_events);
};

enum class CompensatorMethod {
    Auto,       // Recursive for Exp, Direct for PowerLaw/QExp, Quadrature otherwise
    Recursive,  // O(n) decay accumulator, Exp only
    Direct,     // closed-form O(n^2) double sum, any family
    Quadrature  // adaptive Gauss-Kronrod per inter-event segment
};

/// Per-event pieces of the HawkesN log-likelihood.
///   log_intensity[j]  log lambda(t_j^-) for j >= 1; entry 0 is unused (0)
///   increments[k]     Lambda(t_{k+1}) - Lambda(t_k), k = 0..n-2
///   tail              Lambda(upto) - Lambda(t_{n-1})
/// Population depletion applies from the segment following each event.
struct IntensityTrace {
    std::vector<double> log_intensity;
    std::vector<double> increments;
    double tail = 0.0;
};

[[nodiscard]] IntensityTrace intensity_trace(const HawkesNParams& params, const Cascade& cascade,
                                             std::optional<double> upto = std::nullopt,
                                             CompensatorMethod method = CompensatorMethod::Auto);

[[nodiscard]] double hawkesn_intensity(const HawkesNParams& params, const Cascade& cascade, double t);

// Integral of the intensity over [0, t].
[[nodiscard]] double hawkesn_compensator(const HawkesNParams& params, const Cascade& cascade, double t);

/// Log-likelihood of the whole cascade. The first event contributes no
/// log-intensity term. `upto` (default: last event time) extends the
/// compensator over a censoring window and may be +inf.
[[nodiscard]] LikelihoodValue hawkesn_loglik(const HawkesNParams& params, const Cascade& cascade,
                                             std::optional<double> upto = std::nullopt,
                                             CompensatorMethod method = CompensatorMethod::Auto);

/// Scores the events after the first ceil(split_fraction * n) with the
/// intensity conditioned on the full history, over (t_split, t_n].
/// n_events is the holdout count; per_event is loglik / n_events.
[[nodiscard]] LikelihoodValue holdout_loglik(const HawkesNParams& params, const Cascade& cascade,
                                             double split_fraction,
                                             CompensatorMethod method = CompensatorMethod::Auto);

[[nodiscard]] std::size_t holdout_train_count(std::size_t n_events, double split_fraction);

/// Infection intensity beta * (S_t / N) * sum over infected-not-recovered of
/// m_i^rho, just before t.
[[nodiscard]] double sir_intensity(const SirSpec& sir, const SirRealization& realization, double t);

/// Complete-data log-likelihood of a generalized SIR realization:
///   sum log lambda^I(t_i) - int_0^upto lambda^I + sum log f(t_i^R - t_i^I)
/// over infections after the first and recoveries at or before `upto`.
/// Default upto is the latest finite event time.
[[nodiscard]] LikelihoodValue sir_loglik(const SirSpec& sir, const SirRealization& realization,
                                         std::optional<double> upto = std::nullopt);
// Same, with the population treated as a positive real instead of sir.N.
[[nodiscard]] LikelihoodValue sir_loglik(const SirSpec& sir, double population, const SirRealization& realization,
                                         std::optional<double> upto = std::nullopt);

// Lambda^I(t_{i+1}) - Lambda^I(t_i) between consecutive infections.
[[nodiscard]] std::vector<double> sir_compensator_increments(const SirSpec& sir, const SirRealization& realization);

}  // namespace sirhawkes
