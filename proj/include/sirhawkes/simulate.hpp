#pragma once

#include "sirhawkes/cascades.hpp"
#include "sirhawkes/kernels.hpp"
#include "sirhawkes/likelihood.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sirhawkes {

struct SimConfig {
    SirSpec sir;
    std::uint64_t seed = 0;
    std::int64_t max_events = 1'000'000;
    std::optional<double> horizon;
};

/// Generalized stochastic SIR by inverse compensator sampling: each new
/// infection draws its recovery time from f, so lambda^I is piecewise
/// constant between known event times and its integral is inverted exactly.
/// Stops when N individuals are infected, when the remaining infection mass
/// is exhausted, at the horizon, or after max_events infections.
/// `run` selects the random stream, so runs are order-independent.
[[nodiscard]] SirRealization simulate_sir(const SimConfig& cfg, std::uint64_t run = 0);

/// As simulate_sir, with each individual carrying a mark drawn from
/// P(m) = (alpha - 1) m^-alpha and contributing m^rho to the intensity.
/// Marks come from a separate stream so event times match simulate_sir
/// exactly when rho = 0.
[[nodiscard]] SirRealization simulate_marked(const SimConfig& cfg, double alpha, std::uint64_t run = 0);

// Inverse CDF of the power-law mark distribution; m >= 1.
[[nodiscard]] double sample_mark(double u, double alpha);

[[nodiscard]] std::vector<SirRealization> simulate_batch(const SimConfig& cfg, std::size_t runs, unsigned jobs = 1,
                                                         std::optional<double> mark_alpha = std::nullopt);

struct HawkesSimConfig {
    std::uint64_t seed = 0;
    std::int64_t max_events = 1'000'000;
    std::optional<double> horizon;
    std::optional<double> mark_alpha;  // marks drawn only when set
};

/// HawkesN realization by inverting the closed-form compensator between
/// events. Terminates once the remaining intensity mass is exhausted, N is
/// reached, or a cap applies.
[[nodiscard]] Cascade simulate_hawkesn(const HawkesNParams& params, const HawkesSimConfig& cfg,
                                       std::uint64_t run = 0);

/// Empirical distribution of final sizes |H^C| over [1, N].
struct SizeDistribution {
    std::int64_t N = 0;
    std::int64_t runs = 0;
    std::vector<std::int64_t> counts;  // counts[n - 1] = runs ending with size n

    [[nodiscard]] double pmf(std::int64_t n) const;
    [[nodiscard]] double cdf(std::int64_t n) const;
    // Laplace (+1) smoothed probability of final size n.
    [[nodiscard]] double likelihood(std::int64_t n) const;
    [[nodiscard]] double mean() const;
};

[[nodiscard]] SizeDistribution size_distribution(const SirSpec& sir, std::int64_t runs, std::uint64_t seed,
                                                 unsigned jobs = 1, std::optional<double> mark_alpha = std::nullopt);
// Converts the kernel to SIR form first; N is floored.
[[nodiscard]] SizeDistribution size_distribution(const KernelSpec& kernel, double N, std::int64_t runs,
                                                 std::uint64_t seed, unsigned jobs = 1);

}  // namespace sirhawkes
