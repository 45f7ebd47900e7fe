#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace sirhawkes {

enum class KernelFamily { Linear, Quadratic, Gaussian, QExp, Exp, PowerLaw };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Power-law exponent of the follower-count mark distribution used when no
// explicit value is supplied.
inline constexpr double kDefaultMarkAlpha = 2.016;

[[nodiscard]] std::string_view to_string(KernelFamily family);
// Accepts the canonical names plus common aliases ("pl", "exponential", ...).
[[nodiscard]] KernelFamily parse_family(std::string_view name);
[[nodiscard]] bool has_offset(KernelFamily family);

/// A HawkesN triggering kernel phi(t) of one of the six parametric families.
///
/// | family    | phi(t)                       | support      |
/// |-----------|------------------------------|--------------|
/// | Linear    | kappa (1 - theta t)          | [0, 1/theta) |
/// | Quadratic | kappa (1 - theta t / 2)^2    | [0, 2/theta) |
/// | Gaussian  | kappa exp(-t^2 / (2 theta^2))| [0, inf)     |
/// | QExp      | kappa (1 + (theta-1) t)^(1/(1-theta)), theta > 1 | [0, inf) |
/// | Exp       | kappa theta exp(-theta t)    | [0, inf)     |
/// | PowerLaw  | kappa (t + c)^-(1+theta)     | [0, inf)     |
///
/// phi is zero outside its support. `c` is only meaningful for PowerLaw.
struct KernelSpec {
    KernelFamily family = KernelFamily::Exp;
    double kappa = 1.0;
    double theta = 1.0;
    double c = 0.0;

    // Throws ParameterDomainError on constraint violation.
    void validate() const;

    friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// Recovery-time distribution f(t) = -phi'(t) / phi(0). It does not depend
/// on kappa, so only (family, theta, c) are carried. Exp with theta = 0 is
/// admitted as the never-recovering (SI) limit.
struct RecoveryDistribution {
    KernelFamily family = KernelFamily::Exp;
    double theta = 1.0;
    double c = 0.0;

    void validate() const;

    [[nodiscard]] double density(double t) const;
    [[nodiscard]] double survival(double t) const;
    [[nodiscard]] double hazard(double t) const;
    [[nodiscard]] double mean() const;
    // Inverse-CDF draw from u in (0, 1); +inf in the SI limit.
    [[nodiscard]] double quantile(double u) const;

    friend bool operator==(const RecoveryDistribution&, const RecoveryDistribution&) = default;
};

/// Generalized stochastic SIR parameters: infection rate beta, recovery
/// distribution, population N and mark exponent rho (0 when unmarked).
struct SirSpec {
    double beta = 1.0;
    RecoveryDistribution recovery;
    std::int64_t N = 1;
    double rho = 0.0;

    void validate() const;

    friend bool operator==(const SirSpec&, const SirSpec&) = default;
};

[[nodiscard]] double phi(const KernelSpec& spec, double t);
[[nodiscard]] Eigen::ArrayXd phi(const KernelSpec& spec, const Eigen::ArrayXd& t);
// Analytic phi'(t); zero outside the support.
[[nodiscard]] double phi_derivative(const KernelSpec& spec, double t);

// f(t) = -phi'(t) / phi(0), from the analytic derivative.
[[nodiscard]] double recovery_density(const KernelSpec& spec, double t);

// h(t) = -phi'(t) / phi(t). Throws SingularHazardError at or beyond the end
// of a bounded support.
[[nodiscard]] double hazard(const KernelSpec& spec, double t);

// Closed-form integral of phi over [a, b]; b may be +inf. Returns +inf for
// QExp with theta >= 2 over an unbounded interval.
[[nodiscard]] double kernel_integral(const KernelSpec& spec, double a, double b);

// End of the support: 1/theta, 2/theta or +inf.
[[nodiscard]] double support_end(const KernelSpec& spec);

/// Expected number of direct offspring of one event. With marks drawn from
/// P(m) = (alpha - 1) m^-alpha the integral of phi is scaled by
/// (alpha - 1) / (alpha - 1 - rho). Throws DivergentBranchingError when
/// rho >= alpha - 1.
[[nodiscard]] double branching_factor(const KernelSpec& spec, double rho = 0.0,
                                      double alpha = kDefaultMarkAlpha);

[[nodiscard]] RecoveryDistribution recovery_of(const KernelSpec& spec);
[[nodiscard]] SirSpec to_sir(const KernelSpec& spec, std::int64_t N, double rho = 0.0);
[[nodiscard]] KernelSpec to_kernel(const SirSpec& sir);
[[nodiscard]] KernelSpec to_kernel(double beta, const RecoveryDistribution& recovery);

}  // namespace sirhawkes
