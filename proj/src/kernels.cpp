#include "sirhawkes/kernels.hpp"

#include "sirhawkes/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

namespace sirhawkes {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::tolower(ch); });
    out.erase(std::remove_if(out.begin(), out.end(), [](char ch) { return ch == '-' || ch == '_'; }), out.end());
    return out;
}

void require_finite_positive(double v, const char* name, KernelFamily family) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw ParameterDomainError(std::string(to_string(family)) + ": " + name + " must be finite and > 0, got " +
                                   std::to_string(v));
    }
}

void validate_shape(KernelFamily family, double theta, double c) {
    require_finite_positive(theta, "theta", family);
    if (family == KernelFamily::QExp && !(theta > 1.0)) {
        throw ParameterDomainError("qexp: theta must be > 1, got " + std::to_string(theta));
    }
    if (family == KernelFamily::PowerLaw) require_finite_positive(c, "c", family);
}

// g(q, l) = (exp(q l) - 1) / q, continuous at q = 0.
double expm1_ratio(double q, double l) {
    if (std::isinf(l)) {
        if (q < 0.0) return -1.0 / q;
        return kInf;
    }
    if (std::abs(q * l) < 1e-300 || q == 0.0) return l;
    return std::expm1(q * l) / q;
}

// phi with kappa = 1; the family shape only.
double unit_phi(KernelFamily family, double theta, double c, double t) {
    switch (family) {
        case KernelFamily::Linear:
            return t < 1.0 / theta ? 1.0 - theta * t : 0.0;
        case KernelFamily::Quadratic: {
            if (t >= 2.0 / theta) return 0.0;
            const double s = 1.0 - 0.5 * theta * t;
            return s * s;
        }
        case KernelFamily::Gaussian:
            return std::exp(-t * t / (2.0 * theta * theta));
        case KernelFamily::QExp:
            return std::pow(1.0 + (theta - 1.0) * t, 1.0 / (1.0 - theta));
        case KernelFamily::Exp:
            return theta * std::exp(-theta * t);
        case KernelFamily::PowerLaw:
            return std::pow(t + c, -(1.0 + theta));
    }
    return 0.0;
}

double unit_phi_derivative(KernelFamily family, double theta, double c, double t) {
    switch (family) {
        case KernelFamily::Linear:
            return t < 1.0 / theta ? -theta : 0.0;
        case KernelFamily::Quadratic:
            return t < 2.0 / theta ? -theta * (1.0 - 0.5 * theta * t) : 0.0;
        case KernelFamily::Gaussian: {
            // The exponential underflows long before t / theta^2 overflows; avoid inf * 0.
            const double tail = std::exp(-t * t / (2.0 * theta * theta));
            return tail == 0.0 ? 0.0 : -t / (theta * theta) * tail;
        }
        case KernelFamily::QExp:
            return -std::pow(1.0 + (theta - 1.0) * t, theta / (1.0 - theta));
        case KernelFamily::Exp:
            return -theta * theta * std::exp(-theta * t);
        case KernelFamily::PowerLaw:
            return -(1.0 + theta) * std::pow(t + c, -(2.0 + theta));
    }
    return 0.0;
}

// Analytic -phi'/phi on the open support.
double unit_hazard(KernelFamily family, double theta, double c, double t) {
    switch (family) {
        case KernelFamily::Linear:
            return theta / (1.0 - theta * t);
        case KernelFamily::Quadratic:
            return theta / (1.0 - 0.5 * theta * t);
        case KernelFamily::Gaussian:
            return t / (theta * theta);
        case KernelFamily::QExp:
            return 1.0 / (1.0 + (theta - 1.0) * t);
        case KernelFamily::Exp:
            return theta;
        case KernelFamily::PowerLaw:
            return (1.0 + theta) / (t + c);
    }
    return 0.0;
}

double unit_support_end(KernelFamily family, double theta) {
    switch (family) {
        case KernelFamily::Linear:
            return 1.0 / theta;
        case KernelFamily::Quadratic:
            return 2.0 / theta;
        default:
            return kInf;
    }
}

// Integral of the unit kernel over [a, b] with 0 <= a <= b <= inf.
double unit_integral(KernelFamily family, double theta, double c, double a, double b) {
    switch (family) {
        case KernelFamily::Linear: {
            const double end = 1.0 / theta;
            a = std::min(a, end);
            b = std::min(b, end);
            auto antiderivative = [theta](double t) { return t - 0.5 * theta * t * t; };
            return antiderivative(b) - antiderivative(a);
        }
        case KernelFamily::Quadratic: {
            const double end = 2.0 / theta;
            a = std::min(a, end);
            b = std::min(b, end);
            const double sa = 1.0 - 0.5 * theta * a;
            const double sb = 1.0 - 0.5 * theta * b;
            return 2.0 / (3.0 * theta) * (sa * sa * sa - sb * sb * sb);
        }
        case KernelFamily::Gaussian: {
            const double scale = theta * std::numbers::sqrt2;
            const double erfc_b = std::isinf(b) ? 0.0 : std::erfc(b / scale);
            return theta * std::sqrt(std::numbers::pi / 2.0) * (std::erfc(a / scale) - erfc_b);
        }
        case KernelFamily::QExp: {
            const double q = (2.0 - theta) / (1.0 - theta);
            const double la = std::log1p((theta - 1.0) * a);
            const double lb = std::isinf(b) ? kInf : std::log1p((theta - 1.0) * b);
            const double gb = expm1_ratio(q, lb);
            if (std::isinf(gb)) return kInf;
            return (expm1_ratio(q, la) - gb) / (1.0 - theta);
        }
        case KernelFamily::Exp: {
            if (std::isinf(b)) return std::exp(-theta * a);
            return std::exp(-theta * a) * -std::expm1(-theta * (b - a));
        }
        case KernelFamily::PowerLaw: {
            const double tail_b = std::isinf(b) ? 0.0 : std::pow(b + c, -theta);
            return (std::pow(a + c, -theta) - tail_b) / theta;
        }
    }
    return 0.0;
}

void require_time(double t) {
    if (!(t >= 0.0)) throw PreconditionError("time must be >= 0, got " + std::to_string(t));
}

}  // namespace

std::string_view to_string(KernelFamily family) {
    switch (family) {
        case KernelFamily::Linear:
            return "linear";
        case KernelFamily::Quadratic:
            return "quadratic";
        case KernelFamily::Gaussian:
            return "gaussian";
        case KernelFamily::QExp:
            return "qexp";
        case KernelFamily::Exp:
            return "exp";
        case KernelFamily::PowerLaw:
            return "powerlaw";
    }
    return "unknown";
}

KernelFamily parse_family(std::string_view name) {
    const std::string key = lower(name);
    if (key == "linear") return KernelFamily::Linear;
    if (key == "quadratic") return KernelFamily::Quadratic;
    if (key == "gaussian") return KernelFamily::Gaussian;
    if (key == "qexp" || key == "tsallis" || key == "qexpn") return KernelFamily::QExp;
    if (key == "exp" || key == "exponential" || key == "expn") return KernelFamily::Exp;
    if (key == "powerlaw" || key == "pl" || key == "pln") return KernelFamily::PowerLaw;
    throw ParameterDomainError("unknown kernel family '" + std::string(name) + "'");
}

bool has_offset(KernelFamily family) { return family == KernelFamily::PowerLaw; }

void KernelSpec::validate() const {
    require_finite_positive(kappa, "kappa", family);
    validate_shape(family, theta, c);
}

void RecoveryDistribution::validate() const {
    if (family == KernelFamily::Exp && theta == 0.0) return;
    validate_shape(family, theta, c);
}

double RecoveryDistribution::survival(double t) const {
    validate();
    require_time(t);
    if (family == KernelFamily::Exp && theta == 0.0) return 1.0;
    return unit_phi(family, theta, c, t) / unit_phi(family, theta, c, 0.0);
}

double RecoveryDistribution::density(double t) const {
    validate();
    require_time(t);
    if (family == KernelFamily::Exp && theta == 0.0) return 0.0;
    return -unit_phi_derivative(family, theta, c, t) / unit_phi(family, theta, c, 0.0);
}

double RecoveryDistribution::hazard(double t) const {
    validate();
    require_time(t);
    if (family == KernelFamily::Exp && theta == 0.0) return 0.0;
    if (!(t < unit_support_end(family, theta))) {
        throw SingularHazardError(std::string(to_string(family)) + ": hazard undefined at t=" + std::to_string(t) +
                                  " (end of support)");
    }
    return unit_hazard(family, theta, c, t);
}

double RecoveryDistribution::mean() const {
    validate();
    if (family == KernelFamily::Exp && theta == 0.0) return kInf;
    return unit_integral(family, theta, c, 0.0, kInf) / unit_phi(family, theta, c, 0.0);
}

double RecoveryDistribution::quantile(double u) const {
    validate();
    if (!(u > 0.0 && u < 1.0)) throw PreconditionError("quantile needs u in (0, 1)");
    // Solve survival(t) = 1 - u.
    const double log_s = std::log1p(-u);
    switch (family) {
        case KernelFamily::Linear:
            return u / theta;
        case KernelFamily::Quadratic:
            return 2.0 / theta * (1.0 - std::sqrt(1.0 - u));
        case KernelFamily::Gaussian:
            return theta * std::sqrt(-2.0 * log_s);
        case KernelFamily::QExp:
            return std::expm1((1.0 - theta) * log_s) / (theta - 1.0);
        case KernelFamily::Exp:
            return theta == 0.0 ? kInf : -log_s / theta;
        case KernelFamily::PowerLaw:
            return c * std::expm1(-log_s / (1.0 + theta));
    }
    return kInf;
}

void SirSpec::validate() const {
    if (!(std::isfinite(beta) && beta >= 0.0)) throw ParameterDomainError("beta must be finite and >= 0");
    if (N < 1) throw ParameterDomainError("N must be >= 1");
    if (!(std::isfinite(rho) && rho >= 0.0)) throw ParameterDomainError("rho must be finite and >= 0");
    recovery.validate();
}

double phi(const KernelSpec& spec, double t) {
    spec.validate();
    require_time(t);
    return spec.kappa * unit_phi(spec.family, spec.theta, spec.c, t);
}

Eigen::ArrayXd phi(const KernelSpec& spec, const Eigen::ArrayXd& t) {
    spec.validate();
    if ((t < 0.0).any()) throw PreconditionError("time must be >= 0");
    const double k = spec.kappa;
    const double theta = spec.theta;
    switch (spec.family) {
        case KernelFamily::Exp:
            return k * theta * (-theta * t).exp();
        case KernelFamily::PowerLaw:
            return k * (t + spec.c).pow(-(1.0 + theta));
        case KernelFamily::Gaussian:
            return k * (-t.square() / (2.0 * theta * theta)).exp();
        case KernelFamily::QExp:
            return k * (1.0 + (theta - 1.0) * t).pow(1.0 / (1.0 - theta));
        default:
            return t.unaryExpr([&](double x) { return k * unit_phi(spec.family, theta, spec.c, x); });
    }
}

double phi_derivative(const KernelSpec& spec, double t) {
    spec.validate();
    require_time(t);
    return spec.kappa * unit_phi_derivative(spec.family, spec.theta, spec.c, t);
}

double recovery_density(const KernelSpec& spec, double t) {
    spec.validate();
    return recovery_of(spec).density(t);
}

double hazard(const KernelSpec& spec, double t) {
    spec.validate();
    return recovery_of(spec).hazard(t);
}

double kernel_integral(const KernelSpec& spec, double a, double b) {
    spec.validate();
    if (!(a >= 0.0 && b >= a)) throw PreconditionError("kernel_integral needs 0 <= a <= b");
    if (a == b) return 0.0;
    return spec.kappa * unit_integral(spec.family, spec.theta, spec.c, a, b);
}

double support_end(const KernelSpec& spec) {
    spec.validate();
    return unit_support_end(spec.family, spec.theta);
}

double branching_factor(const KernelSpec& spec, double rho, double alpha) {
    const double total = kernel_integral(spec, 0.0, kInf);
    if (rho == 0.0) return total;
    if (!(rho > 0.0)) throw ParameterDomainError("rho must be >= 0");
    if (!(alpha > 1.0)) throw ParameterDomainError("mark exponent alpha must be > 1");
    const double denom = alpha - 1.0 - rho;
    if (!(denom > 0.0)) {
        throw DivergentBranchingError("marked branching factor diverges: rho=" + std::to_string(rho) +
                                      " >= alpha-1=" + std::to_string(alpha - 1.0));
    }
    return total * (alpha - 1.0) / denom;
}

RecoveryDistribution recovery_of(const KernelSpec& spec) {
    return {spec.family, spec.theta, has_offset(spec.family) ? spec.c : 0.0};
}

SirSpec to_sir(const KernelSpec& spec, std::int64_t N, double rho) {
    SirSpec sir{phi(spec, 0.0), recovery_of(spec), N, rho};
    sir.validate();
    return sir;
}

KernelSpec to_kernel(double beta, const RecoveryDistribution& recovery) {
    recovery.validate();
    const double phi0 = unit_phi(recovery.family, recovery.theta, recovery.c, 0.0);
    KernelSpec spec{recovery.family, beta / phi0, recovery.theta, recovery.c};
    spec.validate();
    return spec;
}

KernelSpec to_kernel(const SirSpec& sir) { return to_kernel(sir.beta, sir.recovery); }

}  // namespace sirhawkes
