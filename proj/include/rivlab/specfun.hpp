// Log-domain special functions: log-gamma, regularized incomplete gamma
// (value, stable log-tail, and inverse) and real-argument log-binomials.
//
// Everything here is written so that quantities like ln C(N, K) or
// ln Gamma(M/2) with C(N, K) ~ 1e100 and M ~ 1e7 stay in the log domain and
// never overflow. The incomplete gamma uses the lower series for x < a + 1
// and a continued fraction for x >= a + 1, both scaled by the log prefactor
// a*ln(x) - x - lnGamma(a). That prefactor is evaluated through a Stirling
// remainder so the cancellation between a*ln(x) and lnGamma(a) at large `a`
// does not eat the accuracy budget.

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rivlab::specfun {

/// Natural logarithm of a nonnegative quantity; -infinity encodes zero.
/// Never NaN for valid inputs.
struct LogValue {
    double value = -std::numeric_limits<double>::infinity();

    static LogValue from_log(double v) {
        if (std::isnan(v)) throw std::domain_error("LogValue: NaN log value");
        return LogValue{v};
    }
    static LogValue from_linear(double x) {
        if (std::isnan(x) || x < 0.0)
            throw std::domain_error("LogValue: negative or NaN linear value");
        return LogValue{std::log(x)};
    }
    bool is_zero() const { return std::isinf(value) && value < 0.0; }
    double linear() const { return std::exp(value); }
};

namespace detail {

inline constexpr double kLn2Pi = 1.8378770664093454836;

/// log(1+t) - t without cancellation near t = 0.
inline double log1pmx(double t) {
    if (std::fabs(t) >= 0.5) return std::log1p(t) - t;
    // -t^2/2 + t^3/3 - t^4/4 + ...
    double term = t * t;
    double sign = -1.0;
    double sum = 0.0;
    for (int k = 2; k < 256; ++k) {
        const double add = sign * term / k;
        sum += add;
        if (std::fabs(add) <= 1e-18 * std::fabs(sum)) break;
        term *= t;
        sign = -sign;
    }
    return sum;
}

/// lnGamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2].
inline double stirlerr(double a) {
    if (a < 16.0) return std::lgamma(a) - ((a - 0.5) * std::log(a) - a + 0.5 * kLn2Pi);
    const double i2 = 1.0 / (a * a);
    // asymptotic series, |error| < 1e-16 for a >= 16
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - i2 / 1188.0) * i2) * i2) * i2) / a;
}

/// a*ln(x) - x - lnGamma(a) for x > 0, cancellation-free at large a.
inline double gamma_log_prefactor(double a, double x) {
    return a * log1pmx(x / a - 1.0) + 0.5 * std::log(a / (2.0 * M_PI)) - stirlerr(a);
}

/// Lower-series sum: P(a,x) = exp(prefactor) * series.
inline double gamma_series_sum(double a, double x) {
    double del = 1.0 / a;
    double sum = del;
    for (long k = 1; k < 4000000; ++k) {
        del *= x / (a + static_cast<double>(k));
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17) return sum;
    }
    throw std::runtime_error("specfun: incomplete gamma series failed to converge");
}

/// Continued-fraction factor: Q(a,x) = exp(prefactor) * cf (modified Lentz).
inline double gamma_cf(double a, double x) {
    constexpr double kFpMin = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (long i = 1; i < 4000000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) <= 1e-16) return h;
    }
    throw std::runtime_error("specfun: incomplete gamma continued fraction failed to converge");
}

inline void require_gamma_domain(double a, double x, const char* who) {
    if (!(a > 0.0)) throw std::domain_error(std::string(who) + ": requires a > 0");
    if (!(x >= 0.0)) throw std::domain_error(std::string(who) + ": requires x >= 0");
}

}  // namespace detail

/// ln Gamma(a), a > 0.
inline double log_gamma(double a) {
    if (!(a > 0.0)) throw std::domain_error("log_gamma: requires a > 0");
    return std::lgamma(a);
}

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
/// Monotone nondecreasing in x, in [0, 1].
inline double reg_lower_gamma(double a, double x) {
    detail::require_gamma_domain(a, x, "reg_lower_gamma");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        const double lp = detail::gamma_log_prefactor(a, x);
        const double p = detail::gamma_series_sum(a, x) * std::exp(lp);
        return p < 1.0 ? p : 1.0;
    }
    const double lq = detail::gamma_log_prefactor(a, x) + std::log(detail::gamma_cf(a, x));
    return -std::expm1(lq);
}

/// ln(1 - P(a, x)) = ln Q(a, x) without cancellation in the far upper tail.
inline double log_reg_upper_gamma(double a, double x) {
    detail::require_gamma_domain(a, x, "log_reg_upper_gamma");
    if (x == 0.0) return 0.0;
    if (x >= a + 1.0) return detail::gamma_log_prefactor(a, x) + std::log(detail::gamma_cf(a, x));
    const double p = detail::gamma_series_sum(a, x) * std::exp(detail::gamma_log_prefactor(a, x));
    return std::log1p(-p);
}

/// Inverse of P(a, .): the x with reg_lower_gamma(a, x) = p, 0 <= p < 1.
inline double inv_reg_lower_gamma(double a, double p) {
    if (!(a > 0.0)) throw std::domain_error("inv_reg_lower_gamma: requires a > 0");
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("inv_reg_lower_gamma: requires 0 <= p < 1");
    if (p == 0.0) return 0.0;

    double lo = 0.0;
    double hi = a + 10.0 * std::sqrt(a) + 10.0;
    int guard = 0;
    while (reg_lower_gamma(a, hi) < p) {
        hi *= 2.0;
        if (++guard > 300) throw std::runtime_error("inv_reg_lower_gamma: bracketing failed");
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (reg_lower_gamma(a, mid) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
}

/// ln C(n, k) for real 0 <= k <= n (log-gamma continuation of the binomial).
inline double log_binomial(double n, double k) {
    if (std::isnan(n) || std::isnan(k) || k < 0.0 || k > n)
        throw std::domain_error("log_binomial: requires 0 <= k <= n");
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace rivlab::specfun
