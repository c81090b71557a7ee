// Distribution family of the restricted-isometry random variables for
// Gaussian encoders with per-entry variance 1/M:
//
//   * the ratio (Rayleigh-quotient) variable R ~ chi^2_M / M, with
//     F_C(x) = P(M/2, M x / 2);
//   * the left RIV  1 - min R over all C(N, K) supports and the right RIV
//     max R - 1, under the i.i.d. representation, both exact
//     (F^Ns in the log domain) and in their extreme-value limits
//     (Weibull for the left, Gumbel for the right);
//   * the effective support band of the left limit law.
//
// CDF powers z^Ns are always computed as exp(Ns * ln z) with Ns held as
// ln C(N, K); results below exp(-745) are reported as exact zero.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rivlab/specfun.hpp"

namespace rivlab::rivdist {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A problem size (K, M, N), real-valued so continuous relaxations
/// K = rho*delta*N are representable. Requires 1 <= K <= M <= N.
struct Triplet {
    double k = 0.0;  // sparsity
    double m = 0.0;  // measurements
    double n = 0.0;  // ambient dimension
    specfun::LogValue log_ns;  // ln C(N, K)

    Triplet(double k_, double m_, double n_) : k(k_), m(m_), n(n_) {
        if (!(k >= 1.0) || !(k <= m) || !(m <= n) || !std::isfinite(n))
            throw std::domain_error("Triplet: requires 1 <= K <= M <= N");
        log_ns = specfun::LogValue::from_log(specfun::log_binomial(n, k));
    }

    double half_m() const { return 0.5 * m; }
};

/// Weibull constants of the left RIV limit law; location is fixed at 0.
struct WeibullParams {
    double q = 0.0;     // scale
    double beta = 0.0;  // shape, = M/2
};

/// Gumbel constants of the right RIV limit law.
struct GumbelParams {
    double s = 0.0;  // scale, = 2/M
    double l = 0.0;  // location
};

namespace detail {

/// z^count for z in (0, 1] given ln(count) and ln(z) <= 0, in the log domain.
inline double pow_from_logs(double log_count, double log_z) {
    if (log_z == 0.0) return 1.0;
    const double e = log_count + std::log(-log_z);
    if (e > 709.0) return 0.0;
    const double expo = -std::exp(e);
    return expo < -745.0 ? 0.0 : std::exp(expo);
}

/// count * ln(z) given the same inputs; -inf when it underflows the floor.
inline double scaled_log(double log_count, double log_z) {
    if (log_z == 0.0) return 0.0;
    const double e = log_count + std::log(-log_z);
    return e > 709.0 ? -kInf : -std::exp(e);
}

/// ln(Ns - 1) from ln(Ns); 0-term sentinel (-inf) when Ns <= 1.
inline double log_count_minus_one(double log_ns) {
    if (log_ns > 36.0) return log_ns;
    const double ns = std::exp(log_ns);
    if (ns <= 1.0) return -kInf;
    return std::log(ns - 1.0);
}

inline void require_unit_interval(double u, const char* who) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::domain_error(std::string(who) + ": requires u in [0, 1]");
}

inline void require_nonnegative(double v, const char* who) {
    if (!(v >= 0.0)) throw std::domain_error(std::string(who) + ": requires v >= 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ratio variable R = ||A x||^2 / ||x||^2 ~ chi^2_M / M
// ---------------------------------------------------------------------------

/// ln p_C(x); +inf/-inf at x = 0 depending on M as the density demands.
inline double ratio_log_pdf(double m, double x) {
    if (!(m >= 1.0)) throw std::domain_error("ratio_log_pdf: requires M >= 1");
    if (!(x >= 0.0)) throw std::domain_error("ratio_log_pdf: requires x >= 0");
    const double a = 0.5 * m;
    if (x == 0.0) {
        if (a > 1.0) return -kInf;
        if (a == 1.0) return 0.0;  // M = 2: p_C(0) = 1
        return kInf;
    }
    // p_C(x) = a^a / Gamma(a) x^{a-1} e^{-a x}  =>  prefactor(a, a x) - ln x
    return specfun::detail::gamma_log_prefactor(a, a * x) - std::log(x);
}

inline double ratio_pdf(double m, double x) { return std::exp(ratio_log_pdf(m, x)); }

/// F_C(x) = P(M/2, M x / 2).
inline double ratio_cdf(double m, double x) {
    if (!(m >= 1.0)) throw std::domain_error("ratio_cdf: requires M >= 1");
    if (!(x >= 0.0)) throw std::domain_error("ratio_cdf: requires x >= 0");
    return specfun::reg_lower_gamma(0.5 * m, 0.5 * m * x);
}

// ---------------------------------------------------------------------------
// Exact (non-asymptotic) RIV distributions
// ---------------------------------------------------------------------------

/// F_L(u) = [1 - P(M/2, M(1-u)/2)]^{Ns} for u in [0, 1].
inline double left_riv_cdf(const Triplet& t, double u) {
    detail::require_unit_interval(u, "left_riv_cdf");
    const double lq = specfun::log_reg_upper_gamma(t.half_m(), t.half_m() * (1.0 - u));
    return detail::pow_from_logs(t.log_ns.value, lq);
}

inline double left_riv_log_pdf(const Triplet& t, double u) {
    detail::require_unit_interval(u, "left_riv_log_pdf");
    const double lq = specfun::log_reg_upper_gamma(t.half_m(), t.half_m() * (1.0 - u));
    const double tail = detail::scaled_log(detail::log_count_minus_one(t.log_ns.value), lq);
    return t.log_ns.value + tail + ratio_log_pdf(t.m, 1.0 - u);
}

inline double left_riv_pdf(const Triplet& t, double u) { return std::exp(left_riv_log_pdf(t, u)); }

/// F_R(v) = [P(M/2, M(v+1)/2)]^{Ns} for v >= 0.
inline double right_riv_cdf(const Triplet& t, double v) {
    detail::require_nonnegative(v, "right_riv_cdf");
    const double lq = specfun::log_reg_upper_gamma(t.half_m(), t.half_m() * (v + 1.0));
    if (std::isinf(lq)) return 1.0;  // Q underflowed: P = 1 exactly in doubles
    // ln P = ln(1 - Q); for tiny Q, -ln P = Q to full precision
    const double log_neg_lnp = lq < -37.0 ? lq : std::log(-std::log1p(-std::exp(lq)));
    const double e = t.log_ns.value + log_neg_lnp;
    if (e > 709.0) return 0.0;
    const double expo = -std::exp(e);
    return expo < -745.0 ? 0.0 : std::exp(expo);
}

inline double right_riv_log_pdf(const Triplet& t, double v) {
    detail::require_nonnegative(v, "right_riv_log_pdf");
    const double a = t.half_m();
    const double lq = specfun::log_reg_upper_gamma(a, a * (v + 1.0));
    double tail = 0.0;  // (Ns - 1) ln P
    if (!std::isinf(lq)) {
        const double log_neg_lnp = lq < -37.0 ? lq : std::log(-std::log1p(-std::exp(lq)));
        const double e = detail::log_count_minus_one(t.log_ns.value) + log_neg_lnp;
        tail = e > 709.0 ? -kInf : -std::exp(e);
    }
    return t.log_ns.value + tail + ratio_log_pdf(t.m, v + 1.0);
}

inline double right_riv_pdf(const Triplet& t, double v) { return std::exp(right_riv_log_pdf(t, v)); }

/// Symmetric restricted-isometry constant max{d_L, d_R}.
inline double symmetric_ric(double d_left, double d_right) {
    if (!(d_left >= 0.0 && d_left <= 1.0)) throw std::domain_error("symmetric_ric: d_left outside [0, 1]");
    if (!(d_right >= 0.0)) throw std::domain_error("symmetric_ric: d_right < 0");
    return std::max(d_left, d_right);
}

// ---------------------------------------------------------------------------
// Extreme-value limit laws
// ---------------------------------------------------------------------------

/// Weibull constants for the left RIV:
///   q = 3 * (2/M) exp((2/M)[lnGamma(M/2) + ln(M/2) - ln C(N,K)]),  beta = M/2.
/// The factor 3 is the tail-scale correction; `corrected = false` drops it
/// for sensitivity studies.
inline WeibullParams weibull_params(const Triplet& t, bool corrected = true) {
    const double a = t.half_m();
    const double e = (2.0 / t.m) * (specfun::log_gamma(a) + std::log(a) - t.log_ns.value);
    const double q = (corrected ? 3.0 : 1.0) * (2.0 / t.m) * std::exp(e);
    return WeibullParams{q, a};
}

/// Gumbel constants for the right RIV:
///   s = 2/M,  l = s [ln Ns + (M/2 - 1) ln ln Ns - lnGamma(M/2)].
inline GumbelParams gumbel_params(const Triplet& t) {
    if (t.log_ns.value < std::log(3.0) - 1e-12)
        throw std::domain_error("gumbel_params: requires N_s >= 3 (ln ln N_s regime)");
    const double a = t.half_m();
    const double s = 2.0 / t.m;
    const double l = s * (t.log_ns.value + (a - 1.0) * std::log(t.log_ns.value) - specfun::log_gamma(a));
    return GumbelParams{s, l};
}

/// Weibull CDF exp(-((1-u)/q)^beta) on u <= 1.
inline double weibull_cdf(const WeibullParams& w, double u) {
    const double z = (1.0 - u) / w.q;
    if (z <= 0.0) return 1.0;
    const double e = w.beta * std::log(z);
    if (e > 709.0) return 0.0;
    const double p = std::exp(e);
    return p > 745.0 ? 0.0 : std::exp(-p);
}

inline double weibull_log_pdf(const WeibullParams& w, double u) {
    const double z = (1.0 - u) / w.q;
    if (z <= 0.0) return w.beta > 1.0 ? -kInf : (w.beta == 1.0 ? -std::log(w.q) : kInf);
    const double lz = std::log(z);
    const double e = w.beta * lz;
    return std::log(w.beta / w.q) + (w.beta - 1.0) * lz - (e > 709.0 ? kInf : std::exp(e));
}

/// Gumbel CDF exp(-exp(-(v + 1 - l)/s)) in the shifted variable w = v + 1.
inline double gumbel_cdf(const GumbelParams& g, double v) {
    const double z = (v + 1.0 - g.l) / g.s;
    if (z < -709.0) return 0.0;
    const double e = std::exp(-z);
    return e > 745.0 ? 0.0 : std::exp(-e);
}

inline double gumbel_log_pdf(const GumbelParams& g, double v) {
    const double z = (v + 1.0 - g.l) / g.s;
    const double e = z < -709.0 ? kInf : std::exp(-z);
    return -std::log(g.s) - (e + z);
}

inline double left_riv_cdf_asym(const Triplet& t, double u) {
    detail::require_unit_interval(u, "left_riv_cdf_asym");
    return weibull_cdf(weibull_params(t), u);
}

inline double left_riv_log_pdf_asym(const Triplet& t, double u) {
    detail::require_unit_interval(u, "left_riv_log_pdf_asym");
    return weibull_log_pdf(weibull_params(t), u);
}

inline double left_riv_pdf_asym(const Triplet& t, double u) { return std::exp(left_riv_log_pdf_asym(t, u)); }

inline double right_riv_cdf_asym(const Triplet& t, double v) {
    detail::require_nonnegative(v, "right_riv_cdf_asym");
    return gumbel_cdf(gumbel_params(t), v);
}

inline double right_riv_log_pdf_asym(const Triplet& t, double v) {
    detail::require_nonnegative(v, "right_riv_log_pdf_asym");
    return gumbel_log_pdf(gumbel_params(t), v);
}

inline double right_riv_pdf_asym(const Triplet& t, double v) { return std::exp(right_riv_log_pdf_asym(t, v)); }

// ---------------------------------------------------------------------------
// Effective support of the left limit law
// ---------------------------------------------------------------------------

/// [u_left, u_right] with F^inf_L(u_left) = eps and F^inf_L(u_right) = 1 - eps,
/// clamped to [0, 1].
struct SupportInterval {
    double lower = 0.0;          // LESP
    double upper = 0.0;          // UESP
    bool lower_clamped = false;
    bool upper_clamped = false;

    double width() const { return upper - lower; }
};

inline SupportInterval left_support(const Triplet& t, double eps) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("left_support: requires 0 < eps < 0.5");
    const WeibullParams w = weibull_params(t);
    const double inv_beta = 1.0 / w.beta;
    // (ln 1/eps)^(1/beta) and (ln 1/(1-eps))^(1/beta), the latter via log1p
    const double lo = 1.0 - w.q * std::exp(inv_beta * std::log(-std::log(eps)));
    const double hi = 1.0 - w.q * std::exp(inv_beta * std::log(-std::log1p(-eps)));
    SupportInterval s;
    s.lower_clamped = lo < 0.0 || lo > 1.0;
    s.upper_clamped = hi < 0.0 || hi > 1.0;
    s.lower = std::clamp(lo, 0.0, 1.0);
    s.upper = std::clamp(hi, 0.0, 1.0);
    return s;
}

}  // namespace rivlab::rivdist
