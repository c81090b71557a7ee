// Critical functions over the phase-transition space (rho, delta) = (K/M, M/N):
// closed-form 1-eps quantiles of the left (Weibull) and right (Gumbel) RIV
// limit laws under the continuous relaxation K = rho*delta*N, M = delta*N,
// and level-curve extraction by bisection in rho.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rivlab/rivdist.hpp"

namespace rivlab::critical {

/// A point of the PT space plus the ambient dimension and quantile level.
struct PhasePoint {
    double rho = 0.0;       // K/M in (0, 1]
    double delta = 0.0;     // M/N in (0, 1]
    double ambient_n = 0.0; // N
    double eps = 1e-3;      // quantile tail mass

    PhasePoint(double rho_, double delta_, double ambient_n_, double eps_)
        : rho(rho_), delta(delta_), ambient_n(ambient_n_), eps(eps_) {
        if (!(rho > 0.0 && rho <= 1.0)) throw std::domain_error("PhasePoint: requires 0 < rho <= 1");
        if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("PhasePoint: requires 0 < delta <= 1");
        if (!(delta * ambient_n >= 2.0)) throw std::domain_error("PhasePoint: requires M = delta*N >= 2");
        if (!(rho * delta * ambient_n >= 1.0)) throw std::domain_error("PhasePoint: requires K = rho*delta*N >= 1");
        if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("PhasePoint: requires 0 < eps < 1");
    }

    rivdist::Triplet triplet() const {
        return rivdist::Triplet(rho * delta * ambient_n, delta * ambient_n, ambient_n);
    }
};

/// An ordered level curve, support band, or PT boundary: (delta, value) pairs
/// with strictly increasing deltas.
struct CurveSeries {
    enum class Kind { level_curve, support_band, pt_boundary };

    std::vector<std::pair<double, double>> points;
    Kind kind = Kind::level_curve;

    void append(double delta, double value) {
        if (!std::isfinite(delta) || !std::isfinite(value))
            throw std::domain_error("CurveSeries: non-finite point");
        if (!points.empty() && !(delta > points.back().first))
            throw std::domain_error("CurveSeries: deltas must be strictly increasing");
        points.emplace_back(delta, value);
    }
};

/// A critical value plus whether it landed inside the op's stated range
/// ([0,1] for the left, >= 0 for the right). The raw formula value is kept
/// either way so quantile round trips stay exact.
struct CriticalValue {
    double value = 0.0;
    bool in_range = true;
};

/// Left critical function: u with F_L^inf(u) = 1 - eps,
/// u = 1 - q (ln 1/(1-eps))^(1/beta).
inline CriticalValue u_crit(const PhasePoint& p) {
    const rivdist::WeibullParams w = rivdist::weibull_params(p.triplet());
    const double u = 1.0 - w.q * std::exp(std::log(-std::log1p(-p.eps)) / w.beta);
    return CriticalValue{u, u >= 0.0 && u <= 1.0};
}

/// Right critical function: v with F_R^inf(v) = 1 - eps,
/// v = l - 1 - s ln ln(1/(1-eps)).
inline CriticalValue v_crit(const PhasePoint& p) {
    const rivdist::GumbelParams g = rivdist::gumbel_params(p.triplet());
    const double v = g.l - 1.0 - g.s * std::log(-std::log1p(-p.eps));
    return CriticalValue{v, v >= 0.0};
}

/// One grid entry of a level curve; `found = false` flags deltas where no
/// root exists in the bracket (never silently extrapolated).
struct LevelPoint {
    double delta = 0.0;
    double rho = 0.0;
    double residual = 0.0;
    bool found = false;
};

namespace detail {

/// Smallest admissible rho at this delta (K = 1) with a hair of slack.
inline double rho_floor(double delta, double ambient_n) {
    return (1.0 / (delta * ambient_n)) * (1.0 + 1e-9);
}

/// Bisection for a strictly increasing f with f(root) = 0, tolerance in rho.
template <typename F>
inline bool bisect_increasing(F&& f, double lo, double hi, double tol, double& root) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo < 0.0) || !(fhi >= 0.0)) return false;
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    root = 0.5 * (lo + hi);
    return true;
}

}  // namespace detail

/// For each delta, the rho with u_crit(rho, delta) = level. u_crit is
/// increasing in rho only while N_s is (K <= N/2), so the bracket is capped
/// at rho = 1/(2 delta).
inline std::vector<LevelPoint> level_curve(double level, double ambient_n, double eps,
                                           std::span<const double> delta_grid) {
    if (!(level > 0.0 && level < 1.0)) throw std::domain_error("level_curve: requires level in (0, 1)");
    std::vector<LevelPoint> out;
    out.reserve(delta_grid.size());
    for (const double delta : delta_grid) {
        if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("level_curve: delta grid outside (0, 1]");
        LevelPoint pt;
        pt.delta = delta;
        const double lo = detail::rho_floor(delta, ambient_n);
        const double hi = std::min(1.0, 0.5 / delta);
        const auto f = [&](double rho) { return u_crit(PhasePoint(rho, delta, ambient_n, eps)).value - level; };
        double root = 0.0;
        if (lo < hi && detail::bisect_increasing(f, lo, hi, 1e-10, root)) {
            pt.rho = root;
            pt.residual = std::fabs(f(root));
            pt.found = true;
        }
        out.push_back(pt);
    }
    return out;
}

inline CurveSeries to_series(const std::vector<LevelPoint>& pts, CurveSeries::Kind kind) {
    CurveSeries s;
    s.kind = kind;
    for (const auto& p : pts)
        if (p.found) s.append(p.delta, p.rho);
    return s;
}

/// Log-spaced grid on [lo, hi], endpoints included.
inline std::vector<double> log_spaced_grid(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi > lo && count >= 2)) throw std::domain_error("log_spaced_grid: bad arguments");
    std::vector<double> g(static_cast<std::size_t>(count));
    const double llo = std::log(lo);
    const double lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

/// Linearly spaced grid on [lo, hi], endpoints included.
inline std::vector<double> linear_grid(double lo, double hi, int count) {
    if (!(hi > lo && count >= 2)) throw std::domain_error("linear_grid: bad arguments");
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    g.back() = hi;
    return g;
}

}  // namespace rivlab::critical
