// Phase-transition analysis for the Gaussian-encoder / L1-decoder pair:
// the Foucart-Lai recovery functional, its composition with the critical
// functions at doubled sparsity (mu_riv), the geometric-functional-analysis
// baseline (mu_gfa), boundary extraction mu = 1 by bisection in rho, and the
// measurement-bound constant c = 1 / max_delta rho_s(delta).

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rivlab/critical.hpp"

namespace rivlab::phase {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Method { riv, gfa };

inline const char* method_name(Method m) { return m == Method::riv ? "riv" : "gfa"; }

/// Foucart-Lai function mu = (1+sqrt(2))/4 * ((1+dR)/(1-dL) - 1),
/// strictly increasing in both arguments; recovery is guaranteed when mu < 1.
inline double mu_fl(double d_left, double d_right) {
    if (!(d_left >= 0.0)) throw std::domain_error("mu_fl: requires d_left >= 0");
    if (d_left >= 1.0) throw std::domain_error("mu_fl: singular at d_left >= 1");
    if (!(d_right >= 0.0)) throw std::domain_error("mu_fl: requires d_right >= 0");
    return 0.25 * (1.0 + std::sqrt(2.0)) * ((1.0 + d_right) / (1.0 - d_left) - 1.0);
}

/// mu_fl composed with the critical functions at sparsity 2*rho (the
/// recovery condition constrains the order-2K constants). The raw quantile
/// values are used even where they fall outside the formal RIC ranges, so
/// the function stays monotone in rho across the whole bracket; an
/// unsatisfiable left constant (u >= 1) reports +infinity.
inline double mu_riv(const critical::PhasePoint& p) {
    if (!(2.0 * p.rho <= 1.0)) throw std::domain_error("mu_riv: requires 2*rho <= 1");
    const critical::PhasePoint doubled(2.0 * p.rho, p.delta, p.ambient_n, p.eps);
    const double u = critical::u_crit(doubled).value;
    const double v = critical::v_crit(doubled).value;
    if (u >= 1.0) return kInf;
    return 0.25 * (1.0 + std::sqrt(2.0)) * ((1.0 + v) / (1.0 - u) - 1.0);
}

/// Geometric baseline mu(rho, delta) = rho (12 + 8 ln(1/(rho delta))) gamma^2,
/// gamma = exp(ln(1 + 2 ln(e/(rho delta))) / (4 ln(e/(rho delta)))),
/// natural logarithms throughout.
inline double mu_gfa(double rho, double delta) {
    const double z = rho * delta;
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("mu_gfa: requires 0 < rho*delta < 1");
    const double le = 1.0 - std::log(z);  // ln(e/z)
    const double gamma = std::exp(std::log1p(2.0 * le) / (4.0 * le));
    return rho * (12.0 - 8.0 * std::log(z)) * gamma * gamma;
}

/// One boundary grid entry; `found = false` where mu = 1 has no root in the
/// feasible bracket.
struct BoundaryPoint {
    double delta = 0.0;
    double rho = 0.0;
    double residual = 0.0;
    bool found = false;
};

/// A PT boundary rho_s(delta) with its provenance parameters, so the
/// measurement bound can re-solve off-grid.
struct Boundary {
    critical::CurveSeries curve;       // found points only
    std::vector<BoundaryPoint> grid;   // every grid delta, flagged
    Method method = Method::riv;
    double ambient_n = 0.0;            // used when method == riv
    double eps = 0.0;                  // used when method == riv
};

namespace detail {

/// Solve mu(rho, delta) = 1 for one delta; returns found flag.
inline bool solve_boundary_rho(Method method, double delta, double ambient_n, double eps,
                               double& rho, double& residual) {
    double lo = 0.0, hi = 0.0;
    std::function<double(double)> f;
    if (method == Method::riv) {
        lo = 0.5 * critical::detail::rho_floor(delta, ambient_n);  // 2*rho*delta*N >= 1
        hi = std::min(0.5, 0.25 / delta);                          // monotone branch, 2K <= N/2
        f = [=](double r) { return mu_riv(critical::PhasePoint(r, delta, ambient_n, eps)) - 1.0; };
    } else {
        lo = 1e-12;
        hi = std::min(1.0, (1.0 - 1e-12) / delta);
        f = [=](double r) { return mu_gfa(r, delta) - 1.0; };
    }
    if (!(lo < hi)) return false;
    if (!critical::detail::bisect_increasing(f, lo, hi, 1e-13, rho)) return false;
    residual = std::fabs(f(rho));
    return residual <= 1e-8;
}

}  // namespace detail

inline Boundary pt_boundary(Method method, double ambient_n, double eps,
                            std::span<const double> delta_grid) {
    Boundary b;
    b.method = method;
    b.ambient_n = ambient_n;
    b.eps = eps;
    b.curve.kind = critical::CurveSeries::Kind::pt_boundary;
    for (const double delta : delta_grid) {
        if (!(delta > 0.0 && delta <= 1.0)) throw std::domain_error("pt_boundary: delta grid outside (0, 1]");
        BoundaryPoint pt;
        pt.delta = delta;
        if (detail::solve_boundary_rho(method, delta, ambient_n, eps, pt.rho, pt.residual)) {
            if (!(pt.rho > 0.0 && pt.rho < 1.0))
                throw std::runtime_error("pt_boundary: root escaped (0, 1)");
            pt.found = true;
            b.curve.append(pt.delta, pt.rho);
        }
        b.grid.push_back(pt);
    }
    return b;
}

/// Measurement-bound constant c = 1 / max_delta rho_s(delta). The grid
/// maximizer is refined by golden-section search between its neighbors.
inline double measurement_bound(const Boundary& b) {
    const auto& pts = b.curve.points;
    if (pts.empty()) throw std::domain_error("measurement_bound: empty boundary");

    std::size_t im = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].second > pts[im].second) im = i;

    const auto rho_at = [&](double delta) {
        double rho = 0.0, residual = 0.0;
        if (!detail::solve_boundary_rho(b.method, delta, b.ambient_n, b.eps, rho, residual))
            return -kInf;
        return rho;
    };

    double lo = pts[im > 0 ? im - 1 : 0].first;
    double hi = pts[std::min(im + 1, pts.size() - 1)].first;
    double best = pts[im].second;
    if (hi > lo) {
        constexpr double kGolden = 0.6180339887498949;
        double x1 = hi - kGolden * (hi - lo);
        double x2 = lo + kGolden * (hi - lo);
        double f1 = rho_at(x1);
        double f2 = rho_at(x2);
        for (int it = 0; it < 60 && hi - lo > 1e-10; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + kGolden * (hi - lo);
                f2 = rho_at(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - kGolden * (hi - lo);
                f1 = rho_at(x1);
            }
        }
        best = std::max({best, f1, f2});
    }
    return 1.0 / best;
}

/// Reference bounds quoted from the literature, never computed here.
struct CitedBound {
    const char* approach;
    double c;
};

inline constexpr CitedBound kCitedPolytopeBound{"polytope", 5.9};
inline constexpr CitedBound kCitedEvBound{"ev", 317.0};

}  // namespace rivlab::phase
