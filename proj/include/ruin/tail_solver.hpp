#pragma once

// Fixed point g = g0 + Tg on [u0, ∞), g0(u) = u^-γ e^(-α/u).
//
// The unknown is carried in weighted form w(u) = u^γ e^(α/u) g(u) on the
// compactified variable v = u0/u ∈ [0, 1] (v = 0 is u = ∞), where
//
//   w(v) = 1 + μ ∫_0^v q(s) ds,
//   q(s) = (1/u0) e^(αs/u0) · t^γ ∫_0^∞ g(t + z) F̄(z) dz,   t = u0/s,
//
// and q(0) = w(0) E[ξ] / u0. w is stored as a cubic Hermite function whose
// nodal slopes are the exact derivative μ q(v_j) of the current iterate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <vector>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"
#include "ruin/grid_function.hpp"
#include "ruin/model.hpp"
#include "ruin/quadrature.hpp"

namespace ruin {

struct TailOptions {
    int nodes = 128;            ///< number of v-intervals (Chebyshev-Lobatto clustering)
    int gauss_points = 6;       ///< Gauss-Legendre points per v-interval for ∫ q
    double quad_eps = 1e-12;    ///< relative accuracy of the inner F̄ integrals
    int max_iterations = 200;
};

struct IterationRecord {
    double delta = 0;          ///< ‖g_{n+1} - g_n‖_{γ,u0} on the grid
    double ratio = 0;          ///< delta_n / delta_{n-1} (0 for the first iteration)
    double min_increment = 0;  ///< min over nodes of w_{n+1} - w_n
};

/// Chebyshev-Lobatto nodes on [0, 1].
inline std::vector<double> compact_grid(int n) {
    detail::require(n >= 2, "compact grid needs at least two intervals");
    std::vector<double> v(n + 1);
    for (int j = 0; j <= n; ++j) v[j] = 0.5 * (1 - std::cos(M_PI * j / n));
    v[0] = 0;
    v[n] = 1;
    return v;
}

/// Weighted sup-norm sup_{u >= u0} u^γ |g(u)| of a function given by its weight w on the v-grid.
inline double weighted_norm(const std::vector<double>& v, const std::vector<double>& w, double alpha,
                            double u0) {
    double s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) s = std::max(s, std::exp(-alpha * v[j] / u0) * std::abs(w[j]));
    return s;
}

class TailSolution {
public:
    TailSolution(DerivedConstants k, double u0, double theta, GridFunction w,
                 std::vector<IterationRecord> log)
        : k_(k), u0_(u0), theta_(theta), w_(std::move(w)), log_(std::move(log)) {}

    const DerivedConstants& constants() const { return k_; }
    double u0() const { return u0_; }
    double theta() const { return theta_; }
    /// w as a function of v = u0/u.
    const GridFunction& weight_grid() const { return w_; }
    const std::vector<IterationRecord>& log() const { return log_; }

    double w_inf() const { return w_(0.0); }
    /// w(u) = u^γ e^(α/u) g*(u) for u >= u0; u = +inf gives w(∞).
    double weight(double u) const { return w_(std::isinf(u) ? 0.0 : std::min(u0_ / u, 1.0)); }

    double operator()(double u) const {
        if (std::isinf(u)) return 0.0;
        return weight(u) * std::pow(u, -k_.gamma) * std::exp(-k_.alpha / u);
    }

    double derivative(double u) const {
        const double v = u0_ / u;
        const double wu = -v / u * w_.derivative(v);  // dw/du
        return std::pow(u, -k_.gamma) * std::exp(-k_.alpha / u) *
               (wu + w_(v) * (k_.alpha / (u * u) - k_.gamma / u));
    }

    /// ∫_u^∞ g*(t) dt for u >= u0, i.e. u0^(1-γ) ∫_0^{u0/u} w(v) v^(γ-2) e^(-αv/u0) dv.
    double tail_integral(double u, double rel_tol = 1e-13) const {
        detail::require(u >= u0_ * (1 - 1e-14), "tail_integral: u below u0");
        const double top = std::min(u0_ / u, 1.0);
        const auto& v = w_.nodes();
        const double g = k_.gamma, a = k_.alpha;
        auto h = [&](double s) { return w_(s) * std::pow(s, g - 2) * std::exp(-a * s / u0_); };
        // First panel: v = v1 x^p with p = 1/(γ-1) removes the v^(γ-2) endpoint behaviour.
        const double v1 = std::min(v[1], top);
        const double p = 1 / (g - 1);
        auto h0 = [&](double x) {
            if (x <= 0) return w_(0.0) * p * std::pow(v1, g - 1);
            const double s = v1 * std::pow(x, p);
            return w_(s) * std::exp(-a * s / u0_) * p * std::pow(v1, g - 1);
        };
        const QuadOptions opt{1e-300, rel_tol, 20000};
        double total = integrate_adaptive(h0, 0.0, 1.0, opt).value;
        if (top > v1) {
            std::vector<double> br;
            for (double x : v)
                if (x > v1 && x < top) br.push_back(x);
            total += integrate_adaptive(h, v1, top, opt, br).value;
        }
        return std::pow(u0_, 1 - g) * total;
    }

private:
    DerivedConstants k_;
    double u0_;
    double theta_;
    GridFunction w_;
    std::vector<IterationRecord> log_;
};

/// A g = Φ'-like function on [u0, ∞) in weighted form: g(u) = w(u0/u) u^-γ e^(-α/u).
template <typename W>
struct WeightedTail {
    W w;  ///< callable on v ∈ [0, 1]
    DerivedConstants k;
    double u0;

    double operator()(double u) const {
        return w(u0 / u) * std::pow(u, -k.gamma) * std::exp(-k.alpha / u);
    }
};

/// Ag(u) = μ ∫_0^∞ g(u + z) F̄(z) dz.
template <typename G, jump_distribution D>
double apply_A(G&& g, double u, const DerivedConstants& k, const D& dist, double eps = 1e-12,
               const std::vector<double>& z_breaks = {}) {
    detail::require(u > 0, "apply_A: u must be positive");
    if (k.mu == 0) return 0.0;
    return k.mu * integrate_tail_against_F(g, u, dist, eps, 0.0, z_breaks).value;
}

namespace detail {

/// q(s) for the weight callable w (see file comment).
template <typename W, jump_distribution D>
double tail_density(const W& w, double s, const DerivedConstants& k, double u0, const D& dist,
                    double eps) {
    if (s <= 0) return w(0.0) * dist.mean() / u0;
    const double t = u0 / s;
    auto scaled = [&](double x) {  // t^γ g(x)
        return std::pow(t / x, k.gamma) * std::exp(-k.alpha / x) * w(u0 / x);
    };
    const double inner = integrate_tail_against_F(scaled, t, dist, eps).value;
    return std::exp(k.alpha * s / u0) * inner / u0;
}

}  // namespace detail

/// Tg on the grid, in weighted form: returns the Hermite function
/// v -> μ ∫_u^∞ t^(γ-2) e^(α/t) (∫_0^∞ g(t+z) F̄(z) dz) dt, u = u0/v,
/// for g given by its weight callable w(v).
template <typename W, jump_distribution D>
GridFunction apply_T(const W& w, const DerivedConstants& k, const D& dist, double u0,
                     const std::vector<double>& grid, const TailOptions& opt = {}) {
    const std::size_t n = grid.size();
    std::vector<double> vals(n, 0.0), slopes(n, 0.0);
    if (k.mu != 0) {
        const GaussLegendre gl(opt.gauss_points);
        auto q = [&](double s) { return detail::tail_density(w, s, k, u0, dist, opt.quad_eps); };
        for (std::size_t j = 0; j < n; ++j) {
            slopes[j] = k.mu * q(grid[j]);
            if (j > 0) vals[j] = vals[j - 1] + k.mu * gl.integrate(q, grid[j - 1], grid[j]);
        }
    }
    return GridFunction(grid, std::move(vals), std::move(slopes));
}

/// Picard iteration g_{n+1} = g0 + T g_n from g0, stopped when
/// ‖g_{n+1} - g_n‖_{γ,u0} <= tol·(1 - θ), so that the fixed-point error is below tol.
template <jump_distribution D>
TailSolution solve_tail(const DerivedConstants& k, const D& dist, double u0, double tol,
                        const TailOptions& opt = {}) {
    if (!(k.gamma > 0)) throw HypothesisViolated("tail solver requires gamma > 0");
    detail::require(u0 > 0 && std::isfinite(u0), "solve_tail: u0 must be positive");
    detail::require(tol > 0, "solve_tail: tol must be positive");
    const double theta = k.mu * dist.mean() / u0;
    if (!(theta < 1)) {
        throw ValidationError("solve_tail: u0 must exceed mu*E[xi] (contraction constant theta = " +
                              std::to_string(theta) + ")");
    }
    const auto grid = compact_grid(opt.nodes);
    GridFunction w(grid, std::vector<double>(grid.size(), 1.0), std::vector<double>(grid.size(), 0.0));
    std::vector<IterationRecord> log;
    for (int it = 0; it < opt.max_iterations; ++it) {
        GridFunction t = apply_T(w, k, dist, u0, grid, opt);
        std::vector<double> next(grid.size()), diff(grid.size());
        double min_inc = INFINITY;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            next[j] = 1.0 + t.values()[j];
            diff[j] = next[j] - w.values()[j];
            min_inc = std::min(min_inc, diff[j]);
        }
        IterationRecord rec;
        rec.delta = weighted_norm(grid, diff, k.alpha, u0);
        rec.ratio = log.empty() || log.back().delta == 0 ? 0.0 : rec.delta / log.back().delta;
        rec.min_increment = min_inc;
        log.push_back(rec);
        w = GridFunction(grid, std::move(next), t.slopes());
        if (rec.delta <= tol * (1 - theta)) {
            return TailSolution(k, u0, theta, std::move(w), std::move(log));
        }
    }
    std::ostringstream os;
    os.precision(6);
    os << "tail fixed point did not converge in " << opt.max_iterations << " iterations; deltas:";
    for (const auto& r : log) os << ' ' << r.delta;
    throw NonConvergence(os.str());
}

}  // namespace ruin
