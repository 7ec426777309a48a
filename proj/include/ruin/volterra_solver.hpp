#pragma once

// Second-kind Volterra equation on (0, u0] for g = Φ' below the gluing point:
//
//   g(u) = f(u) + ∫_u^{u0} K(u, y) g(y) dy,
//   f(u) = M(u0)/M(u) g*(u0) + 1/M(u) ∫_u^{u0} t^(γ-2) e^(α/t) H(t) dt,
//   K(u, y) = μ/M(u) ∫_u^y t^(γ-2) e^(α/t) F̄(y - t) dt,
//   H(u) = μ ∫_{u0}^∞ g*(y) F̄(y - u) dy,          M(u) = u^γ e^(α/u).
//
// All 1/M(u)-weighted integrals go through integrate_weighted_relative, which
// is well conditioned down to u -> 0; u = 0 itself uses the limits
// f(0) = H(0)/α and K(0, y) = (μ/α) F̄(y-).
//
// The solution is written g = E + R with E(u) = g*(u0) M(u0)/M(u) the exact
// homogeneous part. R is smooth and is what gets interpolated; E is evaluated
// in closed form, so the μ = 0 case reproduces g0 exactly.
//
// The march runs from u0 down to 0 on u_j = u0 (j/n)^2. At node u_i the
// integral term is evaluated in its un-swapped form
//   1/M(u_i) ∫_{u_i}^{u0} t^(γ-2) e^(α/t) μ ∫_t^{u0} g(y) F̄(y - t) dy dt,
// with g on [u_j, u_{j+1}] the cubic through nodes j..j+3 (nodes past u0 are
// taken from g*). Only the unknown g_i enters interval i, so each step is a
// scalar linear equation, carried through the quadrature as an Affine value.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"
#include "ruin/grid_function.hpp"
#include "ruin/model.hpp"
#include "ruin/quadrature.hpp"
#include "ruin/tail_solver.hpp"

namespace ruin {

struct VolterraOptions {
    int grid_n = 256;          ///< number of intervals of the graded mesh, >= 64
    int gauss_points = 6;      ///< Gauss-Legendre points per interval for the inner y-integral
    double quad_eps = 1e-12;   ///< accuracy of H and f
    double march_tol = 1e-11;  ///< relative accuracy of the outer integral at each node
};

/// log M(u) = γ log u + α/u.
inline double log_M(double u, const DerivedConstants& k) { return k.gamma * std::log(u) + k.alpha / u; }

/// H(u) = μ ∫_{u0}^∞ g*(y) F̄(y - u) dy for 0 <= u <= u0.
template <jump_distribution D>
double compute_H(const TailSolution& gstar, double u, const D& dist, double eps = 1e-12) {
    const auto& k = gstar.constants();
    const double u0 = gstar.u0();
    detail::require(u >= 0 && u <= u0, "compute_H: u outside [0, u0]");
    if (k.mu == 0) return 0.0;
    auto g = [&](double x) { return gstar(std::max(x, u0)); };
    return k.mu * integrate_tail_against_F(g, u, dist, eps, u0 - u).value;
}

/// K(u, y) for 0 <= u <= y.
template <jump_distribution D>
double compute_K(double u, double y, const DerivedConstants& k, const D& dist, double rel_tol = 1e-12) {
    detail::require(u >= 0 && y >= u, "compute_K: need 0 <= u <= y");
    if (k.mu == 0) return 0.0;
    if (u == 0) return k.mu / k.alpha * dist.tail_left(y);
    if (y == u) return 0.0;
    std::vector<double> br;
    for (double a : dist.atoms()) br.push_back(y - a);
    auto fbar = [&](double t) { return dist.tail(y - t); };
    return k.mu * integrate_weighted_relative(fbar, u, y, k.gamma, k.alpha, QuadOptions{1e-300, rel_tol, 20000}, br).value;
}

/// Data of the Volterra problem that depends only on the tail solution.
template <jump_distribution D>
class VolterraProblem {
public:
    VolterraProblem(const TailSolution& gstar, D dist, double quad_eps = 1e-12)
        : gstar_(gstar), dist_(std::move(dist)), eps_(quad_eps) {
        require_analytic_hypotheses(gstar_.constants());
        h0_ = H(0.0);
    }

    const DerivedConstants& constants() const { return gstar_.constants(); }
    double u0() const { return gstar_.u0(); }
    const D& dist() const { return dist_; }
    const TailSolution& gstar() const { return gstar_; }
    double quad_eps() const { return eps_; }

    double H(double u) const { return compute_H(gstar_, u, dist_, eps_); }
    double H0() const { return h0_; }

    /// M(u0)/M(u) g*(u0), the part of f solving the homogeneous equation.
    double homogeneous(double u) const {
        if (u <= 0) return 0.0;
        const auto& k = constants();
        return gstar_(u0()) * std::exp(log_M(u0(), k) - log_M(u, k));
    }

    double homogeneous_derivative(double u) const {
        if (u <= 0) return 0.0;
        const auto& k = constants();
        return homogeneous(u) * (k.alpha / (u * u) - k.gamma / u);
    }

    double f(double u) const {
        detail::require(u >= 0 && u <= u0(), "compute_f: u outside [0, u0]");
        const auto& k = constants();
        if (u == 0) return h0_ / k.alpha;
        if (u == u0()) return gstar_(u0());
        auto h = [&](double t) { return H(std::min(t, u0())); };
        const auto part = integrate_weighted_relative(h, u, u0(), k.gamma, k.alpha,
                                                      QuadOptions{1e-300, eps_, 20000});
        return homogeneous(u) + part.value;
    }

    double K(double u, double y) const { return compute_K(u, y, constants(), dist_, eps_); }

    /// (1/M(u)) ∫_u^{u0} t^(γ-2) e^(α/t) φ(t) dt, with the u = 0 limit φ(0)/α.
    template <typename Phi>
    auto weighted(Phi&& phi, double u, double rel_tol) const {
        const auto& k = constants();
        if (u == 0) return (1 / k.alpha) * phi(0.0);
        return integrate_weighted_relative(phi, u, u0(), k.gamma, k.alpha, QuadOptions{1e-300, rel_tol, 20000})
            .value;
    }

private:
    TailSolution gstar_;
    D dist_;
    double eps_;
    double h0_ = 0;
};

template <jump_distribution D>
double compute_f(double u, const VolterraProblem<D>& p) {
    return p.f(u);
}

class VolterraSolution {
public:
    VolterraSolution(DerivedConstants k, double u0, double gstar_u0, std::vector<double> nodes,
                     std::vector<double> g, GridFunction remainder, std::vector<double> h_nodes,
                     std::vector<double> f_nodes)
        : k_(k), u0_(u0), gstar_u0_(gstar_u0), nodes_(std::move(nodes)), g_(std::move(g)),
          rem_(std::move(remainder)), h_(std::move(h_nodes)), f_(std::move(f_nodes)) {}

    const std::vector<double>& nodes() const { return nodes_; }
    /// g_* at the nodes.
    const std::vector<double>& values() const { return g_; }
    const std::vector<double>& H_nodes() const { return h_; }
    const std::vector<double>& f_nodes() const { return f_; }
    const GridFunction& remainder() const { return rem_; }
    double u0() const { return u0_; }
    const DerivedConstants& constants() const { return k_; }
    double boundary_value() const { return g_.front(); }

    double homogeneous(double u) const {
        if (u <= 0) return 0.0;
        return gstar_u0_ * std::exp(log_M(u0_, k_) - log_M(u, k_));
    }

    double operator()(double u) const {
        detail::require(u >= 0 && u <= u0_ * (1 + 1e-14), "VolterraSolution: u outside [0, u0]");
        return homogeneous(u) + rem_(std::min(u, u0_));
    }

    double derivative(double u) const {
        const double e = u > 0 ? homogeneous(u) * (k_.alpha / (u * u) - k_.gamma / u) : 0.0;
        return e + rem_.derivative(std::min(u, u0_));
    }

    /// ∫_a^b g_* for 0 <= a <= b <= u0.
    double integral(double a, double b, double rel_tol = 1e-13) const {
        auto e = [&](double u) { return homogeneous(u); };
        std::vector<double> br;
        for (double x : nodes_)
            if (x > a && x < b && br.size() < 64) br.push_back(x);
        const double ep = b > a ? integrate_adaptive(e, a, b, QuadOptions{1e-300, rel_tol, 20000}, br).value : 0.0;
        return ep + rem_.integral(a, b);
    }

private:
    DerivedConstants k_;
    double u0_;
    double gstar_u0_;
    std::vector<double> nodes_;
    std::vector<double> g_;
    GridFunction rem_;
    std::vector<double> h_, f_;
};

/// u_j = u0 (j/n)^2, j = 0..n.
inline std::vector<double> graded_mesh(double u0, int n) {
    std::vector<double> u(n + 1);
    for (int j = 0; j <= n; ++j) u[j] = u0 * (static_cast<double>(j) / n) * (static_cast<double>(j) / n);
    u[n] = u0;
    return u;
}

namespace detail {

/// Lagrange basis values of nodes x[lo..lo+3] at y.
inline std::array<double, 4> lagrange_basis(const std::vector<double>& x, std::size_t lo, double y) {
    std::array<double, 4> l{};
    for (std::size_t a = 0; a < 4; ++a) {
        double v = 1;
        for (std::size_t b = 0; b < 4; ++b)
            if (b != a) v *= (y - x[lo + b]) / (x[lo + a] - x[lo + b]);
        l[a] = v;
    }
    return l;
}

}  // namespace detail

template <jump_distribution D>
VolterraSolution solve_volterra(const VolterraProblem<D>& p, const VolterraOptions& opt = {}) {
    detail::require(opt.grid_n >= 64, "solve_volterra: grid_n must be at least 64");
    const auto& k = p.constants();
    const double u0 = p.u0();
    const int n = opt.grid_n;
    const auto& gstar = p.gstar();
    const auto& dist = p.dist();

    // Mesh with two extension nodes mirrored past u0.
    std::vector<double> x = graded_mesh(u0, n);
    x.push_back(u0 + (u0 - x[n - 1]));
    x.push_back(u0 + (u0 - x[n - 2]));
    auto E = [&](double u) { return u <= 0 ? 0.0 : p.homogeneous(u); };

    std::vector<double> rem(n + 3, 0.0);  // R = g - E at the nodes
    rem[n] = gstar(u0) - E(u0);
    rem[n + 1] = gstar(x[n + 1]) - E(x[n + 1]);
    rem[n + 2] = gstar(x[n + 2]) - E(x[n + 2]);

    const GaussLegendre gl(opt.gauss_points);
    const std::size_t m = gl.x.size();
    // Per interval: Gauss nodes in y, weights, and g at the nodes once it is known.
    std::vector<std::vector<double>> ynode(n), ywt(n), gval(n);
    std::vector<std::vector<std::array<double, 4>>> basis(n);
    for (int j = 0; j < n; ++j) {
        const double c = 0.5 * (x[j] + x[j + 1]), h = 0.5 * (x[j + 1] - x[j]);
        for (std::size_t q = 0; q < m; ++q) {
            ynode[j].push_back(c + h * gl.x[q]);
            ywt[j].push_back(h * gl.w[q]);
            basis[j].push_back(detail::lagrange_basis(x, j, ynode[j].back()));
        }
        gval[j].assign(m, 0.0);
    }
    auto fill_interval = [&](int j) {
        for (std::size_t q = 0; q < m; ++q) {
            const auto& l = basis[j][q];
            gval[j][q] = E(ynode[j][q]) + l[0] * rem[j] + l[1] * rem[j + 1] + l[2] * rem[j + 2] + l[3] * rem[j + 3];
        }
    };
    const auto atoms = dist.atoms();

    // μ ∫_t^{u0} g(y) F̄(y - t) dy as an affine function of the unknown R_i.
    auto a_low = [&](double t, int i) -> Affine {
        auto it = std::upper_bound(x.begin(), x.begin() + n + 1, t);
        int kk = std::clamp(static_cast<int>(it - x.begin()) - 1, 0, n - 1);
        Affine acc{};
        auto fbar = [&](double y) { return dist.tail(y - t); };
        // Partial interval [t, x_{kk+1}], possibly split at atoms.
        auto partial = [&](double a, double b) {
            const double c = 0.5 * (a + b), h = 0.5 * (b - a);
            for (std::size_t q = 0; q < m; ++q) {
                const double y = c + h * gl.x[q];
                const auto l = detail::lagrange_basis(x, kk, y);
                double known = E(y);
                for (int s = 0; s < 4; ++s)
                    if (kk + s != i) known += l[s] * rem[kk + s];
                const double coef = kk == i ? l[0] : 0.0;
                const double wf = h * gl.w[q] * fbar(y);
                acc += Affine{wf * known, wf * coef};
            }
        };
        auto split_run = [&](double a, double b, auto&& body) {
            std::vector<double> pts{a};
            for (double d : atoms)
                if (t + d > a && t + d < b) pts.push_back(t + d);
            pts.push_back(b);
            std::sort(pts.begin(), pts.end());
            for (std::size_t s = 0; s + 1 < pts.size(); ++s) body(pts[s], pts[s + 1]);
        };
        if (x[kk + 1] > t) split_run(t, x[kk + 1], partial);
        for (int j = kk + 1; j < n; ++j) {
            bool has_atom = false;
            for (double d : atoms)
                if (t + d > x[j] && t + d < x[j + 1]) has_atom = true;
            if (!has_atom) {
                double s = 0;
                for (std::size_t q = 0; q < m; ++q) s += ywt[j][q] * gval[j][q] * fbar(ynode[j][q]);
                acc.c0 += s;
            } else {
                split_run(x[j], x[j + 1], [&](double a, double b) {
                    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
                    for (std::size_t q = 0; q < m; ++q) {
                        const double y = c + h * gl.x[q];
                        const auto l = detail::lagrange_basis(x, j, y);
                        const double gy = E(y) + l[0] * rem[j] + l[1] * rem[j + 1] + l[2] * rem[j + 2] + l[3] * rem[j + 3];
                        acc.c0 += h * gl.w[q] * gy * fbar(y);
                    }
                });
            }
        }
        return k.mu * acc;
    };

    std::vector<double> fvals(n + 1), hvals(n + 1);
    for (int i = 0; i <= n; ++i) {
        hvals[i] = p.H(x[i]);
        fvals[i] = p.f(x[i]);
    }
    std::vector<double> g(n + 1);
    g[n] = gstar(u0);
    for (int i = n - 1; i >= 0; --i) {
        Affine integral{};
        if (k.mu != 0) integral = p.weighted([&](double t) { return a_low(t, i); }, x[i], opt.march_tol);
        const double ei = E(x[i]);
        const double denom = 1 - integral.c1;
        if (!(denom > 0) || !std::isfinite(integral.c0)) {
            std::ostringstream os;
            os << "Volterra march broke down at u = " << x[i] << " (coefficient " << integral.c1 << ")";
            throw NonConvergence(os.str());
        }
        rem[i] = (fvals[i] - ei + integral.c0) / denom;
        g[i] = ei + rem[i];
        fill_interval(i);
    }

    // Hermite interpolant of R with slopes from local cubics (extension nodes included).
    std::vector<double> slopes = detail::lagrange_slopes(x, rem);
    std::vector<double> xs(x.begin(), x.begin() + n + 1), rs(rem.begin(), rem.begin() + n + 1);
    slopes.resize(n + 1);
    GridFunction remainder(std::move(xs), std::move(rs), std::move(slopes));
    return VolterraSolution(k, u0, gstar(u0), graded_mesh(u0, n), std::move(g), std::move(remainder),
                            std::move(hvals), std::move(fvals));
}

/// g_*(u) - f(u) - ∫_u^{u0} K(u, y) g_*(y) dy, with K from compute_K and the
/// y-integral by adaptive quadrature (independent of the march weights).
template <jump_distribution D>
double volterra_residual(const VolterraProblem<D>& p, const VolterraSolution& sol, double u, double rel_tol = 1e-11) {
    const double u0 = p.u0();
    detail::require(u >= 0 && u <= u0, "volterra_residual: u outside [0, u0]");
    if (u == u0) return sol(u0) - p.f(u0);
    auto integrand = [&](double y) { return p.K(u, y) * sol(y); };
    // K(u, .) rises from 0 on the scale u²/α; put breakpoints there.
    std::vector<double> br;
    const double scale = u * u / p.constants().alpha;
    for (double m = 1; scale > 0 && u + m * scale < u0 && br.size() < 40; m *= 4) br.push_back(u + m * scale);
    for (double a : p.dist().atoms())
        if (u + a > u && u + a < u0) br.push_back(u + a);
    std::sort(br.begin(), br.end());
    const double integral = integrate_adaptive(integrand, u, u0, QuadOptions{1e-300, rel_tol, 20000}, br).value;
    return sol(u) - p.f(u) - integral;
}

/// g_*(0+) = H(0)/α + (μ/α) ∫_0^{u0} g_*(y) F̄(y) dy.
template <jump_distribution D>
double boundary_formula(const VolterraProblem<D>& p, const VolterraSolution& sol, double rel_tol = 1e-12) {
    const auto& k = p.constants();
    if (k.mu == 0) return 0.0;
    std::vector<double> br;
    for (double a : p.dist().atoms())
        if (a > 0 && a < p.u0()) br.push_back(a);
    auto integrand = [&](double y) { return sol(y) * p.dist().tail(y); };
    const double low = integrate_adaptive(integrand, 0.0, p.u0(), QuadOptions{1e-300, rel_tol, 20000}, br).value;
    return p.H0() / k.alpha + k.mu / k.alpha * low;
}

/// κ_b exp(∫_u^{u0} h), h(y) = μ y^(γ-1)/(γ-1), κ_b = sup f over the nodes.
inline double gronwall_bound(const VolterraSolution& sol, double u) {
    const auto& k = sol.constants();
    const double kb = *std::max_element(sol.f_nodes().begin(), sol.f_nodes().end());
    const double e = k.mu * (std::pow(sol.u0(), k.gamma) - std::pow(u, k.gamma)) / (k.gamma * (k.gamma - 1));
    return kb * std::exp(e);
}

}  // namespace ruin
