#pragma once

// ĝ = g_* on [0, u0], g* on (u0, ∞); Φ(u) = C ∫_0^u ĝ with C = 1 / ∫_0^∞ ĝ,
// Ψ = 1 - Φ computed as C ∫_u^∞ ĝ so that small ruin probabilities keep their
// relative accuracy.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"
#include "ruin/model.hpp"
#include "ruin/quadrature.hpp"
#include "ruin/tail_solver.hpp"
#include "ruin/volterra_solver.hpp"

namespace ruin {

class GluedSolution {
public:
    GluedSolution(TailSolution high, VolterraSolution low) : high_(std::move(high)), low_(std::move(low)) {
        const double u0 = high_.u0();
        i_low_ = low_.integral(0.0, u0);
        i_tail_ = high_.tail_integral(u0);
        const double total = i_low_ + i_tail_;
        if (!std::isfinite(total) || !(total > 0)) {
            throw NonConvergence("integral of the glued derivative is not finite and positive");
        }
        c_ = 1 / total;
    }

    const DerivedConstants& constants() const { return high_.constants(); }
    double u0() const { return high_.u0(); }
    const TailSolution& tail() const { return high_; }
    const VolterraSolution& low() const { return low_; }

    /// ∫_0^∞ ĝ and its two parts.
    double integral() const { return i_low_ + i_tail_; }
    double integral_low() const { return i_low_; }
    double integral_tail() const { return i_tail_; }
    /// Normalisation constant C = 1 / ∫_0^∞ ĝ.
    double C() const { return c_; }
    /// lim u^(γ-1) Ψ(u) = C w(∞) / (γ - 1).
    double C_asym() const { return c_ * high_.w_inf() / (constants().gamma - 1); }

    double ghat(double u) const {
        if (u < 0) throw ValidationError("ghat: u must be non-negative");
        return u <= u0() ? low_(u) : high_(u);
    }

    double ghat_derivative(double u) const { return u <= u0() ? low_.derivative(u) : high_.derivative(u); }

    double Psi(double u) const {
        if (u <= 0) return 1.0;
        if (u <= u0()) return c_ * (low_.integral(u, u0()) + i_tail_);
        return c_ * high_.tail_integral(u);
    }

    double Phi(double u) const {
        if (u <= 0) return 0.0;
        if (u <= u0()) return c_ * low_.integral(0.0, u);
        return 1 - Psi(u);
    }

    /// Largest finite u carried by the tail grid.
    double largest_node() const { return u0() / high_.weight_grid().nodes()[1]; }

private:
    TailSolution high_;
    VolterraSolution low_;
    double i_low_ = 0, i_tail_ = 0, c_ = 0;
};

inline GluedSolution glue_and_normalize(VolterraSolution low, TailSolution high) {
    require_analytic_hypotheses(high.constants());
    detail::require(std::abs(low.u0() - high.u0()) <= 1e-14 * high.u0(), "glue: solutions disagree on u0");
    return GluedSolution(std::move(high), std::move(low));
}

struct AsymptoticReport {
    double C_asym = 0;     ///< C w(∞) / (γ - 1)
    double fitted = 0;     ///< u^(γ-1) Ψ(u) at the largest grid node
    double u_fit = 0;
    double slope = 0;      ///< log-log slope of Ψ over [u_fit/10, u_fit]
    double cauchy = 0;     ///< |ratio - 1| of u^(γ-1)Ψ(u) at u_fit/2 and u_fit
    bool consistent = true;
    std::string warning;
};

inline AsymptoticReport asymptotic_constant(const GluedSolution& sol, double tolerance = 0.02) {
    const double g = sol.constants().gamma;
    AsymptoticReport r;
    r.C_asym = sol.C_asym();
    r.u_fit = sol.largest_node();
    const double lo = r.u_fit / 10;
    const double p_hi = sol.Psi(r.u_fit), p_lo = sol.Psi(lo), p_half = sol.Psi(r.u_fit / 2);
    r.fitted = std::pow(r.u_fit, g - 1) * p_hi;
    r.slope = (std::log(p_hi) - std::log(p_lo)) / std::log(10.0);
    r.cauchy = std::abs(std::pow(r.u_fit / 2, g - 1) * p_half / r.fitted - 1);
    if (std::abs(r.fitted / r.C_asym - 1) > tolerance) {
        r.consistent = false;
        r.warning = "fitted and analytic asymptotic constants differ by more than " + std::to_string(tolerance);
    }
    return r;
}

struct ResidualTerms {
    double diffusion = 0;  ///< u² ĝ'(u)
    double drift = 0;      ///< (γu - α) ĝ(u)
    double jump = 0;       ///< Aĝ(u)
    double normalized = 0; ///< |sum| / max |term|
};

/// Residual of u² g' + (γu - α) g + Ag = 0 for ĝ at u > 0; ĝ' by the five-point centred difference.
template <jump_distribution D>
ResidualTerms ide_residual_terms(const GluedSolution& sol, double u, const D& dist, double eps = 1e-12) {
    detail::require(u > 0, "ide_residual: u must be positive");
    const auto& k = sol.constants();
    const double h = 1e-5 * u;
    const double dg = (8 * (sol.ghat(u + h) - sol.ghat(u - h)) - (sol.ghat(u + 2 * h) - sol.ghat(u - 2 * h))) / (12 * h);
    std::vector<double> br;
    if (u < sol.u0()) br.push_back(sol.u0() - u);
    auto g = [&](double x) { return sol.ghat(x); };
    ResidualTerms t;
    t.diffusion = u * u * dg;
    t.drift = (k.gamma * u - k.alpha) * sol.ghat(u);
    t.jump = apply_A(g, u, k, dist, eps, br);
    const double scale = std::max({std::abs(t.diffusion), std::abs(t.drift), std::abs(t.jump)});
    t.normalized = scale > 0 ? std::abs(t.diffusion + t.drift + t.jump) / scale : 0.0;
    return t;
}

template <jump_distribution D>
double ide_residual(const GluedSolution& sol, double u, const D& dist, double eps = 1e-12) {
    return ide_residual_terms(sol, u, dist, eps).normalized;
}

struct IntegrationByParts {
    double lhs = 0;  ///< ∫ Φ(u + y) dF(y)
    double rhs = 0;  ///< Φ(u) + ∫ Φ'(u + y) F̄(y) dy
};

/// Both sides of ∫Φ(u+y) dF(y) = Φ(u) + ∫Φ'(u+y) F̄(y) dy, each by its own quadrature.
template <jump_distribution D>
IntegrationByParts integration_by_parts(const GluedSolution& sol, double u, const D& dist, double eps = 1e-12) {
    IntegrationByParts r;
    r.lhs = expectation([&](double y) { return sol.Phi(u + y); }, dist, eps);
    std::vector<double> br;
    if (u < sol.u0()) br.push_back(sol.u0() - u);
    auto dphi = [&](double x) { return sol.C() * sol.ghat(x); };
    r.rhs = sol.Phi(u) + integrate_tail_against_F(dphi, u, dist, eps, 0.0, br).value;
    return r;
}

/// n points log-spaced on [lo, hi], with `extra` merged in.
inline std::vector<double> log_probes(double lo, double hi, int n, std::vector<double> extra = {}) {
    std::vector<double> p = std::move(extra);
    for (int i = 0; i < n; ++i) p.push_back(lo * std::pow(hi / lo, n == 1 ? 0.0 : static_cast<double>(i) / (n - 1)));
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    return p;
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct TableRow {
    double u, phi, psi, ghat, residual;
};

template <jump_distribution D>
std::vector<TableRow> solution_table(const GluedSolution& sol, const std::vector<double>& probes, const D& dist) {
    std::vector<TableRow> rows;
    for (double u : probes) {
        rows.push_back({u, sol.Phi(u), sol.Psi(u), sol.ghat(u), u > 0 ? ide_residual(sol, u, dist) : 0.0});
    }
    return rows;
}

/// CSV with header `u,phi,psi,ghat,residual`, 17 significant digits.
inline void write_table_csv(std::ostream& os, const std::vector<TableRow>& rows) {
    os << "u,phi,psi,ghat,residual\n";
    for (const auto& r : rows) {
        os << format_double(r.u) << ',' << format_double(r.phi) << ',' << format_double(r.psi) << ','
           << format_double(r.ghat) << ',' << format_double(r.residual) << '\n';
    }
}

}  // namespace ruin
