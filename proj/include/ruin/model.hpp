#pragma once

// Model parameters of the reserve process
//
//   dX_t = ((a - r)κ + r) X_t dt + κσ X_t dW_t - c dt + dJ_t,
//
// and the reduced constants of the first-order equation for g = Φ':
//
//   u² g'(u) + (γu - α) g(u) = -μ ∫_0^∞ g(u+z) F̄(z) dz.

#include <algorithm>
#include <cmath>
#include <string>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"

namespace ruin {

struct ModelParams {
    double a = 0;       ///< drift of the risky asset
    double r = 0;       ///< riskless rate
    double sigma = 1;   ///< volatility of the risky asset, > 0
    double kappa = 1;   ///< fraction invested in the risky asset, in (0, 1]
    double c = 1;       ///< payout rate, >= 0
    double lambda = 1;  ///< jump intensity, >= 0

    /// Drift coefficient (a - r)κ + r of the linear part.
    double growth_rate() const { return (a - r) * kappa + r; }
    /// Diffusion coefficient κσ of the linear part.
    double volatility() const { return kappa * sigma; }

    void validate() const {
        using detail::require;
        require(std::isfinite(a) && std::isfinite(r), "a and r must be finite");
        require(std::isfinite(sigma) && sigma > 0, "sigma must be positive");
        require(std::isfinite(kappa) && kappa > 0 && kappa <= 1, "kappa must lie in (0, 1]");
        require(std::isfinite(c) && c >= 0, "c must be non-negative");
        require(std::isfinite(lambda) && lambda >= 0, "lambda must be non-negative");
    }
};

struct DerivedConstants {
    double gamma = 0;
    double alpha = 0;
    double mu = 0;
};

inline DerivedConstants derive_constants(const ModelParams& p) {
    p.validate();
    const double s2 = p.kappa * p.kappa * p.sigma * p.sigma;
    DerivedConstants k{2 * p.growth_rate() / s2, 2 * p.c / s2, 2 * p.lambda / s2};
    detail::require(std::isfinite(k.gamma) && std::isfinite(k.alpha) && std::isfinite(k.mu),
                    "derived constants overflow");
    return k;
}

/// Throws HypothesisViolated unless the analytic construction applies.
inline void require_analytic_hypotheses(const DerivedConstants& k) {
    if (!(k.gamma > 1)) {
        throw HypothesisViolated("analytic solver requires gamma > 1 (got gamma = " +
                                 std::to_string(k.gamma) + ")");
    }
    if (!(k.alpha > 0)) throw ValidationError("analytic solver requires c > 0 (alpha > 0)");
}

struct GluingPoint {
    double u0;
    double theta;  ///< contraction constant μ E[ξ] / u0
};

/// u0 = safety · μ E[ξ], floored at `min_u0` so that the degenerate case μ = 0 still
/// yields a usable split point. θ = μ E[ξ] / u0 <= 1/safety.
template <jump_distribution D>
GluingPoint choose_u0(const DerivedConstants& k, const D& dist, double safety, double min_u0) {
    detail::require(std::isfinite(safety) && safety > 1, "u0 safety factor must exceed 1");
    detail::require(std::isfinite(min_u0) && min_u0 > 0, "minimum u0 must be positive");
    const double m = dist.mean();
    if (!std::isfinite(m) || m <= 0) throw ValidationError("jump mean must be finite and positive");
    const double scale = k.mu * m;
    const double u0 = std::max(safety * scale, min_u0);
    return {u0, scale / u0};
}

template <jump_distribution D>
GluingPoint choose_u0(const DerivedConstants& k, const D& dist, double safety = 2.0) {
    return choose_u0(k, dist, safety, dist.mean());
}

}  // namespace ruin
