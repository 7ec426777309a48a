#pragma once

#include <optional>

#include "ruin/assembly.hpp"
#include "ruin/model.hpp"
#include "ruin/tail_solver.hpp"
#include "ruin/volterra_solver.hpp"

namespace ruin {

struct SolverSettings {
    double safety = 2.0;
    std::optional<double> min_u0;  ///< defaults to E[ξ]
    double tol = 1e-10;            ///< fixed-point tolerance in the weighted norm
    int tail_nodes = 128;
    int volterra_nodes = 256;
    double quad_eps = 1e-12;
};

struct Solved {
    ModelParams params;
    DerivedConstants constants;
    GluingPoint split;
    GluedSolution solution;
};

/// derive_constants -> choose_u0 -> solve_tail -> solve_volterra -> glue_and_normalize.
template <jump_distribution D>
Solved solve_model(const ModelParams& params, const D& dist, const SolverSettings& s = {}) {
    const DerivedConstants k = derive_constants(params);
    require_analytic_hypotheses(k);
    const GluingPoint split = choose_u0(k, dist, s.safety, s.min_u0.value_or(dist.mean()));
    TailOptions to;
    to.nodes = s.tail_nodes;
    to.quad_eps = s.quad_eps;
    TailSolution tail = solve_tail(k, dist, split.u0, s.tol, to);
    VolterraProblem<D> problem(tail, dist, s.quad_eps);
    VolterraOptions vo;
    vo.grid_n = s.volterra_nodes;
    vo.quad_eps = s.quad_eps;
    VolterraSolution low = solve_volterra(problem, vo);
    return Solved{params, k, split, glue_and_normalize(std::move(low), std::move(tail))};
}

}  // namespace ruin
