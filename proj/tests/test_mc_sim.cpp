#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ruin/mc_sim.hpp"
#include "ruin/pipeline.hpp"

using namespace ruin;

namespace {

const ModelParams kRefParams{2, 0.1, 1, 1, 1, 1};
const Exponential kExp1(1.0);

MCConfig quick(std::int64_t paths = 2000) {
    MCConfig c;
    c.n_paths = paths;
    c.dt = 1e-2;
    c.horizon = 50;
    c.barrier = 50;
    c.seed = 7;
    return c;
}

bool same(const MCEstimate& a, const MCEstimate& b) {
    return a.p_hat == b.p_hat && a.ci_halfwidth == b.ci_halfwidth && a.n_ruined == b.n_ruined &&
           a.n_survived_to_barrier == b.n_survived_to_barrier && a.n_censored == b.n_censored;
}

}  // namespace

TEST(SimulatePath, ZeroCapitalIsRuinedImmediately) {
    auto rng = path_engine(1, 0);
    const auto r = simulate_path(kRefParams, kExp1, 0.0, quick(), rng);
    EXPECT_EQ(r.outcome, PathOutcome::ruined);
    EXPECT_EQ(r.time, 0.0);
    const auto e = estimate_ruin(kRefParams, kExp1, 0.0, quick(100));
    EXPECT_EQ(e.p_hat, 1.0);
    EXPECT_EQ(e.ci_halfwidth, 0.0);
}

TEST(SimulatePath, NoPayoutNoJumpsNeverRuins) {
    ModelParams p{0.05, 0.0, 1, 1, 0, 0};
    MCConfig c = quick(500);
    c.horizon = 20;
    c.barrier = 5;
    const auto paths = simulate_paths(p, kExp1, 1.0, c);
    std::int64_t hit = 0, cens = 0;
    for (const auto& r : paths) {
        EXPECT_NE(r.outcome, PathOutcome::ruined);
        hit += r.outcome == PathOutcome::hit_barrier;
        cens += r.outcome == PathOutcome::censored;
    }
    EXPECT_GT(hit, 0);
    EXPECT_GT(cens, 0);
}

TEST(SimulatePath, SmallVolatilityFollowsLinearOde) {
    // x' = b x - c with b = 0.5, c = 1: ruin iff u < c/b = 2, at t = 2 ln(2/(2-u));
    // otherwise x reaches B at t = 2 ln((B-2)/(u-2)).
    ModelParams p{0.5, 0.5, 1e-4, 1, 1, 0};
    MCConfig c = quick(200);
    c.dt = 1e-3;
    c.barrier = 10;
    c.horizon = 30;
    const auto below = simulate_paths(p, kExp1, 1.9, c);
    const auto above = simulate_paths(p, kExp1, 2.1, c);
    for (const auto& r : below) {
        EXPECT_EQ(r.outcome, PathOutcome::ruined);
        EXPECT_NEAR(r.time, 2 * std::log(20.0), 0.02);
    }
    for (const auto& r : above) {
        EXPECT_EQ(r.outcome, PathOutcome::hit_barrier);
        EXPECT_NEAR(r.time, 2 * std::log(80.0), 0.02);
    }
    EXPECT_EQ(summarize(below, 1.9, c).p_hat, 1.0);
    EXPECT_EQ(summarize(above, 2.1, c).p_hat, 0.0);
}

TEST(Estimate, Reproducible) {
    const auto a = estimate_ruin(kRefParams, kExp1, 1.0, quick());
    const auto b = estimate_ruin(kRefParams, kExp1, 1.0, quick());
    EXPECT_TRUE(same(a, b));
    MCConfig other = quick();
    other.seed = 8;
    EXPECT_FALSE(same(a, estimate_ruin(kRefParams, kExp1, 1.0, other)));
}

TEST(Estimate, IndependentOfThreadCount) {
    MCConfig c1 = quick(999);
    MCConfig c3 = c1;
    c3.threads = 3;
    const auto p1 = simulate_paths(kRefParams, kExp1, 1.0, c1);
    const auto p3 = simulate_paths(kRefParams, kExp1, 1.0, c3);
    ASSERT_EQ(p1.size(), p3.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        EXPECT_EQ(p1[i].outcome, p3[i].outcome);
        EXPECT_EQ(p1[i].time, p3[i].time);
    }
}

TEST(Estimate, CountsAndInvariants) {
    const auto e = estimate_ruin(kRefParams, kExp1, 1.0, quick(), 0.01);
    EXPECT_EQ(e.n_ruined + e.n_survived_to_barrier + e.n_censored, e.n_paths);
    EXPECT_GE(e.p_hat, 0.0);
    EXPECT_LE(e.p_hat, 1.0);
    EXPECT_DOUBLE_EQ(e.bias_note, 0.01 + e.censored_fraction);
    EXPECT_NEAR(e.ci_halfwidth, 1.96 * std::sqrt(e.p_hat * (1 - e.p_hat) / 2000), 1e-4);
}

TEST(Estimate, MonotoneInInitialCapital) {
    const auto c = quick(4000);
    const auto e1 = estimate_ruin(kRefParams, kExp1, 1.0, c);
    const auto e5 = estimate_ruin(kRefParams, kExp1, 5.0, c);
    const auto e10 = estimate_ruin(kRefParams, kExp1, 10.0, c);
    EXPECT_GE(e1.p_hat, e5.p_hat - 2 * (e1.ci_halfwidth + e5.ci_halfwidth));
    EXPECT_GE(e5.p_hat, e10.p_hat - 2 * (e5.ci_halfwidth + e10.ci_halfwidth));
}

TEST(Estimate, StepRefinement) {
    MCConfig coarse = quick(4000);
    coarse.dt = 2e-2;
    MCConfig fine = coarse;
    fine.dt = 1e-2;
    const auto a = estimate_ruin(kRefParams, kExp1, 1.0, coarse);
    const auto b = estimate_ruin(kRefParams, kExp1, 1.0, fine);
    EXPECT_LE(std::abs(a.p_hat - b.p_hat), a.ci_halfwidth + b.ci_halfwidth);
}

TEST(Estimate, ImminentRuin) {
    // κ = 1, r = 0, 2a/σ² = 0.2 <= 1.
    const ModelParams p{0.1, 0, 1, 1, 1, 1};
    MCConfig c;
    c.n_paths = 2000;
    c.dt = 1e-2;
    c.horizon = 200;
    c.barrier = 1000;
    c.seed = 3;
    const auto e = estimate_ruin(p, kExp1, 1.0, c);
    EXPECT_GE(e.p_hat, 0.95);
}

TEST(Estimate, AgreesWithSolver) {
    const auto solved = solve_model(kRefParams, kExp1);
    MCConfig c = quick(20000);
    const double psi_b = solved.solution.Psi(c.barrier);
    for (double u : {1.0, 5.0}) {
        const auto e = estimate_ruin(kRefParams, kExp1, u, c, psi_b);
        EXPECT_LE(std::abs(e.p_hat - solved.solution.Psi(u)), 3 * e.ci_halfwidth + e.bias_note) << u;
    }
}

TEST(Config, Validation) {
    MCConfig c = quick();
    EXPECT_THROW(c.validate(60.0), ValidationError);
    c.horizon = 0;
    EXPECT_THROW(c.validate(1.0), ValidationError);
    c = quick();
    c.dt = -1;
    EXPECT_THROW(c.validate(1.0), ValidationError);
    c = quick();
    c.n_paths = 0;
    EXPECT_THROW(c.validate(1.0), ValidationError);
    c = quick();
    c.substeps_per_jump_interval = 0;
    EXPECT_THROW(c.validate(1.0), ValidationError);
    EXPECT_THROW(simulate_paths(kRefParams, kExp1, 60.0, quick()), ValidationError);
}

TEST(Output, PathsCsv) {
    std::vector<PathResult> paths{{PathOutcome::ruined, 0.5}, {PathOutcome::hit_barrier, 2}, {PathOutcome::censored, 50}};
    std::ostringstream os;
    write_paths_csv(os, paths);
    EXPECT_EQ(os.str(), "path,outcome,time\n0,ruined,0.5\n1,hit_barrier,2\n2,censored,50\n");
}
