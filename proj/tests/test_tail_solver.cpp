#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ruin/tail_solver.hpp"

using namespace ruin;

namespace {

const DerivedConstants kRef{4, 2, 2};  // a=2, r=0.1, σ=κ=c=λ=1
const Exponential kExp1(1.0);

const TailSolution& reference() {
    static const TailSolution s = solve_tail(kRef, kExp1, 4.0, 1e-10);
    return s;
}

}  // namespace

TEST(ApplyA, ZeroIntensity) {
    const DerivedConstants k{4, 2, 0};
    EXPECT_EQ(apply_A([](double x) { return 1 / x; }, 1.0, k, kExp1), 0.0);
}

TEST(ApplyA, ExponentialClosedForm) {
    const double v = apply_A([](double x) { return std::exp(-x); }, 0.7, kRef, kExp1, 1e-13);
    EXPECT_NEAR(v, std::exp(-0.7), 1e-13);
}

TEST(ApplyA, PowerBound) {
    for (double p : {2.0, 4.0, 6.5}) {
        auto g = [&](double x) { return std::pow(x, -p); };
        double sup = 0;
        const double u0 = 4;
        for (double u = u0; u < 400; u *= 1.3) {
            const double a = apply_A(g, u, kRef, kExp1);
            EXPECT_LE(a, kRef.mu * std::pow(u, -p) * kExp1.mean());
            sup = std::max(sup, std::pow(u, p) * a);
        }
        // ‖g‖_{p,u0} = 1 for g = x^-p.
        EXPECT_LE(sup * std::pow(u0, -p), kRef.mu * std::pow(u0, -p) * kExp1.mean());
    }
}

TEST(ApplyT, ZeroInput) {
    const auto grid = compact_grid(16);
    const auto t = apply_T([](double) { return 0.0; }, kRef, kExp1, 4.0, grid);
    for (double x : t.values()) EXPECT_EQ(x, 0.0);
    for (double x : t.slopes()) EXPECT_EQ(x, 0.0);
}

TEST(ApplyT, ContractionOnRandomPairs) {
    const double u0 = 4, theta = kRef.mu * kExp1.mean() / u0;
    const auto grid = compact_grid(32);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const double a0 = coef(rng), a1 = coef(rng), a2 = coef(rng), b0 = coef(rng), b1 = coef(rng);
        auto w1 = [=](double v) { return 1 + a0 + a1 * v + a2 * v * v; };
        auto w2 = [=](double v) { return 1 + b0 + b1 * std::sin(3 * v); };
        const auto t1 = apply_T(w1, kRef, kExp1, u0, grid);
        const auto t2 = apply_T(w2, kRef, kExp1, u0, grid);
        std::vector<double> dt(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) dt[j] = t1.values()[j] - t2.values()[j];
        double dg = 0;  // ‖g1 - g2‖_{γ,u0}, sampled finely
        for (int i = 0; i <= 4000; ++i) {
            const double v = i / 4000.0;
            dg = std::max(dg, std::exp(-kRef.alpha * v / u0) * std::abs(w1(v) - w2(v)));
        }
        EXPECT_LE(weighted_norm(grid, dt, kRef.alpha, u0), theta * dg * (1 + 1e-12)) << trial;
    }
}

TEST(ApplyT, WeightedBound) {
    const double u0 = 4;
    const auto grid = compact_grid(32);
    auto w = [](double v) { return 1 + 0.5 * std::cos(5 * v); };
    double norm = 0;
    for (int i = 0; i <= 4000; ++i) {
        const double v = i / 4000.0;
        norm = std::max(norm, std::exp(-kRef.alpha * v / u0) * std::abs(w(v)));
    }
    const auto t = apply_T(w, kRef, kExp1, u0, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        // u^γ Tg(u) = e^(-αv/u0) · (Tg weight)(v)
        const double scaled = std::exp(-kRef.alpha * grid[j] / u0) * t.values()[j];
        EXPECT_LE(scaled, kRef.mu * kExp1.mean() / u0 * norm * (1 + 1e-12));
    }
}

TEST(SolveTail, NoJumpsGivesG0) {
    const DerivedConstants k{4, 2, 0};
    const auto s = solve_tail(k, kExp1, 1.0, 1e-10);
    for (double w : s.weight_grid().values()) EXPECT_EQ(w, 1.0);
    for (double u : {1.0, 2.0, 17.0}) EXPECT_NEAR(s(u), oracle::g0(u, 4, 2), 1e-16 * oracle::g0(u, 4, 2) + 1e-300);
}

TEST(SolveTail, FixedPointResidual) {
    const auto& s = reference();
    const auto& grid = s.weight_grid().nodes();
    const auto t = apply_T(s.weight_grid(), kRef, kExp1, s.u0(), grid);
    std::vector<double> r(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) r[j] = 1 + t.values()[j] - s.weight_grid().values()[j];
    EXPECT_LE(weighted_norm(grid, r, kRef.alpha, s.u0()), 1e-10);
}

TEST(SolveTail, OdeFormByFiniteDifferences) {
    // d/du [u^γ e^(α/u) g*(u)] = -u^(γ-2) e^(α/u) Ag*(u)
    const auto& s = reference();
    const auto& v = s.weight_grid().nodes();
    double worst = 0;
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
        const double u = s.u0() / v[j];
        const double h = 1e-5 * u;
        const double lhs = (s.weight(u + h) - s.weight(u - h)) / (2 * h);
        const double rhs = -std::pow(u, kRef.gamma - 2) * std::exp(kRef.alpha / u) *
                           apply_A(s, u, kRef, kExp1, 1e-13);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    EXPECT_LE(worst, 1e-5);
}

TEST(SolveTail, ContractionRatiosAndMonotoneIterates) {
    const auto& s = reference();
    EXPECT_DOUBLE_EQ(s.theta(), 0.5);
    ASSERT_GE(s.log().size(), 2u);
    for (const auto& r : s.log()) {
        EXPECT_LE(r.ratio, s.theta());
        EXPECT_GE(r.min_increment, -1e-15);
    }
}

TEST(SolveTail, LimitAndPositivity) {
    const auto& s = reference();
    EXPECT_EQ(s.w_inf(), 1.0);
    const double v1 = s.weight_grid().nodes()[1];
    EXPECT_NEAR(s.weight(s.u0() / v1), 1.0, 1e-3);
    for (double u = s.u0(); u < 1e6; u *= 1.1) EXPECT_GT(s(u), 0.0);
}

TEST(SolveTail, IndependentOfSplitPoint) {
    const auto& s0 = reference();
    const auto s1 = solve_tail(kRef, kExp1, 8.0, 1e-10);
    double diff = 0;
    for (int i = 1; i <= 2000; ++i) {
        const double u = 8.0 / (i / 2000.0);
        diff = std::max(diff, std::pow(u, kRef.gamma) * std::abs(s0(u) - s1(u)));
    }
    EXPECT_LE(diff, 10 * 1e-10);
}

TEST(SolveTail, GridRefinement) {
    const auto& a = reference();
    TailOptions opt;
    opt.nodes = 256;
    const auto b = solve_tail(kRef, kExp1, 4.0, 1e-10, opt);
    for (double u = 4; u < 1e4; u *= 1.37) EXPECT_NEAR(a.weight(u), b.weight(u), 1e-9);
}

TEST(SolveTail, TailIntegralAgainstRomberg) {
    const auto& s = reference();
    const double ref = oracle::romberg_to_infinity([&](double t) { return s(t); }, 6.0, 2.0, 1e-12);
    EXPECT_NEAR(s.tail_integral(6.0), ref, 1e-10 * ref);
}

TEST(SolveTail, Errors) {
    EXPECT_THROW(solve_tail(kRef, kExp1, 2.0, 1e-10), ValidationError);
    EXPECT_THROW(solve_tail(kRef, kExp1, 1.0, 1e-10), ValidationError);
    EXPECT_THROW(solve_tail(DerivedConstants{-0.5, 2, 2}, kExp1, 4.0, 1e-10), HypothesisViolated);
    EXPECT_THROW(solve_tail(DerivedConstants{0, 2, 2}, kExp1, 4.0, 1e-10), HypothesisViolated);
    TailOptions opt;
    opt.max_iterations = 2;
    try {
        solve_tail(kRef, kExp1, 4.0, 1e-10, opt);
        FAIL() << "expected NonConvergence";
    } catch (const NonConvergence& e) {
        EXPECT_NE(std::string(e.what()).find("deltas"), std::string::npos);
    }
}

TEST(SolveTail, ParetoJumps) {
    const Pareto d(3.0, 2.0);
    const auto s = solve_tail(kRef, d, 3 * kRef.mu * d.mean(), 1e-10);
    for (const auto& r : s.log()) EXPECT_LE(r.ratio, s.theta() + 1e-12);
    EXPECT_GT(s.weight(s.u0()), 1.0);
}
