#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ruin/volterra_solver.hpp"

using namespace ruin;

namespace {

const DerivedConstants kRef{4, 2, 2};
const Exponential kExp1(1.0);

struct Fixture {
    TailSolution tail = solve_tail(kRef, kExp1, 4.0, 1e-10);
    VolterraProblem<Exponential> problem{tail, kExp1};
    VolterraSolution sol = solve_volterra(problem);
};

const Fixture& ref() {
    static const Fixture f;
    return f;
}

VolterraSolution solve_n(int n) {
    VolterraOptions o;
    o.grid_n = n;
    return solve_volterra(ref().problem, o);
}

}  // namespace

TEST(ComputeH, ZeroIntensity) {
    const DerivedConstants k{4, 2, 0};
    const auto t = solve_tail(k, kExp1, 1.0, 1e-10);
    for (double u : {0.0, 0.5, 1.0}) EXPECT_EQ(compute_H(t, u, kExp1), 0.0);
}

TEST(ComputeH, MonotoneAndBounded) {
    const auto& t = ref().tail;
    double sup_g = 0;
    for (double y = 4; y < 100; y *= 1.01) sup_g = std::max(sup_g, t(y));
    double prev = -1;
    for (double u = 0; u <= 4.0; u += 0.125) {
        const double h = compute_H(t, u, kExp1);
        EXPECT_GE(h, prev);
        EXPECT_LE(h, kRef.mu * sup_g * kExp1.mean());
        prev = h;
    }
    EXPECT_GT(compute_H(t, 0.0, kExp1), 0.0);
}

TEST(ComputeH, AtZeroAgainstRomberg) {
    const auto& t = ref().tail;
    const double ref_h0 = kRef.mu * oracle::romberg_to_infinity([&](double y) { return t(y) * kExp1.tail(y); }, 4.0, 1.0);
    EXPECT_NEAR(compute_H(t, 0.0, kExp1), ref_h0, 1e-8 * ref_h0);
}

TEST(ComputeF, EndpointsAndDegenerateCase) {
    const auto& p = ref().problem;
    EXPECT_EQ(p.f(4.0), ref().tail(4.0));
    EXPECT_EQ(p.f(0.0), p.H0() / kRef.alpha);
    // f(u) -> H(0)/α at first order.
    const double f0 = p.H0() / kRef.alpha;
    const double e3 = std::abs(p.f(1e-3) - f0), e4 = std::abs(p.f(1e-4) - f0);
    EXPECT_LT(e3, 1e-2 * f0);
    EXPECT_NEAR(e3 / e4, 10.0, 0.5);

    const DerivedConstants k{4, 2, 0};
    const auto t = solve_tail(k, kExp1, 1.0, 1e-10);
    const VolterraProblem<Exponential> p0(t, kExp1);
    for (double u : {0.05, 0.3, 0.9}) EXPECT_NEAR(p0.f(u), oracle::g0(u, 4, 2), 1e-13 * oracle::g0(u, 4, 2));
}

TEST(ComputeK, DiagonalAndLimit) {
    for (double u : {0.1, 1.0, 3.0}) EXPECT_EQ(compute_K(u, u, kRef, kExp1), 0.0);
    const Deterministic d(1.0);
    // F̄(y-) at the atom is 1, F̄(y) is 0.
    EXPECT_EQ(compute_K(0.0, 1.0, kRef, d), kRef.mu / kRef.alpha);
    EXPECT_EQ(compute_K(0.0, 1.5, kRef, d), 0.0);
    EXPECT_NEAR(compute_K(1e-6, 0.7, kRef, kExp1), kRef.mu / kRef.alpha * std::exp(-0.7), 1e-5);
}

TEST(ComputeK, AgainstRomberg) {
    const double u = 1.5, y = 3.0;
    const double m = std::pow(u, kRef.gamma) * std::exp(kRef.alpha / u);
    const double ref_k = kRef.mu / m * oracle::romberg([&](double t) {
        return std::pow(t, kRef.gamma - 2) * std::exp(kRef.alpha / t) * kExp1.tail(y - t);
    }, u, y);
    EXPECT_NEAR(compute_K(u, y, kRef, kExp1), ref_k, 1e-11 * ref_k);
}

TEST(ComputeK, KernelBounds) {
    // Since e^(α/t) <= e^(α/u) on [u, y]: K(u, y) <= μ u^-γ (y^(γ-1) - u^(γ-1)) / (γ-1).
    // The weaker form K <= μ y^(γ-1)/(γ-1) follows only when u >= 1.
    const double g = kRef.gamma, mu = kRef.mu;
    for (double u : {0.01, 0.2, 0.9, 1.0, 2.0, 3.5}) {
        for (double y = u; y <= 4.0; y += 0.25) {
            const double k = compute_K(u, y, kRef, kExp1);
            EXPECT_LE(k, mu * std::pow(u, -g) * (std::pow(y, g - 1) - std::pow(u, g - 1)) / (g - 1) * (1 + 1e-12));
            if (u >= 1) EXPECT_LE(k, mu * std::pow(y, g - 1) / (g - 1));
        }
    }
    // For small u and y the weaker form fails: K(0, 0.5) = e^-0.5 > h(0.5).
    EXPECT_GT(compute_K(0.0, 0.5, kRef, kExp1), mu * std::pow(0.5, g - 1) / (g - 1));
}

TEST(SolveVolterra, NoJumps) {
    const DerivedConstants k{4, 2, 0};
    const auto t = solve_tail(k, kExp1, 1.0, 1e-10);
    const VolterraProblem<Exponential> p(t, kExp1);
    const auto s = solve_volterra(p, VolterraOptions{64});
    EXPECT_EQ(s.boundary_value(), 0.0);
    for (double u : {0.02, 0.1, 0.5, 1.0}) EXPECT_NEAR(s(u), oracle::g0(u, 4, 2), 1e-12 * oracle::g0(u, 4, 2));
}

TEST(SolveVolterra, TerminalCondition) {
    const auto& f = ref();
    EXPECT_EQ(f.sol.values().back(), f.tail(4.0));
    EXPECT_NEAR(f.sol(4.0), f.tail(4.0), 1e-15);
}

TEST(SolveVolterra, SelfConvergence) {
    const auto a = solve_n(64), b = solve_n(128), c = solve_n(256);
    double d1 = 0, d2 = 0;
    for (int j = 0; j <= 64; ++j) {
        d1 = std::max(d1, std::abs(a.values()[j] - b.values()[2 * j]));
        d2 = std::max(d2, std::abs(b.values()[2 * j] - c.values()[4 * j]));
    }
    const double order = std::log2(d1 / d2);
    EXPECT_GE(order, 2.0) << d1 << ' ' << d2;
}

TEST(SolveVolterra, ResidualOffGrid) {
    const auto& f = ref();
    for (double u : {0.0, 0.013, 0.11, 0.37, 1.234, 2.5, 3.91}) {
        EXPECT_LE(std::abs(volterra_residual(f.problem, f.sol, u)), 1e-6) << u;
    }
}

TEST(SolveVolterra, BoundaryFormula) {
    const auto& f = ref();
    const double b = boundary_formula(f.problem, f.sol);
    EXPECT_NEAR(f.sol.boundary_value(), b, 1e-6 * b);
    EXPECT_GT(b, 0.0);
}

TEST(SolveVolterra, GronwallAndPositivity) {
    const auto& f = ref();
    const auto& x = f.sol.nodes();
    for (std::size_t j = 0; j < x.size(); ++j) {
        EXPECT_LE(f.sol.values()[j], gronwall_bound(f.sol, x[j]));
        EXPECT_GT(f.sol.values()[j], 0.0);
    }
}

TEST(SolveVolterra, ContinuityAtGluingPoint) {
    const auto& f = ref();
    double prev = INFINITY;
    for (double d : {1e-2, 1e-3, 1e-4}) {
        const double gap = std::abs(f.sol(4.0 - d) - f.tail(4.0 + d));
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-6);
    const double left = f.sol.derivative(4.0), right = f.tail.derivative(4.0);
    EXPECT_NEAR(left, right, 1e-3 * std::abs(right));
}

TEST(SolveVolterra, IntegralAgainstRomberg) {
    const auto& f = ref();
    const double r = oracle::romberg_panels([&](double u) { return f.sol(u); }, {0, 0.5, 1, 2, 4}, 1e-12);
    EXPECT_NEAR(f.sol.integral(0.0, 4.0), r, 1e-10 * r);
}

TEST(SolveVolterra, RejectsSmallGrid) {
    EXPECT_THROW(solve_volterra(ref().problem, VolterraOptions{32}), ValidationError);
}

TEST(SolveVolterra, RequiresGammaAboveOne) {
    const auto t = solve_tail(DerivedConstants{0.8, 2, 0.5}, kExp1, 4.0, 1e-10);
    EXPECT_THROW((VolterraProblem<Exponential>(t, kExp1)), HypothesisViolated);
}

TEST(SolveVolterra, DeterministicJumps) {
    const Deterministic d(1.0);
    const auto t = solve_tail(kRef, d, 4.0, 1e-10);
    const VolterraProblem<Deterministic> p(t, d);
    const auto s = solve_volterra(p);
    for (double u : {0.0, 0.4, 1.7, 3.2}) EXPECT_LE(std::abs(volterra_residual(p, s, u)), 1e-6) << u;
    const double b = boundary_formula(p, s);
    EXPECT_NEAR(s.boundary_value(), b, 1e-6 * b);
}
