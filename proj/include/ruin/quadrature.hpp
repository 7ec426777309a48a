#pragma once

// Numerical integration used throughout the solver:
//
//  * globally adaptive Gauss-Kronrod (7/15) over a partition, generic in the
//    value type so that affine functionals a + b·x can be integrated in one pass;
//  * Gauss-Legendre rules for fixed panel quadrature;
//  * semi-infinite integrals against the jump tail F̄;
//  * integrals against the weight t^(γ-2) e^(α/t), both plain and relative to
//    M(u) = u^γ e^(α/u) (the latter never overflows as u -> 0).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <utility>
#include <vector>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"

namespace ruin {

/// Value of the form c0 + c1·x, used to carry one unknown through a linear functional.
struct Affine {
    double c0 = 0;
    double c1 = 0;

    Affine& operator+=(const Affine& o) {
        c0 += o.c0;
        c1 += o.c1;
        return *this;
    }
    friend Affine operator+(Affine a, const Affine& b) { return a += b; }
    friend Affine operator-(const Affine& a, const Affine& b) { return {a.c0 - b.c0, a.c1 - b.c1}; }
    friend Affine operator*(double s, const Affine& a) { return {s * a.c0, s * a.c1}; }
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Affine& a) { return std::abs(a.c0) + std::abs(a.c1); }

template <typename V>
struct QuadResult {
    V value{};
    double error = 0;
    int evaluations = 0;
};

struct QuadOptions {
    double abs_tol = 1e-300;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

namespace detail {

// Kronrod 15-point abscissae (positive half) with Kronrod and embedded Gauss 7-point weights.
inline constexpr std::array<double, 8> kKronrodX = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodW = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussW = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename V>
struct Segment {
    double a, b;
    V value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename V, typename F>
Segment<V> gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::array<V, 15> fv;
    fv[14] = f(c);
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kKronrodX[j];
        fv[2 * j] = f(c - dx);
        fv[2 * j + 1] = f(c + dx);
    }
    V kron = kKronrodW[7] * fv[14];
    V gauss = kGaussW[3] * fv[14];
    double resabs = kKronrodW[7] * magnitude(fv[14]);
    for (int j = 0; j < 7; ++j) {
        const V sum = fv[2 * j] + fv[2 * j + 1];
        kron += kKronrodW[j] * sum;
        resabs += kKronrodW[j] * (magnitude(fv[2 * j]) + magnitude(fv[2 * j + 1]));
        if (j % 2 == 1) gauss += kGaussW[j / 2] * sum;
    }
    const V mean = 0.5 * kron;
    double resasc = kKronrodW[7] * magnitude(fv[14] - mean);
    for (int j = 0; j < 7; ++j) resasc += kKronrodW[j] * (magnitude(fv[2 * j] - mean) + magnitude(fv[2 * j + 1] - mean));
    kron = h * kron;
    gauss = h * gauss;
    resabs *= std::abs(h);
    resasc *= std::abs(h);
    // QUADPACK scaling of |K15 - G7|, floored at the rounding level of the rule.
    double err = magnitude(kron - gauss);
    if (resasc != 0 && err != 0) err = resasc * std::min(1.0, std::pow(200 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50 * eps)) err = std::max(50 * eps * resabs, err);
    return {a, b, kron, err};
}

inline std::vector<double> sorted_partition(std::vector<double> pts, double a, double b) {
    pts.push_back(a);
    pts.push_back(b);
    std::vector<double> out;
    for (double p : pts)
        if (std::isfinite(p) && p >= a && p <= b) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double x, double y) { return y - x <= 1e-15 * (std::abs(x) + std::abs(y)); }),
              out.end());
    return out;
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 7/15 over [a, b], starting from the given breakpoints.
/// Throws NonConvergence (with the last two global estimates) if the interval budget runs out.
template <typename F, typename V = std::invoke_result_t<F&, double>>
QuadResult<V> integrate_adaptive(F&& f, double a, double b, const QuadOptions& opt = {},
                                 std::vector<double> breakpoints = {}) {
    QuadResult<V> res;
    if (!(b > a)) return res;
    const auto part = detail::sorted_partition(std::move(breakpoints), a, b);
    std::priority_queue<detail::Segment<V>> heap;
    V total{};
    double err = 0;
    for (std::size_t i = 0; i + 1 < part.size(); ++i) {
        auto s = detail::gk15<V>(f, part[i], part[i + 1]);
        total += s.value;
        err += s.error;
        heap.push(s);
        res.evaluations += 15;
    }
    V previous = total;
    while (err > std::max(opt.abs_tol, opt.rel_tol * magnitude(total))) {
        if (static_cast<int>(heap.size()) >= opt.max_intervals) {
            std::ostringstream os;
            os.precision(17);
            os << "adaptive quadrature on [" << a << ", " << b << "] did not converge: last estimates "
               << magnitude(previous) << " and " << magnitude(total) << ", error " << err;
            throw NonConvergence(os.str());
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval exhausted at machine precision; accept its contribution as is.
            err -= worst.error;
            worst.error = 0;
            heap.push(worst);
            if (err <= 0) break;
            continue;
        }
        auto left = detail::gk15<V>(f, worst.a, mid);
        auto right = detail::gk15<V>(f, mid, worst.b);
        res.evaluations += 30;
        previous = total;
        total = total - worst.value + left.value + right.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated cancellation from the incremental updates.
    V sum{};
    double esum = 0;
    while (!heap.empty()) {
        sum += heap.top().value;
        esum += heap.top().error;
        heap.pop();
    }
    res.value = sum;
    res.error = esum;
    return res;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> x;
    std::vector<double> w;

    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = 0;
                for (int k = 1; k <= n; ++k) {
                    const double p2 = p1;
                    p1 = p0;
                    p0 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p2) / k;
                }
                dp = n * (z * p0 - p1) / (z * z - 1);
                const double dz = p0 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = -z;
            w[i] = 2 / ((1 - z * z) * dp * dp);
        }
    }

    /// ∫_a^b f using the rule mapped to [a, b].
    template <typename F, typename V = std::invoke_result_t<F&, double>>
    V integrate(F&& f, double a, double b) const {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        V s{};
        for (std::size_t i = 0; i < x.size(); ++i) s += (h * w[i]) * f(c + h * x[i]);
        return s;
    }
};

/// ∫_{z_lo}^∞ g(u + z) F̄(z) dz.
///
/// The range is truncated at z_max with ∫_{z_max}^∞ F̄ <= eps · ∫_{z_lo}^∞ F̄; the
/// neglected remainder is bounded by |g(u + z_max)| · ∫_{z_max}^∞ F̄, which assumes g
/// is non-increasing in magnitude beyond z_max (true for the power-tail functions
/// this is applied to), and is added to the reported error. Atoms of F and the
/// extra breakpoints (in z) split the partition.
template <typename G, jump_distribution D>
QuadResult<double> integrate_tail_against_F(G&& g, double u, const D& dist, double eps,
                                            double z_lo = 0.0,
                                            const std::vector<double>& extra_breaks = {}) {
    detail::require(eps > 0, "integrate_tail_against_F: eps must be positive");
    z_lo = std::max(z_lo, 0.0);
    const double z_max = truncation_point(dist, z_lo, eps);
    QuadResult<double> res;
    if (!(z_max > z_lo)) return res;
    std::vector<double> br = dist.atoms();
    br.insert(br.end(), extra_breaks.begin(), extra_breaks.end());
    const double m = dist.mean();
    for (double step = m; z_lo + step < z_max; step *= 2) br.push_back(z_lo + step);
    auto integrand = [&](double z) { return g(u + z) * dist.tail(z); };
    res = integrate_adaptive(integrand, z_lo, z_max, QuadOptions{1e-300, eps, 20000}, br);
    res.error += std::abs(g(u + z_max)) * dist.integrated_tail(z_max);
    return res;
}

/// ∫_lo^hi t^(γ-2) e^(α/t) g(t) dt, 0 < lo < hi <= ∞.
///
/// For hi = ∞ the substitution s = 1/t is used; `decay` is the declared exponent p
/// with |g(t)| = O(t^-p), and the integral must converge (p > γ - 1).
template <typename G>
QuadResult<double> integrate_weighted(G&& g, double lo, double hi, double gamma, double alpha,
                                      double decay = std::numeric_limits<double>::quiet_NaN(),
                                      double rel_tol = 1e-12) {
    detail::require(lo > 0 && hi > lo, "integrate_weighted: need 0 < lo < hi");
    const QuadOptions opt{1e-300, rel_tol, 20000};
    if (std::isinf(hi)) {
        if (!(decay > gamma - 1)) {
            throw ValidationError("integrate_weighted: integrand not integrable at infinity under the declared decay");
        }
        auto h = [&](double s) { return s <= 0 ? 0.0 : std::pow(s, -gamma) * std::exp(alpha * s) * g(1 / s); };
        std::vector<double> br;
        for (double s = 1 / lo; s > 1e-8 / lo; s *= 0.25) br.push_back(s);
        return integrate_adaptive(h, 0.0, 1 / lo, opt, br);
    }
    auto h = [&](double t) { return std::pow(t, gamma - 2) * std::exp(alpha / t) * g(t); };
    return integrate_adaptive(h, lo, hi, opt);
}

/// (1/M(u)) ∫_u^hi t^(γ-2) e^(α/t) g(t) dt with M(u) = u^γ e^(α/u), for 0 < u < hi <= ∞, α > 0.
///
/// Substituting s = α(1/u - 1/t) turns the weight into (1/α)(t/u)^γ e^-s, which is
/// bounded and resolves the boundary layer of width u²/α at t = u. `t_breaks` are
/// extra breakpoints given in t. The value type follows g (double or Affine).
template <typename G, typename V = std::invoke_result_t<G&, double>>
QuadResult<V> integrate_weighted_relative(G&& g, double u, double hi, double gamma, double alpha,
                                          const QuadOptions& opt = {},
                                          const std::vector<double>& t_breaks = {}) {
    detail::require(alpha > 0, "integrate_weighted_relative: alpha must be positive");
    detail::require(u > 0 && hi > u, "integrate_weighted_relative: need 0 < u < hi");
    const double inv_u = 1 / u;
    const double s_max = std::isinf(hi) ? alpha * inv_u : alpha * (inv_u - 1 / hi);
    auto s_of_t = [&](double t) { return alpha * (inv_u - 1 / t); };
    auto integrand = [&](double s) -> V {
        const double q = 1 - u * s / alpha;  // = u / t
        if (q <= 0) return V{};
        const double t = u / q;
        return (std::pow(q, -gamma) * std::exp(-s) / alpha) * g(t);
    };
    std::vector<double> br;
    for (double s = 1; s < s_max; s *= 2) br.push_back(s);
    for (double t : t_breaks)
        if (t > u && t < hi) br.push_back(s_of_t(t));
    const double t_peak = alpha / gamma;  // (t/u)^γ e^-s peaks here
    if (t_peak > u && t_peak < hi) br.push_back(s_of_t(t_peak));
    return integrate_adaptive(integrand, 0.0, s_max, opt, br);
}

/// E[φ(ξ)] from the density part plus the atoms of F.
template <typename Fn, jump_distribution D>
double expectation(Fn&& phi, const D& dist, double eps = 1e-12) {
    double total = 0;
    for (double a : dist.atoms()) total += phi(a) * (dist.tail_left(a) - dist.tail(a));
    const double z_max = truncation_point(dist, 0.0, eps * 1e-2);
    if (dist.density(0.5 * dist.mean()) > 0 || dist.atoms().empty()) {
        std::vector<double> br;
        for (double step = dist.mean(); step < z_max; step *= 2) br.push_back(step);
        auto h = [&](double z) { return phi(z) * dist.density(z); };
        total += integrate_adaptive(h, 0.0, z_max, QuadOptions{1e-300, eps, 20000}, br).value;
    }
    return total;
}

}  // namespace ruin
