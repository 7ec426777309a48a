#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruin/errors.hpp"

namespace ruin {

/// Behaviour of a GridFunction to the right of its last node.
struct Extrapolation {
    enum class Kind { none, constant, power_tail };
    Kind kind = Kind::none;
    double exponent = 0;  ///< power_tail: f(x) = f(x_last) · (x / x_last)^exponent

    static Extrapolation none() { return {}; }
    static Extrapolation constant() { return {Kind::constant, 0}; }
    static Extrapolation power_tail(double exponent) { return {Kind::power_tail, exponent}; }
};

/// How nodal slopes are obtained when they are not supplied.
enum class SlopeRule {
    monotone,  ///< Fritsch-Carlson / PCHIP: shape preserving, second order
    lagrange,  ///< derivative of the local 4-point Lagrange interpolant, third order
};

namespace detail {

inline std::vector<double> monotone_slopes(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        h[k] = x[k + 1] - x[k];
        del[k] = (y[k + 1] - y[k]) / h[k];
    }
    if (n == 2) {
        d[0] = d[1] = del[0];
        return d;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (del[k - 1] * del[k] <= 0) continue;
        const double w1 = 2 * h[k] + h[k - 1], w2 = h[k] + 2 * h[k - 1];
        d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0) return 0.0;
        if (d0 * d1 <= 0 && std::abs(s) > std::abs(3 * d0)) return 3 * d0;
        return s;
    };
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return d;
}

/// Derivative at x[k] of the Lagrange polynomial through x[lo..lo+3].
inline double lagrange_derivative(std::span<const double> x, std::span<const double> y,
                                  std::size_t lo, std::size_t k) {
    double s = 0;
    const double xk = x[k];
    for (std::size_t j = lo; j < lo + 4; ++j) {
        // d/dx L_j(x) at x = xk.
        double dl = 0;
        if (j == k) {
            for (std::size_t m = lo; m < lo + 4; ++m)
                if (m != j) dl += 1 / (x[j] - x[m]);
        } else {
            double num = 1, den = x[j] - x[k];
            for (std::size_t m = lo; m < lo + 4; ++m) {
                if (m == j || m == k) continue;
                num *= xk - x[m];
                den *= x[j] - x[m];
            }
            dl = num / den;
        }
        s += y[j] * dl;
    }
    return s;
}

inline std::vector<double> lagrange_slopes(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 4) return monotone_slopes(x, y);
    std::vector<double> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = std::min(k == 0 ? 0 : k - 1, n - 4);
        d[k] = lagrange_derivative(x, y, lo, k);
    }
    return d;
}

}  // namespace detail

/// Piecewise cubic Hermite function on strictly increasing nodes.
class GridFunction {
public:
    GridFunction() = default;

    GridFunction(std::vector<double> nodes, std::vector<double> values, std::vector<double> slopes,
                 Extrapolation extra = Extrapolation::none())
        : x_(std::move(nodes)), y_(std::move(values)), d_(std::move(slopes)), extra_(extra) {
        check();
        accumulate();
    }

    GridFunction(std::vector<double> nodes, std::vector<double> values,
                 SlopeRule rule = SlopeRule::monotone, Extrapolation extra = Extrapolation::none())
        : x_(std::move(nodes)), y_(std::move(values)), extra_(extra) {
        d_.assign(x_.size(), 0.0);
        check();
        d_ = rule == SlopeRule::monotone ? detail::monotone_slopes(x_, y_) : detail::lagrange_slopes(x_, y_);
        accumulate();
    }

    std::size_t size() const { return x_.size(); }
    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    const std::vector<double>& slopes() const { return d_; }
    const Extrapolation& extrapolation() const { return extra_; }
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }

    double operator()(double x) const {
        if (x >= x_.back()) return beyond(x);
        if (x < x_.front()) throw std::out_of_range("GridFunction: evaluation left of first node");
        const std::size_t k = segment(x);
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * d_[k] +
               (-2 * t3 + 3 * t2) * y_[k + 1] + (t3 - t2) * h * d_[k + 1];
    }

    double derivative(double x) const {
        if (x >= x_.back()) {
            if (x == x_.back()) return d_.back();
            if (extra_.kind == Extrapolation::Kind::power_tail) return extra_.exponent * beyond(x) / x;
            if (extra_.kind == Extrapolation::Kind::constant) return 0.0;
            throw std::out_of_range("GridFunction: derivative right of last node");
        }
        if (x < x_.front()) throw std::out_of_range("GridFunction: derivative left of first node");
        const std::size_t k = segment(x);
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t;
        return ((6 * t2 - 6 * t) * y_[k] + (6 * t - 6 * t2) * y_[k + 1]) / h +
               (3 * t2 - 4 * t + 1) * d_[k] + (3 * t2 - 2 * t) * d_[k + 1];
    }

    /// Exact integral of the interpolant over [a, b] within the node range.
    double integral(double a, double b) const {
        if (b < a) return -integral(b, a);
        if (a < x_.front() || b > x_.back()) throw std::out_of_range("GridFunction: integral outside nodes");
        return primitive(b) - primitive(a);
    }

private:
    void check() const {
        detail::require(x_.size() >= 2 && y_.size() == x_.size() && d_.size() == x_.size(),
                        "GridFunction: need at least two nodes with matching values and slopes");
        for (std::size_t k = 0; k < x_.size(); ++k) {
            detail::require(std::isfinite(x_[k]) && std::isfinite(y_[k]), "GridFunction: non-finite data");
            if (k > 0) detail::require(x_[k] > x_[k - 1], "GridFunction: nodes must be strictly increasing");
        }
    }

    std::size_t segment(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = static_cast<std::size_t>(it - x_.begin());
        return std::min(k == 0 ? 0 : k - 1, x_.size() - 2);
    }

    double beyond(double x) const {
        if (x == x_.back()) return y_.back();
        switch (extra_.kind) {
            case Extrapolation::Kind::constant: return y_.back();
            case Extrapolation::Kind::power_tail: return y_.back() * std::pow(x / x_.back(), extra_.exponent);
            default: throw std::out_of_range("GridFunction: evaluation right of last node");
        }
    }

    void accumulate() {
        cum_.assign(x_.size(), 0.0);
        for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
            const double h = x_[k + 1] - x_[k];
            cum_[k + 1] = cum_[k] + h * (y_[k] + y_[k + 1]) / 2 + h * h * (d_[k] - d_[k + 1]) / 12;
        }
    }

    // ∫_{x_0}^{x} of the interpolant.
    double primitive(double x) const {
        if (x == x_.back()) return cum_.back();
        const std::size_t k = segment(x);
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
        return cum_[k] + h * ((t - t3 + t4 / 2) * y_[k] + h * (t4 / 4 - 2 * t3 / 3 + t2 / 2) * d_[k] +
                              (t3 - t4 / 2) * y_[k + 1] + h * (t4 / 4 - t3 / 3) * d_[k + 1]);
    }

    std::vector<double> x_, y_, d_;
    Extrapolation extra_;
    std::vector<double> cum_;
};

}  // namespace ruin
