#pragma once

// Jump-size distributions F with F(0) = 0 and finite mean.
//
// Every distribution exposes the tail F̄ = 1 - F, its left limit F̄(z-), the
// integrated tail ∫_z^∞ F̄, a density for the absolutely continuous part and
// the list of atoms. Samplers take the random engine explicitly.

#include <cmath>
#include <concepts>
#include <sstream>
#include <type_traits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ruin/errors.hpp"

namespace ruin {

template <typename D>
concept jump_distribution = requires(const D& d, double z, std::mt19937_64& rng) {
    { d.tail(z) } -> std::convertible_to<double>;
    { d.tail_left(z) } -> std::convertible_to<double>;
    { d.integrated_tail(z) } -> std::convertible_to<double>;
    { d.density(z) } -> std::convertible_to<double>;
    { d.mean() } -> std::convertible_to<double>;
    { d.atoms() } -> std::convertible_to<std::vector<double>>;
    { d.sample(rng) } -> std::convertible_to<double>;
};

class Exponential {
public:
    explicit Exponential(double mean) : mean_(mean) {
        detail::require(std::isfinite(mean) && mean > 0, "exponential: mean must be positive");
    }

    double tail(double z) const { return z <= 0 ? 1.0 : std::exp(-z / mean_); }
    double tail_left(double z) const { return tail(z); }
    double integrated_tail(double z) const {
        return z <= 0 ? mean_ - z : mean_ * std::exp(-z / mean_);
    }
    double density(double z) const { return z < 0 ? 0.0 : std::exp(-z / mean_) / mean_; }
    double mean() const { return mean_; }
    std::vector<double> atoms() const { return {}; }

    template <std::uniform_random_bit_generator G>
    double sample(G& rng) const {
        double x = 0;
        while (x <= 0) x = std::exponential_distribution<double>(1.0 / mean_)(rng);
        return x;
    }

private:
    double mean_;
};

/// Pareto distribution of the second kind (Lomax): F̄(z) = (1 + z/scale)^(-shape).
class Pareto {
public:
    Pareto(double shape, double scale) : shape_(shape), scale_(scale) {
        detail::require(std::isfinite(shape) && shape > 1,
                        "pareto: shape must exceed 1 (finite mean required)");
        detail::require(std::isfinite(scale) && scale > 0, "pareto: scale must be positive");
    }

    double tail(double z) const { return z <= 0 ? 1.0 : std::pow(1 + z / scale_, -shape_); }
    double tail_left(double z) const { return tail(z); }
    double integrated_tail(double z) const {
        if (z <= 0) return mean() - z;
        return scale_ / (shape_ - 1) * std::pow(1 + z / scale_, 1 - shape_);
    }
    double density(double z) const {
        return z < 0 ? 0.0 : shape_ / scale_ * std::pow(1 + z / scale_, -shape_ - 1);
    }
    double mean() const { return scale_ / (shape_ - 1); }
    double shape() const { return shape_; }
    double scale() const { return scale_; }
    std::vector<double> atoms() const { return {}; }

    template <std::uniform_random_bit_generator G>
    double sample(G& rng) const {
        // 1 - U lies in (0, 1], so the power is finite.
        double u = 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        double x = scale_ * (std::pow(u, -1.0 / shape_) - 1.0);
        return x > 0 ? x : scale_ * 1e-300;
    }

private:
    double shape_;
    double scale_;
};

/// Point mass at `value`. F̄ is right-continuous: tail(value) = 0, tail_left(value) = 1.
class Deterministic {
public:
    explicit Deterministic(double value) : value_(value) {
        detail::require(std::isfinite(value) && value > 0, "deterministic: value must be positive");
    }

    double tail(double z) const { return z < value_ ? 1.0 : 0.0; }
    double tail_left(double z) const { return z <= value_ ? 1.0 : 0.0; }
    double integrated_tail(double z) const { return z < value_ ? value_ - z : 0.0; }
    double density(double) const { return 0.0; }
    double mean() const { return value_; }
    double value() const { return value_; }
    std::vector<double> atoms() const { return {value_}; }

    template <std::uniform_random_bit_generator G>
    double sample(G&) const {
        return value_;
    }

private:
    double value_;
};

/// Runtime-selected distribution, as read from a configuration file.
class JumpDistribution {
public:
    using Variant = std::variant<Exponential, Pareto, Deterministic>;

    JumpDistribution(Exponential d) : d_(d) {}
    JumpDistribution(Pareto d) : d_(d) {}
    JumpDistribution(Deterministic d) : d_(d) {}

    double tail(double z) const { return visit([z](const auto& d) { return d.tail(z); }); }
    double tail_left(double z) const {
        return visit([z](const auto& d) { return d.tail_left(z); });
    }
    double integrated_tail(double z) const {
        return visit([z](const auto& d) { return d.integrated_tail(z); });
    }
    double density(double z) const { return visit([z](const auto& d) { return d.density(z); }); }
    double mean() const { return visit([](const auto& d) { return d.mean(); }); }
    std::vector<double> atoms() const {
        return std::visit([](const auto& d) { return d.atoms(); }, d_);
    }

    template <std::uniform_random_bit_generator G>
    double sample(G& rng) const {
        return std::visit([&rng](const auto& d) { return d.sample(rng); }, d_);
    }

    std::string kind() const {
        switch (d_.index()) {
            case 0: return "exponential";
            case 1: return "pareto";
            default: return "deterministic";
        }
    }

    const Variant& variant() const { return d_; }

private:
    template <typename F>
    double visit(F&& f) const {
        return std::visit(std::forward<F>(f), d_);
    }

    Variant d_;
};

/// e.g. "exponential(mean=1)".
inline std::string describe(const JumpDistribution& d) {
    auto num = [](double x) {
        std::ostringstream os;
        os.precision(17);
        os << x;
        return os.str();
    };
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Exponential>) return "exponential(mean=" + num(x.mean()) + ")";
            else if constexpr (std::is_same_v<T, Pareto>)
                return "pareto(shape=" + num(x.shape()) + ", scale=" + num(x.scale()) + ")";
            else return "deterministic(value=" + num(x.value()) + ")";
        },
        d.variant());
}

inline JumpDistribution exponential_dist(double mean) { return Exponential(mean); }
inline JumpDistribution pareto_dist(double shape, double scale) { return Pareto(shape, scale); }
inline JumpDistribution deterministic_dist(double value) { return Deterministic(value); }

/// Smallest z >= lo with ∫_z^∞ F̄ <= eps · ∫_lo^∞ F̄ (bisection on a doubling bracket).
template <jump_distribution D>
double truncation_point(const D& dist, double lo, double eps) {
    const double total = dist.integrated_tail(lo);
    if (total <= 0) return lo;
    const double target = eps * total;
    double step = dist.mean();
    double hi = lo + step;
    while (dist.integrated_tail(hi) > target) {
        step *= 2;
        hi = lo + step;
        if (!std::isfinite(hi)) throw NonConvergence("truncation_point: tail integral does not vanish");
    }
    double a = lo;
    for (int i = 0; i < 200 && hi - a > 1e-12 * (1 + hi); ++i) {
        double m = 0.5 * (a + hi);
        if (dist.integrated_tail(m) > target) a = m;
        else hi = m;
    }
    return hi;
}

}  // namespace ruin
