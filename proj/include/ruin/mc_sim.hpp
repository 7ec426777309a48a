#pragma once

// Monte-Carlo estimate of finite-horizon ruin frequencies for
//
//   dX_t = ((a - r)κ + r) X_t dt + κσ X_t dW_t - c dt + dJ_t.
//
// Jumps are scheduled exactly (exponential inter-arrival times). Between two
// jumps the path is X_t = Z_t (x - c ∫ Z_s^-1 ds) with Z the stochastic
// exponential, advanced by exact log-normal increments on substeps <= dt; the
// integral of 1/Z uses the trapezoidal rule. x - c ∫ Z^-1 is decreasing between
// jumps, so ruin happens exactly when it reaches 0 and is never skipped between
// substeps; the only discretisation error is in the trapezoidal integral.
//
// Every path draws from its own engine seeded by (seed, path index), so the
// result does not depend on how paths are distributed over threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <thread>
#include <vector>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"
#include "ruin/model.hpp"

namespace ruin {

struct MCConfig {
    double horizon = 50;        ///< T
    double dt = 1e-3;           ///< maximal substep
    std::int64_t n_paths = 10000;
    double barrier = 100;       ///< B; reaching it counts as survival
    std::uint64_t seed = 42;
    int substeps_per_jump_interval = 1;  ///< lower bound on substeps between events
    int threads = 1;            ///< 0: hardware concurrency

    void validate(double u) const {
        detail::require(std::isfinite(horizon) && horizon > 0, "mc: horizon must be positive");
        detail::require(std::isfinite(dt) && dt > 0, "mc: dt must be positive");
        detail::require(n_paths >= 1, "mc: need at least one path");
        detail::require(barrier > u, "mc: barrier must exceed the initial capital");
        detail::require(substeps_per_jump_interval >= 1, "mc: need at least one substep per interval");
        detail::require(threads >= 0, "mc: threads must be non-negative");
    }
};

enum class PathOutcome : std::uint8_t { ruined, hit_barrier, censored };

struct PathResult {
    PathOutcome outcome = PathOutcome::censored;
    double time = 0;
};

struct MCEstimate {
    double u = 0;
    double p_hat = 0;
    double ci_halfwidth = 0;  ///< 95% normal-approximation half width
    std::int64_t n_paths = 0;
    std::int64_t n_ruined = 0;
    std::int64_t n_survived_to_barrier = 0;
    std::int64_t n_censored = 0;
    double censored_fraction = 0;
    std::optional<double> psi_at_barrier;  ///< analytic Ψ(B), when available
    double bias_note = 0;                  ///< Ψ(B) (if known) + censored fraction
    MCConfig config;
};

/// Engine for path `index` of a run seeded with `seed`.
inline std::mt19937_64 path_engine(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedu};
    return std::mt19937_64(seq);
}

template <jump_distribution D, std::uniform_random_bit_generator G>
PathResult simulate_path(const ModelParams& p, const D& dist, double u, const MCConfig& cfg, G& rng) {
    if (u <= 0) return {PathOutcome::ruined, 0.0};
    const double vol = p.volatility();
    const double log_drift = p.growth_rate() - 0.5 * vol * vol;
    std::normal_distribution<double> normal;
    std::exponential_distribution<double> interarrival(p.lambda > 0 ? p.lambda : 1.0);

    double t = 0, x = u;
    while (true) {
        const double next_jump = p.lambda > 0 ? t + interarrival(rng) : std::numeric_limits<double>::infinity();
        const double end = std::min(next_jump, cfg.horizon);
        const auto steps = static_cast<std::int64_t>(std::max<double>(cfg.substeps_per_jump_interval, std::ceil((end - t) / cfg.dt)));
        const double h = (end - t) / static_cast<double>(steps);
        const double sh = std::sqrt(h);
        double z = 1, inv_int = 0;
        double level = x;  // x - c ∫ Z^-1
        for (std::int64_t s = 1; s <= steps; ++s) {
            const double zn = z * std::exp(log_drift * h + vol * sh * normal(rng));
            inv_int += 0.5 * h * (1 / z + 1 / zn);
            z = zn;
            level = x - p.c * inv_int;
            const double now = t + h * static_cast<double>(s);
            if (level <= 0) return {PathOutcome::ruined, now};
            if (z * level >= cfg.barrier) return {PathOutcome::hit_barrier, now};
        }
        x = z * level;
        t = end;
        if (next_jump >= cfg.horizon) return {PathOutcome::censored, cfg.horizon};
        x += dist.sample(rng);
        if (x >= cfg.barrier) return {PathOutcome::hit_barrier, t};
    }
}

/// All path outcomes, indexed by path.
template <jump_distribution D>
std::vector<PathResult> simulate_paths(const ModelParams& p, const D& dist, double u, const MCConfig& cfg) {
    p.validate();
    cfg.validate(u);
    const auto n = static_cast<std::size_t>(cfg.n_paths);
    std::vector<PathResult> out(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto rng = path_engine(cfg.seed, i);
            out[i] = simulate_path(p, dist, u, cfg, rng);
        }
    };
    unsigned nt = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                   : static_cast<unsigned>(cfg.threads);
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, n));
    if (nt <= 1) {
        work(0, n);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + nt - 1) / nt;
        for (unsigned w = 0; w < nt; ++w) {
            const std::size_t b = w * chunk, e = std::min(n, b + chunk);
            if (b < e) pool.emplace_back(work, b, e);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

inline MCEstimate summarize(const std::vector<PathResult>& paths, double u, const MCConfig& cfg,
                            std::optional<double> psi_at_barrier = std::nullopt) {
    MCEstimate e;
    e.u = u;
    e.config = cfg;
    e.n_paths = static_cast<std::int64_t>(paths.size());
    for (const auto& r : paths) {
        switch (r.outcome) {
            case PathOutcome::ruined: ++e.n_ruined; break;
            case PathOutcome::hit_barrier: ++e.n_survived_to_barrier; break;
            case PathOutcome::censored: ++e.n_censored; break;
        }
    }
    const double n = static_cast<double>(e.n_paths);
    e.p_hat = static_cast<double>(e.n_ruined) / n;
    e.ci_halfwidth = 1.959963984540054 * std::sqrt(e.p_hat * (1 - e.p_hat) / n);
    e.censored_fraction = static_cast<double>(e.n_censored) / n;
    e.psi_at_barrier = psi_at_barrier;
    e.bias_note = psi_at_barrier.value_or(0.0) + e.censored_fraction;
    return e;
}

template <jump_distribution D>
MCEstimate estimate_ruin(const ModelParams& p, const D& dist, double u, const MCConfig& cfg,
                         std::optional<double> psi_at_barrier = std::nullopt) {
    return summarize(simulate_paths(p, dist, u, cfg), u, cfg, psi_at_barrier);
}

inline const char* to_string(PathOutcome o) {
    switch (o) {
        case PathOutcome::ruined: return "ruined";
        case PathOutcome::hit_barrier: return "hit_barrier";
        default: return "censored";
    }
}

/// Per-path CSV: path,outcome,time.
inline void write_paths_csv(std::ostream& os, const std::vector<PathResult>& paths) {
    os << "path,outcome,time\n";
    os.precision(17);
    for (std::size_t i = 0; i < paths.size(); ++i) os << i << ',' << to_string(paths[i].outcome) << ',' << paths[i].time << '\n';
}

}  // namespace ruin
