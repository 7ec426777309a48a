#pragma once

// JSON run configuration.
//
//   {
//     "a": 2, "r": 0.1, "sigma": 1, "kappa": 1, "c": 1, "lambda": 1,
//     "distribution": {"kind": "exponential", "params": {"mean": 1}},
//     "solver": {"safety": 2, "tol": 1e-10, "tail_nodes": 128, "volterra_nodes": 256,
//                "quad_eps": 1e-12, "min_u0": 1},
//     "mc": {"horizon": 50, "paths": 100000, "dt": 0.002, "seed": 42, "barrier": 50,
//            "u": [1, 5, 10], "threads": 1, "substeps": 1},
//     "probes": {"lo": 0.04, "hi": 400, "n": 100},
//     "sweep": {"parameter": "kappa", "from": 0.1, "to": 1, "steps": 10, "u": [1, 5, 10]}
//   }
//
// Only the six model keys and "distribution" are required. Distribution kinds:
// exponential {mean}, pareto {shape, scale}, deterministic {value}.

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "ruin/distributions.hpp"
#include "ruin/errors.hpp"
#include "ruin/mc_sim.hpp"
#include "ruin/model.hpp"
#include "ruin/pipeline.hpp"

namespace ruin {

struct ProbeSettings {
    std::optional<double> lo, hi;  ///< default u0/100 and 100·u0
    int n = 100;
};

struct SweepSettings {
    std::string parameter = "kappa";
    double from = 0.1, to = 1.0;
    int steps = 10;
    std::vector<double> u{1, 5, 10};
};

struct RunConfig {
    ModelParams params;
    JumpDistribution dist = exponential_dist(1.0);
    SolverSettings solver;
    MCConfig mc;
    std::vector<double> mc_u{1, 5, 10};
    ProbeSettings probes;
    SweepSettings sweep;
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError("config: " + where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) throw ValidationError("config: unknown key '" + it.key() + "' in " + where);
    }
}

inline double number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError("config: missing '" + key + "' in " + where);
    if (!j.at(key).is_number()) throw ValidationError("config: '" + key + "' in " + where + " must be a number");
    return j.at(key).get<double>();
}

template <typename T>
void optional_number(const json& j, const std::string& key, T& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw ValidationError("config: '" + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!j.at(key).is_number_integer()) throw ValidationError("config: '" + key + "' must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (j.at(key).is_number_integer() && !j.at(key).is_number_unsigned())
                throw ValidationError("config: '" + key + "' must be non-negative");
        }
    }
    out = j.at(key).get<T>();
}

inline std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ValidationError("config: " + where + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& x : j) {
        if (!x.is_number()) throw ValidationError("config: " + where + " must be an array of numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

inline JumpDistribution parse_distribution(const json& j) {
    reject_unknown(j, {"kind", "params"}, "distribution");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ValidationError("config: distribution.kind missing");
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.value("params", json::object());
    if (kind == "exponential") {
        reject_unknown(params, {"mean"}, "distribution.params");
        return exponential_dist(number(params, "mean", "distribution.params"));
    }
    if (kind == "pareto") {
        reject_unknown(params, {"shape", "scale"}, "distribution.params");
        return pareto_dist(number(params, "shape", "distribution.params"),
                           number(params, "scale", "distribution.params"));
    }
    if (kind == "deterministic") {
        reject_unknown(params, {"value"}, "distribution.params");
        return deterministic_dist(number(params, "value", "distribution.params"));
    }
    throw ValidationError("config: unknown distribution kind '" + kind + "'");
}

}  // namespace detail

inline void validate(const RunConfig& rc) {
    rc.params.validate();
    const auto& s = rc.solver;
    detail::require(s.safety > 1, "solver.safety must exceed 1");
    detail::require(s.tol > 0, "solver.tol must be positive");
    detail::require(s.tail_nodes >= 4 && s.volterra_nodes >= 4, "solver grid sizes must be at least 4");
    detail::require(s.quad_eps > 0 && s.quad_eps < 1, "solver.quad_eps must lie in (0, 1)");
    detail::require(!s.min_u0 || *s.min_u0 > 0, "solver.min_u0 must be positive");
    detail::require(rc.probes.n >= 1, "probes.n must be positive");
    detail::require(rc.sweep.steps >= 1, "sweep.steps must be positive");
    for (double u : rc.mc_u) detail::require(u >= 0, "mc.u entries must be non-negative");
}

inline RunConfig parse_config(const nlohmann::json& j) {
    using detail::number;
    using detail::optional_number;
    detail::reject_unknown(j, {"a", "r", "sigma", "kappa", "c", "lambda", "distribution", "solver", "mc", "probes", "sweep"},
                           "config");
    RunConfig rc;
    rc.params = ModelParams{number(j, "a", "config"),     number(j, "r", "config"), number(j, "sigma", "config"),
                            number(j, "kappa", "config"), number(j, "c", "config"), number(j, "lambda", "config")};
    if (!j.contains("distribution")) throw ValidationError("config: missing 'distribution'");
    rc.dist = detail::parse_distribution(j.at("distribution"));

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        detail::reject_unknown(s, {"safety", "tol", "tail_nodes", "volterra_nodes", "quad_eps", "min_u0"}, "solver");
        optional_number(s, "safety", rc.solver.safety);
        optional_number(s, "tol", rc.solver.tol);
        optional_number(s, "tail_nodes", rc.solver.tail_nodes);
        optional_number(s, "volterra_nodes", rc.solver.volterra_nodes);
        optional_number(s, "quad_eps", rc.solver.quad_eps);
        if (s.contains("min_u0")) rc.solver.min_u0 = number(s, "min_u0", "solver");
    }
    if (j.contains("mc")) {
        const auto& m = j.at("mc");
        detail::reject_unknown(m, {"horizon", "paths", "dt", "seed", "barrier", "u", "threads", "substeps"}, "mc");
        optional_number(m, "horizon", rc.mc.horizon);
        optional_number(m, "paths", rc.mc.n_paths);
        optional_number(m, "dt", rc.mc.dt);
        optional_number(m, "seed", rc.mc.seed);
        optional_number(m, "barrier", rc.mc.barrier);
        optional_number(m, "threads", rc.mc.threads);
        optional_number(m, "substeps", rc.mc.substeps_per_jump_interval);
        if (m.contains("u")) rc.mc_u = detail::number_list(m.at("u"), "mc.u");
    }
    if (j.contains("probes")) {
        const auto& p = j.at("probes");
        detail::reject_unknown(p, {"lo", "hi", "n"}, "probes");
        if (p.contains("lo")) rc.probes.lo = number(p, "lo", "probes");
        if (p.contains("hi")) rc.probes.hi = number(p, "hi", "probes");
        optional_number(p, "n", rc.probes.n);
    }
    if (j.contains("sweep")) {
        const auto& s = j.at("sweep");
        detail::reject_unknown(s, {"parameter", "from", "to", "steps", "u"}, "sweep");
        if (s.contains("parameter")) {
            if (!s.at("parameter").is_string()) throw ValidationError("config: sweep.parameter must be a string");
            rc.sweep.parameter = s.at("parameter").get<std::string>();
        }
        optional_number(s, "from", rc.sweep.from);
        optional_number(s, "to", rc.sweep.to);
        optional_number(s, "steps", rc.sweep.steps);
        if (s.contains("u")) rc.sweep.u = detail::number_list(s.at("u"), "sweep.u");
    }
    validate(rc);
    return rc;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config '" + path + "': " + e.what());
    }
    return parse_config(j);
}

}  // namespace ruin
