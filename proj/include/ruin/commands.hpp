#pragma once

// The four CLI commands: solve, verify, simulate, sweep.
//
// Each command takes a parsed RunConfig and an output directory and returns
// the process exit code. Library exceptions propagate; run_guarded maps them
// to exit codes (1 validation, 2 non-convergence, 3 hypothesis violated).
// Files are only written after all numbers are computed, so a failing run
// leaves no partial output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ruin/assembly.hpp"
#include "ruin/config.hpp"
#include "ruin/errors.hpp"
#include "ruin/mc_sim.hpp"
#include "ruin/pipeline.hpp"
#include "ruin/tail_solver.hpp"
#include "ruin/volterra_solver.hpp"

namespace ruin {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_nonconvergence = 2, exit_hypothesis = 3 };

/// Runs `body`, mapping library exceptions to exit codes and printing the message to `err`.
inline int run_guarded(const std::function<int()>& body, std::ostream& err = std::cerr) {
    try {
        return body();
    } catch (const HypothesisViolated& e) {
        err << "hypothesis violated: " << e.what() << '\n';
        return exit_hypothesis;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_validation;
    } catch (const NonConvergence& e) {
        err << "no convergence: " << e.what() << '\n';
        return exit_nonconvergence;
    }
}

// ---------------------------------------------------------------- output

/// Flat JSON object with keys in insertion order; numbers use 17 significant digits.
class JsonObject {
public:
    JsonObject& number(const std::string& key, double v) {
        fields_.emplace_back(key, std::isfinite(v) ? format_double(v) : "null");
        return *this;
    }
    JsonObject& integer(const std::string& key, long long v) {
        fields_.emplace_back(key, std::to_string(v));
        return *this;
    }
    JsonObject& text(const std::string& key, const std::string& v) {
        std::string q = "\"";
        for (char ch : v) {
            if (ch == '"' || ch == '\\') q += '\\';
            q += ch;
        }
        fields_.emplace_back(key, q + "\"");
        return *this;
    }
    JsonObject& optional_number(const std::string& key, std::optional<double> v) {
        fields_.emplace_back(key, v ? format_double(*v) : "null");
        return *this;
    }
    JsonObject& raw(const std::string& key, std::string v) {
        fields_.emplace_back(key, std::move(v));
        return *this;
    }

    std::string str(int indent = 0) const {
        const std::string pad(indent + 2, ' '), close(indent, ' ');
        std::string s = "{\n";
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            s += pad + "\"" + fields_[i].first + "\": " + fields_[i].second;
            s += i + 1 < fields_.size() ? ",\n" : "\n";
        }
        return s + close + "}";
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

namespace detail {

inline std::string number_list_json(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s + "]";
}

/// Writes every (file name, content) pair into `dir`, creating it if needed.
inline void write_outputs(const std::filesystem::path& dir,
                          const std::vector<std::pair<std::string, std::string>>& files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto& [name, content] : files) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw ValidationError("cannot write '" + (dir / name).string() + "'");
        os << content;
    }
}

inline std::string params_line(const RunConfig& rc) {
    const auto& p = rc.params;
    std::ostringstream os;
    os << "a=" << format_double(p.a) << " r=" << format_double(p.r) << " sigma=" << format_double(p.sigma)
       << " kappa=" << format_double(p.kappa) << " c=" << format_double(p.c) << " lambda=" << format_double(p.lambda)
       << " jumps=" << describe(rc.dist);
    return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------- solve

struct SolveArtifacts {
    Solved solved;
    std::vector<TableRow> table;
    double residual_max = 0;
    double residual_argmax = 0;
    AsymptoticReport asymptotics;
};

/// Probe points of the solution table: 0, then n log-spaced points over [lo, hi] plus u0.
inline std::vector<double> table_probes(const ProbeSettings& ps, double u0) {
    const double lo = ps.lo.value_or(u0 / 100), hi = ps.hi.value_or(100 * u0);
    detail::require(lo > 0 && hi > lo, "probes: need 0 < lo < hi");
    std::vector<double> extra;
    if (u0 >= lo && u0 <= hi) extra.push_back(u0);
    auto p = log_probes(lo, hi, ps.n, extra);
    p.insert(p.begin(), 0.0);
    return p;
}

inline SolveArtifacts compute_solution(const RunConfig& rc) {
    SolveArtifacts a{solve_model(rc.params, rc.dist, rc.solver), {}, 0, 0, {}};
    const auto& sol = a.solved.solution;
    a.table = solution_table(sol, table_probes(rc.probes, sol.u0()), rc.dist);
    for (const auto& row : a.table) {
        if (row.u > 0 && row.residual >= a.residual_max) {
            a.residual_max = row.residual;
            a.residual_argmax = row.u;
        }
    }
    a.asymptotics = asymptotic_constant(sol);
    return a;
}

inline JsonObject summary_json(const SolveArtifacts& a) {
    const auto& k = a.solved.constants;
    const auto& sol = a.solved.solution;
    JsonObject j;
    j.number("gamma", k.gamma)
        .number("alpha", k.alpha)
        .number("mu", k.mu)
        .number("u0", a.solved.split.u0)
        .number("theta", a.solved.split.theta)
        .number("C", sol.C())
        .number("C_asym", sol.C_asym())
        .number("residual_max", a.residual_max);
    return j;
}

inline std::string solve_report(const RunConfig& rc, const SolveArtifacts& a) {
    const auto& k = a.solved.constants;
    const auto& sol = a.solved.solution;
    const auto& log = sol.tail().log();
    double max_ratio = 0;
    for (const auto& r : log) max_ratio = std::max(max_ratio, r.ratio);
    std::ostringstream os;
    os << "model: " << detail::params_line(rc) << '\n'
       << "gamma = " << format_double(k.gamma) << "\nalpha = " << format_double(k.alpha)
       << "\nmu = " << format_double(k.mu) << '\n'
       << "gluing point u0 = " << format_double(sol.u0()) << ", contraction constant theta = "
       << format_double(a.solved.split.theta) << '\n'
       << "tail fixed point: " << log.size() << " iterations, last delta " << format_double(log.back().delta)
       << ", largest delta ratio " << format_double(max_ratio) << ", w(inf) = " << format_double(sol.tail().w_inf())
       << '\n'
       << "volterra march: " << sol.low().nodes().size() - 1 << " intervals, g(0+) = "
       << format_double(sol.low().boundary_value()) << '\n'
       << "integral of ghat = " << format_double(sol.integral()) << " (below u0 "
       << format_double(sol.integral_low()) << ", above u0 " << format_double(sol.integral_tail()) << ")\n"
       << "C = " << format_double(sol.C()) << '\n'
       << "C_asym = lim u^(gamma-1) Psi(u) = " << format_double(sol.C_asym()) << '\n'
       << "fitted u^(gamma-1) Psi(u) at u = " << format_double(a.asymptotics.u_fit) << ": "
       << format_double(a.asymptotics.fitted) << ", log-log slope over the last decade "
       << format_double(a.asymptotics.slope) << '\n';
    if (!a.asymptotics.consistent) os << "warning: " << a.asymptotics.warning << '\n';
    os << "max normalized IDE residual = " << format_double(a.residual_max) << " at u = "
       << format_double(a.residual_argmax) << " over " << a.table.size() - 1 << " probes\n";
    os << "\n       u                Phi(u)                   Psi(u)\n";
    for (double u : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
        os << std::setw(8) << format_double(u) << "   " << std::setw(24) << std::left << format_double(sol.Phi(u))
           << ' ' << format_double(sol.Psi(u)) << std::right << '\n';
    }
    return os.str();
}

inline int cmd_solve(const RunConfig& rc, const std::filesystem::path& out, std::ostream& os = std::cout) {
    const SolveArtifacts a = compute_solution(rc);
    std::ostringstream table;
    write_table_csv(table, a.table);
    const std::string report = solve_report(rc, a);
    detail::write_outputs(out, {{"table.csv", table.str()},
                                {"summary.json", summary_json(a).str() + "\n"},
                                {"report.txt", report}});
    os << report;
    return exit_ok;
}

// ---------------------------------------------------------------- verify

struct Check {
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
    std::string note;
};

namespace detail {

inline Check at_most(std::string name, double value, double threshold, std::string note = {}) {
    return {std::move(name), value, threshold, std::isfinite(value) && value <= threshold, std::move(note)};
}

}  // namespace detail

/// u0-independence: sup over u >= 2u0 of u^γ |g*(u; u0) - g*(u; 2u0)|.
template <jump_distribution D>
double u0_independence(const TailSolution& a, const D& dist, double tol, const TailOptions& opt) {
    const auto& k = a.constants();
    const TailSolution b = solve_tail(k, dist, 2 * a.u0(), tol, opt);
    double worst = 0;
    auto diff = [&](double u) {
        return std::exp(-k.alpha / u) * std::abs(a.weight(u) - b.weight(u));
    };
    for (double v : b.weight_grid().nodes()) worst = std::max(worst, diff(v > 0 ? b.u0() / v : INFINITY));
    for (double u : log_probes(b.u0(), 1e4 * b.u0(), 200)) worst = std::max(worst, diff(u));
    worst = std::max(worst, std::abs(a.w_inf() - b.w_inf()));
    return worst;
}

/// |C ∫_0^U ĝ + closure - 1| with ∫_0^U ĝ by adaptive quadrature and the
/// power-tail closure ĝ(U) U / (γ - 1) for the part beyond U.
inline double normalization_defect(const GluedSolution& sol, double U) {
    const double g = sol.constants().gamma;
    std::vector<double> br{sol.u0()};
    for (double u = sol.u0() / 64; u < U; u *= 2)
        if (std::abs(u - sol.u0()) > 1e-12) br.push_back(u);
    std::sort(br.begin(), br.end());
    br.erase(std::remove_if(br.begin(), br.end(), [&](double x) { return x <= 0 || x >= U; }), br.end());
    const double body =
        integrate_adaptive([&](double u) { return sol.ghat(u); }, 0.0, U, QuadOptions{1e-300, 1e-13, 50000}, br).value;
    const double closure = sol.ghat(U) * U / (g - 1);
    return std::abs(sol.C() * (body + closure) - 1);
}

inline std::vector<Check> run_checks(const RunConfig& rc) {
    const SolveArtifacts a = compute_solution(rc);
    const auto& sol = a.solved.solution;
    const auto& k = a.solved.constants;
    const double u0 = sol.u0();
    const double tol = rc.solver.tol;
    std::vector<Check> out;

    out.push_back(detail::at_most("ide_residual_max", a.residual_max, 1e-4,
                                  "normalized, " + std::to_string(a.table.size() - 1) + " probes, worst at u=" +
                                      format_double(a.residual_argmax)));
    out.push_back(detail::at_most("ide_residual_at_u0", ide_residual(sol, u0, rc.dist), 1e-4));

    // Contraction: every delta ratio bounded by θ, iterates increasing.
    double max_ratio = 0, min_inc = INFINITY;
    for (const auto& r : sol.tail().log()) {
        max_ratio = std::max(max_ratio, r.ratio);
        min_inc = std::min(min_inc, r.min_increment);
    }
    out.push_back(detail::at_most("contraction_ratio", max_ratio, a.solved.split.theta,
                                  std::to_string(sol.tail().log().size()) + " iterations"));
    out.push_back(detail::at_most("iterate_decrease", std::max(0.0, -min_inc), 1e-14));

    TailOptions to;
    to.nodes = rc.solver.tail_nodes;
    to.quad_eps = rc.solver.quad_eps;
    out.push_back(detail::at_most("u0_independence", u0_independence(sol.tail(), rc.dist, tol, to), 10 * tol,
                                  "weighted norm on [2u0, inf)"));

    // Volterra equation, by an independent quadrature at off-grid points.
    if (k.mu != 0) {
        const VolterraProblem<JumpDistribution> problem(sol.tail(), rc.dist, rc.solver.quad_eps);
        double worst = 0;
        const auto& nodes = sol.low().nodes();
        const std::size_t n = nodes.size() - 1;
        for (std::size_t i : {std::size_t{1}, n / 16, n / 8, n / 4, n / 2, 3 * n / 4, n - 2}) {
            const double u = 0.5 * (nodes[i] + nodes[i + 1]);
            worst = std::max(worst, std::abs(volterra_residual(problem, sol.low(), u)));
        }
        out.push_back(detail::at_most("volterra_residual", worst, 1e-6, "7 off-grid probes"));
        out.push_back(detail::at_most("boundary_value",
                                      std::abs(sol.low().boundary_value() - boundary_formula(problem, sol.low())),
                                      1e-6, "g(0+) against H(0)/alpha + (mu/alpha) int g Fbar"));
    }
    // e^(-α/u) underflows below u = α/700; there only g >= 0 is checkable.
    double gronwall_excess = 0, min_g = INFINITY, min_all = INFINITY;
    for (std::size_t i = 0; i < sol.low().nodes().size(); ++i) {
        const double u = sol.low().nodes()[i], g = sol.low().values()[i];
        gronwall_excess = std::max(gronwall_excess, g - gronwall_bound(sol.low(), u));
        min_all = std::min(min_all, g);
        if (u >= k.alpha / 700 || k.mu != 0) min_g = std::min(min_g, g);
    }
    out.push_back(detail::at_most("gronwall_excess", gronwall_excess, 0.0));
    out.push_back({"positivity", min_g, 0.0, min_g > 0 && min_all >= 0, "min g over the nodes (must be > 0)"});

    const double dl = sol.low().derivative(u0), dh = sol.tail().derivative(u0);
    out.push_back(detail::at_most("derivative_jump_at_u0", std::abs(dl - dh) / std::abs(dh), 1e-3,
                                  "relative, one-sided derivatives"));

    // Boundary conditions and normalization.
    out.push_back({"phi_at_zero", sol.Phi(0.0), 0.0, sol.Phi(0.0) == 0.0, "must be exactly 0"});
    double worst_drop = 0;
    for (std::size_t i = 1; i < a.table.size(); ++i) {
        worst_drop = std::max(worst_drop, a.table[i - 1].phi - a.table[i].phi);
    }
    out.push_back(detail::at_most("phi_monotone", worst_drop, 0.0, "largest decrease between probes"));
    const double U = a.table.back().u;
    out.push_back(detail::at_most("normalization", normalization_defect(sol, U), 1e-6,
                                  "C int_0^U ghat + tail closure at U=" + format_double(U)));

    // Power-law tail.
    const double expected = -(k.gamma - 1);
    out.push_back(detail::at_most("asymptotic_slope", std::abs(a.asymptotics.slope / expected - 1), 0.01,
                                  "slope " + format_double(a.asymptotics.slope)));
    out.push_back(detail::at_most("asymptotic_cauchy", a.asymptotics.cauchy, 0.02));
    out.push_back(detail::at_most("asymptotic_constant", std::abs(a.asymptotics.fitted / a.asymptotics.C_asym - 1),
                                  0.02, "fitted against C w(inf)/(gamma-1)"));

    double ibp = 0;
    for (double u : {1.0, 5.0, 10.0}) {
        const auto r = integration_by_parts(sol, u, rc.dist);
        ibp = std::max(ibp, std::abs(r.lhs - r.rhs));
    }
    out.push_back(detail::at_most("integration_by_parts", ibp, 1e-6, "u in {1, 5, 10}"));

    if (k.mu == 0) {
        double rel = 0, phi_err = 0;
        // ∫_0^∞ u^-γ e^(-α/u) du = Γ(γ-1) α^(1-γ)
        const double total = std::tgamma(k.gamma - 1) * std::pow(k.alpha, 1 - k.gamma);
        for (const auto& row : a.table) {
            if (row.u <= 0) continue;
            const double exact = std::pow(row.u, -k.gamma) * std::exp(-k.alpha / row.u);
            rel = std::max(rel, std::abs(row.ghat / exact - 1));
            const auto part = integrate_adaptive(
                [&](double t) { return std::pow(t, -k.gamma) * std::exp(-k.alpha / t); }, 0.0, row.u,
                QuadOptions{1e-300, 1e-13, 20000});
            phi_err = std::max(phi_err, std::abs(row.phi - part.value / total));
        }
        out.push_back(detail::at_most("closed_form_ghat", rel, 1e-8, "max relative error against u^-g e^(-a/u)"));
        out.push_back(detail::at_most("closed_form_phi", phi_err, 1e-8));
    }
    return out;
}

inline std::string format_checks(const std::vector<Check>& checks) {
    std::ostringstream os;
    os << std::left << std::setw(24) << "check" << std::setw(26) << "value" << std::setw(12) << "threshold"
       << "result\n";
    for (const auto& c : checks) {
        char v[32], t[32];
        std::snprintf(v, sizeof v, "%.17g", c.value);
        std::snprintf(t, sizeof t, "%.3g", c.threshold);
        os << std::setw(24) << c.name << std::setw(26) << v << std::setw(12) << t << (c.pass ? "PASS" : "FAIL");
        if (!c.note.empty()) os << "  " << c.note;
        os << '\n';
    }
    return os.str();
}

inline int cmd_verify(const RunConfig& rc, const std::optional<std::filesystem::path>& out,
                      std::ostream& os = std::cout) {
    const auto checks = run_checks(rc);
    const std::string text = format_checks(checks);
    if (out) detail::write_outputs(*out, {{"verify.txt", text}});
    os << text;
    const bool ok = std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    os << (ok ? "all checks passed\n" : "some checks FAILED\n");
    return ok ? exit_ok : exit_nonconvergence;
}

// ---------------------------------------------------------------- simulate

inline JsonObject estimate_json(const MCEstimate& e) {
    JsonObject j;
    j.number("u", e.u)
        .number("p_hat", e.p_hat)
        .number("ci", e.ci_halfwidth)
        .integer("n_paths", e.n_paths)
        .number("T", e.config.horizon)
        .number("B", e.config.barrier)
        .number("dt", e.config.dt)
        .integer("seed", static_cast<long long>(e.config.seed))
        .number("bias_note", e.bias_note)
        .integer("n_ruined", e.n_ruined)
        .integer("n_survived_to_barrier", e.n_survived_to_barrier)
        .integer("n_censored", e.n_censored)
        .optional_number("psi_at_barrier", e.psi_at_barrier);
    return j;
}

struct SimulationRun {
    std::vector<MCEstimate> estimates;
    std::vector<std::optional<double>> psi_solver;  ///< analytic Ψ(u), when available
    std::vector<std::vector<PathResult>> paths;
};

/// MC estimates at every u in rc.mc_u. The analytic solver is used for the
/// bias bookkeeping when its hypotheses hold; otherwise only censoring counts.
inline SimulationRun run_simulation(const RunConfig& rc, bool keep_paths) {
    std::optional<Solved> solved;
    try {
        solved = solve_model(rc.params, rc.dist, rc.solver);
    } catch (const HypothesisViolated&) {
    } catch (const ValidationError&) {
        // c = 0 or similar: no analytic reference, the simulation still runs.
    }
    SimulationRun run;
    for (double u : rc.mc_u) {
        auto paths = simulate_paths(rc.params, rc.dist, u, rc.mc);
        std::optional<double> psi_b, psi_u;
        if (solved) {
            psi_b = solved->solution.Psi(rc.mc.barrier);
            psi_u = solved->solution.Psi(u);
        }
        run.estimates.push_back(summarize(paths, u, rc.mc, psi_b));
        run.psi_solver.push_back(psi_u);
        if (keep_paths) run.paths.push_back(std::move(paths));
    }
    return run;
}

inline int cmd_simulate(const RunConfig& rc, const std::filesystem::path& out, bool paths_csv,
                        std::ostream& os = std::cout) {
    const SimulationRun run = run_simulation(rc, paths_csv);
    std::vector<std::pair<std::string, std::string>> files;
    std::string json = "[\n";
    for (std::size_t i = 0; i < run.estimates.size(); ++i) {
        JsonObject j = estimate_json(run.estimates[i]);
        j.optional_number("psi_solver", run.psi_solver[i]);
        json += "  " + j.str(2) + (i + 1 < run.estimates.size() ? ",\n" : "\n");
    }
    json += "]\n";
    files.emplace_back("simulate.json", json);
    if (paths_csv) {
        for (std::size_t i = 0; i < run.paths.size(); ++i) {
            std::ostringstream csv;
            write_paths_csv(csv, run.paths[i]);
            files.emplace_back("paths_" + std::to_string(i) + ".csv", csv.str());
        }
    }
    detail::write_outputs(out, files);
    os << "model: " << detail::params_line(rc) << '\n'
       << "paths=" << rc.mc.n_paths << " T=" << format_double(rc.mc.horizon) << " B=" << format_double(rc.mc.barrier)
       << " dt=" << format_double(rc.mc.dt) << " seed=" << rc.mc.seed << '\n';
    for (std::size_t i = 0; i < run.estimates.size(); ++i) {
        const auto& e = run.estimates[i];
        os << "u=" << format_double(e.u) << " p_hat=" << format_double(e.p_hat)
           << " ci=" << format_double(e.ci_halfwidth) << " censored=" << e.n_censored
           << " bias_note=" << format_double(e.bias_note);
        if (run.psi_solver[i]) os << " psi_solver=" << format_double(*run.psi_solver[i]);
        os << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------- sweep

inline void set_parameter(ModelParams& p, const std::string& name, double v) {
    if (name == "a") p.a = v;
    else if (name == "r") p.r = v;
    else if (name == "sigma") p.sigma = v;
    else if (name == "kappa") p.kappa = v;
    else if (name == "c") p.c = v;
    else if (name == "lambda") p.lambda = v;
    else throw ValidationError("sweep: unknown parameter '" + name + "' (use a, r, sigma, kappa, c or lambda)");
}

struct SweepRow {
    double value = 0;
    double gamma = 0;
    std::string status;  ///< analytic, infeasible, mc or nonconvergence
    std::vector<std::optional<double>> psi;
    std::optional<double> C_asym;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<std::pair<double, double>> gamma_one_brackets;  ///< consecutive values where γ - 1 changes sign
};

/// Points from..to (inclusive, `steps` points). Infeasible points (γ <= 1) get MC
/// estimates when `with_mc` is set.
inline SweepResult run_sweep(const RunConfig& rc, bool with_mc) {
    const auto& s = rc.sweep;
    SweepResult res;
    for (int i = 0; i < s.steps; ++i) {
        const double v = s.steps == 1 ? s.from
                       : i == s.steps - 1 ? s.to
                                          : s.from + (s.to - s.from) * i / (s.steps - 1);
        RunConfig point = rc;
        set_parameter(point.params, s.parameter, v);
        SweepRow row;
        row.value = v;
        row.gamma = derive_constants(point.params).gamma;
        row.psi.assign(s.u.size(), std::nullopt);
        try {
            const Solved solved = solve_model(point.params, point.dist, point.solver);
            row.status = "analytic";
            for (std::size_t q = 0; q < s.u.size(); ++q) row.psi[q] = solved.solution.Psi(s.u[q]);
            row.C_asym = solved.solution.C_asym();
        } catch (const HypothesisViolated&) {
            row.status = "infeasible";
            if (with_mc) {
                row.status = "mc";
                for (std::size_t q = 0; q < s.u.size(); ++q) {
                    MCConfig cfg = point.mc;
                    cfg.barrier = std::max(cfg.barrier, 2 * s.u[q] + 1);
                    row.psi[q] = estimate_ruin(point.params, point.dist, s.u[q], cfg).p_hat;
                }
            }
        } catch (const NonConvergence&) {
            row.status = "nonconvergence";
        }
        res.rows.push_back(std::move(row));
    }
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
        const double a = res.rows[i - 1].gamma - 1, b = res.rows[i].gamma - 1;
        if ((a > 0) != (b > 0)) res.gamma_one_brackets.emplace_back(res.rows[i - 1].value, res.rows[i].value);
    }
    return res;
}

inline std::string sweep_csv(const RunConfig& rc, const SweepResult& res) {
    std::ostringstream os;
    os << rc.sweep.parameter << ",gamma,status";
    for (double u : rc.sweep.u) os << ",psi_" << format_double(u);
    os << ",C_asym\n";
    auto cell = [](const std::optional<double>& x) { return x ? format_double(*x) : std::string(); };
    for (const auto& r : res.rows) {
        os << format_double(r.value) << ',' << format_double(r.gamma) << ',' << r.status;
        for (const auto& p : r.psi) os << ',' << cell(p);
        os << ',' << cell(r.C_asym) << '\n';
    }
    return os.str();
}

inline int cmd_sweep(const RunConfig& rc, const std::filesystem::path& out, bool with_mc,
                     std::ostream& os = std::cout) {
    detail::require(rc.sweep.steps >= 1, "sweep: steps must be positive");
    const SweepResult res = run_sweep(rc, with_mc);
    std::string brackets = "[";
    for (std::size_t i = 0; i < res.gamma_one_brackets.size(); ++i) {
        brackets += (i ? ", " : "") + detail::number_list_json({res.gamma_one_brackets[i].first,
                                                                res.gamma_one_brackets[i].second});
    }
    brackets += "]";
    JsonObject j;
    j.text("parameter", rc.sweep.parameter).raw("u", detail::number_list_json(rc.sweep.u)).raw("gamma_one_brackets", brackets);
    const std::string csv = sweep_csv(rc, res);
    detail::write_outputs(out, {{"sweep.csv", csv}, {"sweep.json", j.str() + "\n"}});
    os << csv;
    for (const auto& [lo, hi] : res.gamma_one_brackets) {
        os << "gamma crosses 1 between " << rc.sweep.parameter << "=" << format_double(lo) << " and "
           << format_double(hi) << '\n';
    }
    return exit_ok;
}

}  // namespace ruin
