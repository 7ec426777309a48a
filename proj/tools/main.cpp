// ruin: survival and ruin probabilities for the annuity model with risky investment.
//
//   ruin solve    --config cfg.json --out DIR
//   ruin verify   --config cfg.json [--out DIR]
//   ruin simulate --config cfg.json --out DIR [--paths N] [--horizon T] [--seed S]
//   ruin sweep    --config cfg.json --out DIR --param kappa --from 0.1 --to 1 --steps 10

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ruin/commands.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
    std::optional<double> safety, tol, horizon, dt, barrier;
    std::optional<std::int64_t> paths;
    std::optional<int> threads, tail_nodes, volterra_nodes;
    std::vector<double> u;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config, "JSON configuration file")->required();
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Monte-Carlo seed");
    cmd->add_option("--u0-safety", o.safety, "u0 = safety * mu * E[xi]");
    cmd->add_option("--tol", o.tol, "fixed-point tolerance");
    cmd->add_option("--paths", o.paths, "Monte-Carlo paths");
    cmd->add_option("--horizon", o.horizon, "Monte-Carlo horizon T");
    cmd->add_option("--dt", o.dt, "Monte-Carlo maximal substep");
    cmd->add_option("--barrier", o.barrier, "Monte-Carlo survival barrier B");
    cmd->add_option("--threads", o.threads, "Monte-Carlo worker threads (0: all cores)");
    cmd->add_option("--u", o.u, "initial capitals for simulate/sweep");
    cmd->add_option("--tail-nodes", o.tail_nodes, "tail grid intervals");
    cmd->add_option("--volterra-nodes", o.volterra_nodes, "Volterra grid intervals");
}

ruin::RunConfig load(const Overrides& o) {
    ruin::RunConfig rc = ruin::load_config(o.config);
    if (o.seed) rc.mc.seed = *o.seed;
    if (o.safety) rc.solver.safety = *o.safety;
    if (o.tol) rc.solver.tol = *o.tol;
    if (o.paths) rc.mc.n_paths = *o.paths;
    if (o.horizon) rc.mc.horizon = *o.horizon;
    if (o.dt) rc.mc.dt = *o.dt;
    if (o.barrier) rc.mc.barrier = *o.barrier;
    if (o.threads) rc.mc.threads = *o.threads;
    if (o.tail_nodes) rc.solver.tail_nodes = *o.tail_nodes;
    if (o.volterra_nodes) rc.solver.volterra_nodes = *o.volterra_nodes;
    if (!o.u.empty()) {
        rc.mc_u = o.u;
        rc.sweep.u = o.u;
    }
    ruin::validate(rc);
    return rc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Survival and ruin probabilities for the annuity model with risky investment"};
    app.require_subcommand(1);

    Overrides o;
    auto* solve = app.add_subcommand("solve", "solve for Phi and Psi; writes table.csv, summary.json, report.txt");
    auto* verify = app.add_subcommand("verify", "run the self-checks and print a pass/fail table");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo ruin frequencies; writes simulate.json");
    auto* sweep = app.add_subcommand("sweep", "re-solve over a parameter range; writes sweep.csv, sweep.json");
    for (auto* c : {solve, verify, simulate, sweep}) add_common(c, o);

    bool paths_csv = false;
    simulate->add_flag("--paths-csv", paths_csv, "also write per-path outcomes");

    std::optional<std::string> param;
    std::optional<double> from, to;
    std::optional<int> steps;
    bool with_mc = false;
    sweep->add_option("--param", param, "a, r, sigma, kappa, c or lambda");
    sweep->add_option("--from", from, "first value");
    sweep->add_option("--to", to, "last value");
    sweep->add_option("--steps", steps, "number of points");
    sweep->add_flag("--mc", with_mc, "attach Monte-Carlo estimates where gamma <= 1");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ruin::exit_validation;
    }

    return ruin::run_guarded([&] {
        ruin::RunConfig rc = load(o);
        if (solve->parsed()) return ruin::cmd_solve(rc, o.out);
        if (verify->parsed()) {
            std::optional<std::filesystem::path> out;
            if (verify->count("--out")) out = o.out;
            return ruin::cmd_verify(rc, out);
        }
        if (simulate->parsed()) return ruin::cmd_simulate(rc, o.out, paths_csv);
        if (param) rc.sweep.parameter = *param;
        if (from) rc.sweep.from = *from;
        if (to) rc.sweep.to = *to;
        if (steps) rc.sweep.steps = *steps;
        return ruin::cmd_sweep(rc, o.out, with_mc);
    });
}
