// SPDX-License-Identifier: Apache-2.0
//
// Command line front end: solve an instance file, run a scenario sweep, or
// run the convexity and fast-path checks.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairoffload/baselines.hpp"
#include "fairoffload/bench.hpp"
#include "fairoffload/convexcore.hpp"
#include "fairoffload/dbbd.hpp"
#include "fairoffload/subproblems.hpp"

namespace fo = fairoffload;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 2;
constexpr int kDiagnostic = 3;
constexpr int kUsage = 4;

int run_solve(const std::string& path, const std::string& solver, double tol, int max_iter, bool cap,
              const std::string& report_path, const std::string& trace_path) {
    fo::Instance inst;
    try {
        inst = fo::load_instance_file(path);
    } catch (const fo::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kUsage;
    }
    auto id = fo::parse_solver(solver);
    if (!id) {
        std::cerr << "unknown solver: " << solver << '\n';
        return kUsage;
    }
    std::ofstream trace;
    fo::SolveConfig cfg;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.backhaul_cap = cap;
    if (!trace_path.empty()) {
        trace.open(trace_path);
        cfg.trace = &trace;
        cfg.cut_log = &trace;
    }
    fo::SolveReport r;
    try {
        r = fo::run_solver(inst, *id, cfg);
    } catch (const fo::AbortedTask& e) {
        std::cerr << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kDiagnostic;
    }
    std::string json = fo::to_json(r, inst);
    if (report_path.empty()) {
        std::cout << json << '\n';
    } else {
        std::ofstream(report_path) << json << '\n';
        std::cout << fo::csv_header() << '\n' << fo::csv_row(0, r, inst) << '\n';
    }
    switch (r.status) {
    case fo::ReportStatus::Optimal: return kOk;
    case fo::ReportStatus::Infeasible: return kInfeasible;
    case fo::ReportStatus::IterationLimit: return kDiagnostic;
    }
    return kDiagnostic;
}

int run_scenario(int id, std::uint64_t seed, const std::string& solvers, const std::string& out) {
    std::vector<fo::SolverId> ids;
    std::stringstream ss(solvers);
    for (std::string s; std::getline(ss, s, ',');) {
        auto sid = fo::parse_solver(s);
        if (!sid) {
            std::cerr << "unknown solver: " << s << '\n';
            return kUsage;
        }
        ids.push_back(*sid);
    }
    fo::ScenarioSpec spec;
    spec.id = id;
    spec.seed = seed;
    std::string csv = fo::run_matrix(spec, ids);
    if (out.empty()) std::cout << csv;
    else std::ofstream(out) << csv;
    return kOk;
}

// Random node assignment with edge and cloud members for the fast-path checks.
fo::NodeAssignment random_assignment(std::mt19937_64& rng, fo::EdgeNode& node) {
    std::uniform_real_distribution<double> U(0.05, 1.0);
    std::uniform_int_distribution<int> count(1, 6);
    node = {};
    node.id = 1;
    node.uplink = 1.0 + 9.0 * U(rng);
    node.downlink = 1.0 + 9.0 * U(rng);
    node.compute = 1.0 + 9.0 * U(rng);
    node.backhaul = 1.0 + 9.0 * U(rng);
    fo::NodeAssignment a;
    a.node_id = 1;
    int n = count(rng);
    for (int t = 1; t <= n; ++t) {
        fo::RelativeSize s;
        s.up = U(rng);
        s.down = U(rng);
        if (t % 3 == 0) {
            s.target = fo::Choice::via(1);
            s.via = s.up + s.down;
            a.cloud_set.push_back(t);
        } else {
            s.target = fo::Choice::edge(1);
            s.cycles = U(rng);
            a.edge_set.push_back(t);
        }
        a.sizes[t] = s;
    }
    return a;
}

int run_verify(int samples, std::uint64_t seed) {
    bool ok = true;
    fo::HessianReport h = fo::verify_hessian_psd(samples, seed);
    bool hess_ok = h.violations.empty() && h.min_form >= -1e-8;
    std::cout << (hess_ok ? "PASS" : "FAIL") << " hessian samples=" << h.samples << " min_form=" << h.min_form
              << " fd_error=" << h.max_abs_error << '\n';
    ok = ok && hess_ok;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> len(1, 12);
    int ratio_fail = 0;
    for (int s = 0; s < samples; ++s) {
        int n = len(rng);
        std::vector<double> p(static_cast<std::size_t>(n)), q(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(i)] = U(rng);
            q[static_cast<std::size_t>(i)] = 0.01 + U(rng);
        }
        ratio_fail += !fo::ratio_bound_holds(p, q);
    }
    std::cout << (ratio_fail == 0 ? "PASS" : "FAIL") << " ratio-bound samples=" << samples << " failures=" << ratio_fail
              << '\n';
    ok = ok && ratio_fail == 0;

    int fast_fail = 0, overload = 0, balanced = 0;
    for (int s = 0; s < samples; ++s) {
        fo::EdgeNode node;
        fo::NodeAssignment a = random_assignment(rng, node);
        auto exact = fo::solve_reciprocal(fo::build_reciprocal(a, node, std::nullopt));
        if (fo::fast_infeasible(a, node)) {
            ++overload;
            fast_fail += !(exact.gamma > 1.0 - 1e-6);
        }
        if (auto ff = fo::fast_feasible(a, node)) {
            ++balanced;
            fast_fail += !(exact.gamma <= ff->second + 1e-6);
        }
    }
    std::cout << (fast_fail == 0 ? "PASS" : "FAIL") << " fast-paths samples=" << samples << " overload=" << overload
              << " balanced=" << balanced << " failures=" << fast_fail << '\n';
    ok = ok && fast_fail == 0;
    return ok ? kOk : kDiagnostic;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energy-fair task offloading solver"};
    app.require_subcommand(1);

    auto* solve = app.add_subcommand("solve", "solve an instance file");
    std::string path, solver = "dbbd", report, trace;
    double tol = 1e-7;
    int max_iter = 0;
    bool cap = false;
    solve->add_option("instance", path, "instance JSON file")->required();
    solve->add_option("--solver", solver, "dbbd | swm-i | swm-b | oracle")->capture_default_str();
    solve->add_option("--tol", tol, "feasibility tolerance")->capture_default_str();
    solve->add_option("--max-iter", max_iter, "iteration cap, 0 for 10 per solver task");
    solve->add_flag("--backhaul-cap", cap, "enforce per-task backhaul caps");
    solve->add_option("--report", report, "write the JSON report here");
    solve->add_option("--trace", trace, "write the tree trace and cut audit here");

    auto* scen = app.add_subcommand("scenario", "run a scenario sweep to CSV");
    int scenario = 1;
    std::uint64_t seed = 1;
    std::string solvers = "dbbd,swm-i,swm-b", out;
    scen->add_option("id", scenario, "scenario 1..4")->required()->check(CLI::Range(1, 4));
    scen->add_option("--seed", seed)->capture_default_str();
    scen->add_option("--solvers", solvers, "comma separated solver list")->capture_default_str();
    scen->add_option("--out", out, "CSV output path");

    auto* verify = app.add_subcommand("verify", "convexity and fast-path checks");
    int samples = 10000;
    std::uint64_t vseed = 7;
    verify->add_option("--samples", samples)->capture_default_str();
    verify->add_option("--seed", vseed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    try {
        if (*solve) return run_solve(path, solver, tol, max_iter, cap, report, trace);
        if (*scen) return run_scenario(scenario, seed, solvers, out);
        if (*verify) return run_verify(samples, vseed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDiagnostic;
    }
    return kUsage;
}
