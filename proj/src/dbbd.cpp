// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/dbbd.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "fairoffload/subproblems.hpp"

namespace fairoffload {

const char* to_string(ReportStatus s) {
    switch (s) {
    case ReportStatus::Optimal: return "optimal";
    case ReportStatus::Infeasible: return "infeasible";
    case ReportStatus::IterationLimit: return "iteration-limit";
    }
    return "?";
}

std::vector<int> SolveReport::offloaded_per_node(const Instance& inst) const {
    std::vector<int> out(inst.nodes.size(), 0);
    for (Choice c : decision)
        if (!c.is_local()) ++out[static_cast<std::size_t>(c.node - 1)];
    return out;
}

std::vector<int> SolveReport::offloaded_per_device(const Instance& inst) const {
    std::vector<int> out(inst.devices.size(), 0);
    for (std::size_t i = 0; i < decision.size() && i < inst.tasks.size(); ++i)
        if (!decision[i].is_local()) ++out[static_cast<std::size_t>(inst.device_index(inst.tasks[i].ue_id))];
    return out;
}

void finalize_report(SolveReport& r, const Instance& inst, const std::vector<CostVectors>& profiles) {
    const int M = inst.num_edge();
    r.utilities = utilities(inst, r.decision, profiles);
    r.objective = r.utilities.objective;
    try {
        r.jain = jain(r.utilities.u);
    } catch (const UndefinedIndex&) {
        r.jain.reset();
    }
    try {
        r.minmax = minmax(r.utilities.u);
    } catch (const UndefinedIndex&) {
        r.minmax.reset();
    }
    std::map<int, const AllocationRow*> row_of;
    for (const auto& row : r.allocation) row_of[row.task_id] = &row;
    r.total_energy = 0.0;
    double delay_sum = 0.0;
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const Task& t = inst.tasks[i];
        Choice c = r.decision[i];
        r.total_energy += profiles[i].at(c, M).energy;
        if (c.is_local()) {
            delay_sum += delay(t, c, {}, inst.cloud, inst.multi_access_delay, &inst.device(t.ue_id));
        } else if (auto it = row_of.find(t.id); it != row_of.end()) {
            delay_sum += delay(t, c, *it->second, inst.cloud, inst.multi_access_delay);
        }
    }
    r.avg_delay = inst.tasks.empty() ? 0.0 : delay_sum / static_cast<double>(inst.tasks.size());
}

SolveReport solve(const Instance& inst, const SolveConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep;
    MasterContext ctx = MasterContext::build(inst);

    CutPool pool;
    auto resource = resource_cuts(inst, ctx.profiles);
    for (const auto& c : resource) pool.add(c);
    for (auto& c : prefixed_cuts(inst, ctx.profiles)) pool.add(std::move(c));
    if (config.capacity_cuts)
        for (auto& c : rounded_capacity_cuts(resource)) pool.add(std::move(c));
    std::size_t logged = 0;
    auto flush_log = [&] {
        if (config.cut_log) pool.write_audit(*config.cut_log, logged);
        logged = pool.cuts().size();
    };
    flush_log();

    MasterOptions mopt;
    mopt.objective = config.objective;
    mopt.relaxation = config.relaxation;
    mopt.policy = config.policy;
    mopt.tol = config.tol;
    mopt.trace = config.trace;

    const int cap = config.max_iter > 0 ? config.max_iter : std::max(1, 10 * static_cast<int>(ctx.size()));
    std::unique_ptr<TreeNode> tree;
    rep.status = ReportStatus::IterationLimit;
    for (int k = 1; k <= cap; ++k) {
        rep.iterations = k;
        if (config.trace) *config.trace << "iteration=" << k << '\n';
        DbbResult mr = dbb_solve(ctx, pool, tree, mopt);
        rep.nodes_visited += mr.stats.nodes_visited;
        rep.relaxations += mr.stats.relaxations;
        rep.max_kkt = std::max(rep.max_kkt, mr.stats.max_kkt);
        if (!mr.x) {
            rep.status = ReportStatus::Infeasible;
            rep.diagnostic = "master problem has no feasible decision";
            break;
        }
        rep.master_sequence.push_back(mr.value);
        rep.decision = *mr.x;

        bool all_ok = true;
        rep.allocation.clear();
        rep.per_node_gamma.clear();
        for (const NodeAssignment& a : partition(*mr.x, inst, ctx.profiles)) {
            const EdgeNode& node = inst.node(a.node_id);
            std::optional<double> bcap;
            if (config.backhaul_cap && a.node_id <= inst.num_edge()) bcap = node.per_task_backhaul_cap.value_or(5.0);
            SpOutcome sp = solve_sp(a, node, config.tol, bcap);
            rep.per_node_gamma[a.node_id] = sp.gamma;
            rep.max_kkt = std::max(rep.max_kkt, sp.kkt_residual);
            if (sp.feasible) {
                rep.allocation.insert(rep.allocation.end(), sp.allocation.begin(), sp.allocation.end());
                continue;
            }
            all_ok = false;
            pool.add(subproblem_cut(a, k));
            if (config.capacity_cuts) {
                NodeAssignment core = infeasible_core(a, node, config.tol, bcap);
                if (auto cc = core_cut(core, a, k)) pool.add(std::move(*cc));
                if (auto lc = lifted_capacity_cut(core, node, inst, ctx.profiles, k, config.tol, bcap)) pool.add(std::move(*lc));
            }
        }
        flush_log();
        if (all_ok) {
            rep.status = ReportStatus::Optimal;
            break;
        }
    }
    if (rep.status == ReportStatus::IterationLimit) rep.diagnostic = "iteration cap reached before every node accepted its tasks";
    for (CutKind kind : {CutKind::Subproblem, CutKind::Resource, CutKind::Prefixed, CutKind::Capacity})
        rep.cuts_added[kind] = pool.count(kind);
    if (rep.decision.empty()) rep.decision.assign(inst.tasks.size(), Choice::local());
    finalize_report(rep, inst, ctx.profiles);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::vector<std::string> check_allocation(const Instance& inst, const OffloadDecision& x, const Allocation& alloc,
                                          double tol, bool backhaul_cap) {
    std::vector<std::string> out;
    const int M = inst.num_edge();
    std::map<int, const AllocationRow*> row_of;
    for (const auto& row : alloc) row_of[row.task_id] = &row;
    std::vector<std::array<double, 4>> load(inst.nodes.size(), {0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const Task& t = inst.tasks[i];
        Choice c = x[i];
        std::string who = "task " + std::to_string(t.id);
        if (c.is_local()) continue;
        auto it = row_of.find(t.id);
        if (it == row_of.end()) {
            out.push_back(who + ": offloaded without an allocation row");
            continue;
        }
        const AllocationRow& r = *it->second;
        if (r.node_id != c.node) out.push_back(who + ": allocation row at the wrong node");
        auto& l = load[static_cast<std::size_t>(c.node - 1)];
        l[0] += r.up;
        l[1] += r.down;
        l[2] += r.compute;
        l[3] += r.backhaul;
        double d = delay(t, c, r, inst.cloud, inst.multi_access_delay);
        if (!(d <= t.deadline * (1.0 + tol))) out.push_back(who + ": delay exceeds the deadline");
        if (backhaul_cap && c.kind == ChoiceKind::CloudVia && c.node <= M) {
            double cap = inst.node(c.node).per_task_backhaul_cap.value_or(5.0);
            if (r.backhaul > cap * (1.0 + tol)) out.push_back(who + ": backhaul rate above the per-task cap");
        }
    }
    for (const auto& n : inst.nodes) {
        const auto& l = load[static_cast<std::size_t>(n.id - 1)];
        const double caps[4] = {n.uplink, n.downlink, n.compute, n.backhaul};
        const char* names[4] = {"uplink", "downlink", "compute", "backhaul"};
        for (int k = 0; k < 4; ++k)
            if (l[static_cast<std::size_t>(k)] > caps[k] * (1.0 + tol) + tol)
                out.push_back("node " + std::to_string(n.id) + ": " + names[k] + " over capacity");
    }
    return out;
}

std::string to_json(const SolveReport& r, const Instance& inst) {
    using nlohmann::json;
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["solver"] = r.solver;
    j["status"] = to_string(r.status);
    if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
    j["objective"] = num(r.objective);
    j["jain"] = r.jain ? json(*r.jain) : json(nullptr);
    j["minmax"] = r.minmax ? json(*r.minmax) : json(nullptr);
    j["total_energy"] = r.total_energy;
    j["avg_delay"] = r.avg_delay;
    j["iterations"] = r.iterations;
    j["nodes_visited"] = r.nodes_visited;
    j["wall_time"] = r.wall_time;
    j["max_kkt"] = r.max_kkt;
    json cuts = json::object();
    for (auto [k, n] : r.cuts_added) cuts[to_string(k)] = n;
    j["cuts_added"] = cuts;
    json dec = json::array();
    for (std::size_t i = 0; i < r.decision.size(); ++i)
        dec.push_back({{"task", inst.tasks[i].id}, {"choice", to_string(r.decision[i])}});
    j["decision"] = dec;
    json alloc = json::array();
    for (const auto& a : r.allocation)
        alloc.push_back({{"task", a.task_id}, {"node", a.node_id}, {"up", a.up}, {"down", a.down},
                         {"compute", a.compute}, {"backhaul", a.backhaul}});
    j["allocation"] = alloc;
    json util = json::array();
    for (std::size_t k = 0; k < r.utilities.u.size(); ++k)
        util.push_back({{"ue", r.utilities.ue_ids[k]}, {"utility", r.utilities.u[k]}});
    j["utilities"] = util;
    json gam = json::object();
    for (auto [n, g] : r.per_node_gamma) gam[std::to_string(n)] = num(g);
    j["per_node_gamma"] = gam;
    json seq = json::array();
    for (double v : r.master_sequence) seq.push_back(num(v));
    j["master_sequence"] = seq;
    return j.dump(2);
}

}  // namespace fairoffload
