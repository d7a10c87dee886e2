// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "fairoffload/subproblems.hpp"

namespace fairoffload {

const char* to_string(BaselineKind k) {
    switch (k) {
    case BaselineKind::SwmGeneric: return "swm-i";
    case BaselineKind::SwmSequentialFill: return "swm-b";
    case BaselineKind::Oracle: return "oracle";
    }
    return "?";
}

SolveReport swm_solve(const Instance& inst, BaselineKind kind, SolveConfig config) {
    if (kind == BaselineKind::Oracle) throw std::invalid_argument("swm_solve needs an SWM variant");
    config.objective = MasterObjective::Welfare;
    config.policy = kind == BaselineKind::SwmGeneric ? BranchPolicy::Lexicographic : BranchPolicy::SequentialFill;
    SolveReport r = solve(inst, config);
    r.solver = to_string(kind);
    return r;
}

bool lex_smaller(const OffloadDecision& a, const OffloadDecision& b, int num_edge) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        int ca = choice_index(a[i], num_edge), cb = choice_index(b[i], num_edge);
        if (ca != cb) return ca > cb;
    }
    return false;
}

namespace {

struct OracleSearch {
    const Instance& inst;
    const OracleOptions& opt;
    std::vector<CostVectors> profiles;
    std::vector<int> order;  // solver task indices by id
    std::vector<NodeAssignment> nodes;
    std::unordered_map<std::string, bool> memo;
    OffloadDecision x;
    std::optional<OffloadDecision> best;
    double best_value = -std::numeric_limits<double>::infinity();
    int M;

    OracleSearch(const Instance& i, const OracleOptions& o) : inst(i), opt(o), M(i.num_edge()) {}

    std::optional<double> cap_of(int node_id) const {
        if (!opt.backhaul_cap || node_id > M) return std::nullopt;
        return inst.node(node_id).per_task_backhaul_cap.value_or(5.0);
    }

    bool node_ok(const NodeAssignment& a) {
        std::ostringstream key;
        key << a.node_id << 'e';
        auto e = a.edge_set, c = a.cloud_set;
        std::sort(e.begin(), e.end());
        std::sort(c.begin(), c.end());
        for (int id : e) key << id << ',';
        key << 'c';
        for (int id : c) key << id << ',';
        auto [it, fresh] = memo.try_emplace(key.str(), false);
        if (fresh) it->second = solve_sp(a, inst.node(a.node_id), opt.tol, cap_of(a.node_id)).feasible;
        return it->second;
    }

    double value_of(const OffloadDecision& d) const {
        UtilityVector u = utilities(inst, d, profiles);
        return opt.objective == MasterObjective::Welfare ? total_benefit(u) : u.objective;
    }

    void leaf() {
        double v = value_of(x);
        double band = std::isfinite(best_value) ? 1e-9 * (1.0 + std::abs(best_value)) : 0.0;
        if (!best || v > best_value + band || (v >= best_value - band && lex_smaller(x, *best, M))) {
            if (!best || v > best_value + band) best_value = v;
            else best_value = std::max(best_value, v);
            best = x;
        }
    }

    void dfs(std::size_t k) {
        if (k == order.size()) {
            leaf();
            return;
        }
        const auto i = static_cast<std::size_t>(order[k]);
        const CostVectors& cv = profiles[i];
        const int id = inst.tasks[i].id;
        for (int ci = 0; ci < choice_count(M); ++ci) {
            const ChoiceCost& cc = cv.choices[static_cast<std::size_t>(ci)];
            if (!cc.admissible()) continue;
            x[i] = cc.choice;
            if (cc.choice.is_local()) {
                dfs(k + 1);
                continue;
            }
            NodeAssignment& a = nodes[static_cast<std::size_t>(cc.choice.node - 1)];
            auto& set = cc.choice.kind == ChoiceKind::Edge ? a.edge_set : a.cloud_set;
            set.push_back(id);
            a.sizes[id] = *cc.size;
            if (node_ok(a)) dfs(k + 1);
            set.pop_back();
            a.sizes.erase(id);
        }
        x[i] = Choice::local();
    }
};

}  // namespace

SolveReport brute_force(const Instance& inst, const OracleOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    OracleSearch s(inst, opt);
    s.profiles = all_profiles(inst);
    for (std::size_t i = 0; i < inst.tasks.size(); ++i)
        if (is_solver_task(s.profiles[i].category)) s.order.push_back(static_cast<int>(i));
    if (static_cast<int>(s.order.size()) > opt.max_tasks || inst.num_edge() > opt.max_edge)
        throw OracleSizeError("oracle limited to " + std::to_string(opt.max_tasks) + " solver tasks and " +
                              std::to_string(opt.max_edge) + " edge nodes");
    std::sort(s.order.begin(), s.order.end(), [&](int a, int b) {
        return inst.tasks[static_cast<std::size_t>(a)].id < inst.tasks[static_cast<std::size_t>(b)].id;
    });
    s.nodes.resize(inst.nodes.size());
    for (std::size_t j = 0; j < s.nodes.size(); ++j) s.nodes[j].node_id = static_cast<int>(j) + 1;
    s.x.assign(inst.tasks.size(), Choice::local());
    s.dfs(0);

    SolveReport r;
    r.solver = to_string(BaselineKind::Oracle);
    r.iterations = 1;
    if (!s.best) {
        r.status = ReportStatus::Infeasible;
        r.diagnostic = "no decision passes every node subproblem";
        r.decision.assign(inst.tasks.size(), Choice::local());
    } else {
        r.status = ReportStatus::Optimal;
        r.decision = *s.best;
        for (const NodeAssignment& a : partition(r.decision, inst, s.profiles)) {
            SpOutcome sp = solve_sp(a, inst.node(a.node_id), opt.tol, s.cap_of(a.node_id));
            r.per_node_gamma[a.node_id] = sp.gamma;
            r.max_kkt = std::max(r.max_kkt, sp.kkt_residual);
            r.allocation.insert(r.allocation.end(), sp.allocation.begin(), sp.allocation.end());
        }
        r.master_sequence.push_back(s.best_value);
    }
    finalize_report(r, inst, s.profiles);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace fairoffload
