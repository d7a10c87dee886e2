// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairoffload {

const char* to_string(FastPath f) {
    switch (f) {
    case FastPath::None: return "none";
    case FastPath::Balanced: return "balanced";
    case FastPath::Overload: return "overload";
    }
    return "?";
}

double BalancedRatios::max_single() const { return std::max({up, down, compute, backhaul}); }

std::vector<NodeAssignment> partition(const OffloadDecision& x, const Instance& inst,
                                      const std::vector<CostVectors>& profiles) {
    const int M = inst.num_edge();
    std::vector<NodeAssignment> out(static_cast<std::size_t>(M + 1));
    for (int j = 1; j <= M + 1; ++j) out[static_cast<std::size_t>(j - 1)].node_id = j;
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        Choice c = x[i];
        if (c.is_local()) continue;
        NodeAssignment& a = out[static_cast<std::size_t>(c.node - 1)];
        int id = inst.tasks[i].id;
        (c.kind == ChoiceKind::Edge ? a.edge_set : a.cloud_set).push_back(id);
        const auto& size = profiles[i].at(c, M).size;
        if (size) a.sizes[id] = *size;
    }
    return out;
}

BalancedRatios balanced_ratios(const NodeAssignment& a, const EdgeNode& node) {
    BalancedRatios b;
    double up = 0.0, down = 0.0, comp = 0.0, via = 0.0;
    for (int id : a.edge_set) {
        const RelativeSize& s = a.sizes.at(id);
        up += s.up;
        down += s.down;
        comp += s.compute();
    }
    for (int id : a.cloud_set) {
        const RelativeSize& s = a.sizes.at(id);
        up += s.up;
        down += s.down;
        via += s.via;
    }
    auto ratio = [](double num, double cap) {
        if (num == 0.0) return 0.0;
        return cap > 0.0 ? num / cap : std::numeric_limits<double>::infinity();
    };
    b.up = ratio(up, node.uplink);
    b.down = ratio(down, node.downlink);
    b.compute = ratio(comp, node.compute);
    b.backhaul = ratio(via, node.backhaul);
    return b;
}

std::optional<std::pair<Allocation, double>> fast_feasible(const NodeAssignment& a, const EdgeNode& node) {
    BalancedRatios b = balanced_ratios(a, node);
    double total = b.total();
    if (!(total <= 1.0)) return std::nullopt;
    Allocation alloc;
    auto share = [](double size, double ratio) { return size > 0.0 ? size / ratio : 0.0; };
    for (int id : a.edge_set) {
        const RelativeSize& s = a.sizes.at(id);
        alloc.push_back({id, a.node_id, share(s.up, b.up), share(s.down, b.down), share(s.compute(), b.compute), 0.0});
    }
    for (int id : a.cloud_set) {
        const RelativeSize& s = a.sizes.at(id);
        alloc.push_back({id, a.node_id, share(s.up, b.up), share(s.down, b.down), 0.0, share(s.via, b.backhaul)});
    }
    return std::make_pair(std::move(alloc), total);
}

bool fast_infeasible(const NodeAssignment& a, const EdgeNode& node) { return balanced_ratios(a, node).max_single() > 1.0; }

std::vector<double> member_betas(const NodeAssignment& a, const Allocation& alloc) {
    std::vector<double> out;
    auto term = [](double num, double rate) {
        if (num == 0.0) return 0.0;
        return rate > 0.0 ? num / rate : std::numeric_limits<double>::infinity();
    };
    for (const auto& row : alloc) {
        const RelativeSize& s = a.sizes.at(row.task_id);
        bool edge = std::find(a.edge_set.begin(), a.edge_set.end(), row.task_id) != a.edge_set.end();
        double beta = term(s.up, row.up) + term(s.down, row.down);
        beta += edge ? term(s.compute(), row.compute) : term(s.via, row.backhaul);
        out.push_back(beta);
    }
    return out;
}

ReciprocalProgram build_reciprocal(const NodeAssignment& a, const EdgeNode& node, std::optional<double> backhaul_cap) {
    ReciprocalProgram p;
    p.capacity = {node.uplink, node.downlink, node.compute, node.backhaul};
    int g = 0;
    for (int id : a.edge_set) {
        const RelativeSize& s = a.sizes.at(id);
        p.terms.push_back({g, 0, s.up, std::nullopt});
        p.terms.push_back({g, 1, s.down, std::nullopt});
        p.terms.push_back({g, 2, s.compute(), std::nullopt});
        ++g;
    }
    for (int id : a.cloud_set) {
        const RelativeSize& s = a.sizes.at(id);
        p.terms.push_back({g, 0, s.up, std::nullopt});
        p.terms.push_back({g, 1, s.down, std::nullopt});
        p.terms.push_back({g, 3, s.via, backhaul_cap});
        ++g;
    }
    p.num_groups = g;
    return p;
}

SpOutcome solve_sp(const NodeAssignment& a, const EdgeNode& node, double tol, std::optional<double> backhaul_cap) {
    SpOutcome out;
    if (a.empty()) {
        out.feasible = true;
        return out;
    }
    if (fast_infeasible(a, node)) {
        out.fast_path = FastPath::Overload;
        out.gamma = balanced_ratios(a, node).max_single();
        return out;
    }
    if (auto ff = fast_feasible(a, node)) {
        bool cap_ok = true;
        if (backhaul_cap)
            for (const auto& row : ff->first) cap_ok = cap_ok && row.backhaul <= *backhaul_cap;
        if (cap_ok) {
            out.feasible = true;
            out.fast_path = FastPath::Balanced;
            out.allocation = std::move(ff->first);
            auto betas = member_betas(a, out.allocation);
            out.gamma = *std::max_element(betas.begin(), betas.end());
            return out;
        }
    }
    ReciprocalProgram p = build_reciprocal(a, node, backhaul_cap);
    ReciprocalResult r = solve_reciprocal(p, std::min(tol, 1e-9));
    if (p.has_upper_bounds() && r.gamma > 1.0 - tol && r.gamma <= 1.0 + tol)
        r = solve_reciprocal_barrier(p, std::min(tol, 1e-9) * 1e-3);
    out.gamma = r.gamma;
    out.kkt_residual = r.kkt_residual;
    if (!(r.gamma <= 1.0 + tol)) {
        out.gamma = std::max(r.gamma, r.lower_bound);
        return out;
    }
    out.feasible = true;
    std::size_t t = 0;
    for (int id : a.edge_set) {
        out.allocation.push_back({id, a.node_id, r.r[t], r.r[t + 1], r.r[t + 2], 0.0});
        t += 3;
    }
    for (int id : a.cloud_set) {
        out.allocation.push_back({id, a.node_id, r.r[t], r.r[t + 1], 0.0, r.r[t + 2]});
        t += 3;
    }
    return out;
}

bool ratio_bound_holds(const std::vector<double>& p, const std::vector<double>& q) {
    double sp = std::accumulate(p.begin(), p.end(), 0.0);
    double sq = std::accumulate(q.begin(), q.end(), 0.0);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.size(); ++i) best = std::max(best, p[i] / q[i]);
    double avg = sp / sq;
    return best >= avg - 1e-12 * std::max(1.0, std::abs(avg));
}

}  // namespace fairoffload
