// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/cuts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace fairoffload {

const char* to_string(CutKind k) {
    switch (k) {
    case CutKind::Subproblem: return "subproblem";
    case CutKind::Resource: return "resource";
    case CutKind::Prefixed: return "prefixed";
    case CutKind::Capacity: return "capacity";
    }
    return "?";
}

const char* to_string(Resource r) {
    switch (r) {
    case Resource::Up: return "u";
    case Resource::Down: return "d";
    case Resource::Compute: return "f";
    case Resource::Backhaul: return "b";
    }
    return "?";
}

std::string BendersCut::key() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(kind) << '|';
    for (const auto& t : terms) os << t.task_id << ':' << to_string(t.choice) << '*' << t.coeff << ',';
    os << '|' << rhs;
    return os.str();
}

std::string audit_line(const BendersCut& cut) {
    std::ostringstream os;
    os.precision(10);
    os << "kind=" << to_string(cut.kind);
    if (cut.kind == CutKind::Resource) os << '(' << cut.node << ',' << to_string(cut.resource) << ')';
    else if (cut.kind == CutKind::Subproblem || cut.kind == CutKind::Capacity) os << '(' << cut.node << ')';
    os << " terms=";
    for (std::size_t i = 0; i < cut.terms.size(); ++i) {
        const auto& t = cut.terms[i];
        os << (i ? " + " : "") << t.coeff << "*x[" << t.task_id << ',' << to_string(t.choice) << ']';
    }
    os << " rhs=" << cut.rhs << " iteration=" << cut.origin_iteration;
    return os.str();
}

BendersCut subproblem_cut(const NodeAssignment& a, int iteration) {
    if (a.empty()) throw std::invalid_argument("no cut from an empty assignment");
    BendersCut c;
    c.kind = CutKind::Subproblem;
    c.node = a.node_id;
    c.origin_iteration = iteration;
    for (int id : a.edge_set) c.terms.push_back({id, Choice::edge(a.node_id), 1.0});
    for (int id : a.cloud_set) c.terms.push_back({id, Choice::via(a.node_id), 1.0});
    std::sort(c.terms.begin(), c.terms.end(),
              [](const CutTerm& x, const CutTerm& y) { return std::tie(x.task_id, x.choice) < std::tie(y.task_id, y.choice); });
    c.rhs = static_cast<double>(a.size()) - 1.0;
    return c;
}

std::vector<BendersCut> resource_cuts(const Instance& inst, const std::vector<CostVectors>& profiles) {
    const int M = inst.num_edge();
    std::vector<BendersCut> out;
    for (int j = 1; j <= M + 1; ++j) {
        const EdgeNode& node = inst.node(j);
        for (Resource res : {Resource::Up, Resource::Down, Resource::Compute, Resource::Backhaul}) {
            if (res == Resource::Backhaul && j == M + 1) continue;
            BendersCut c;
            c.kind = CutKind::Resource;
            c.node = j;
            c.resource = res;
            c.rhs = 1.0;
            for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
                const CostVectors& cv = profiles[i];
                if (!is_solver_task(cv.category)) continue;
                for (Choice ch : {Choice::edge(j), Choice::via(j)}) {
                    const ChoiceCost& cc = cv.at(ch, M);
                    if (!cc.admissible() || !cc.size) continue;
                    const RelativeSize& s = *cc.size;
                    double coeff = 0.0;
                    switch (res) {
                    case Resource::Up: coeff = s.up / node.uplink; break;
                    case Resource::Down: coeff = s.down / node.downlink; break;
                    case Resource::Compute: coeff = ch.kind == ChoiceKind::Edge ? s.compute() / node.compute : 0.0; break;
                    case Resource::Backhaul:
                        coeff = ch.kind == ChoiceKind::CloudVia && node.backhaul > 0.0 ? s.via / node.backhaul : 0.0;
                        break;
                    }
                    if (coeff > 0.0) c.terms.push_back({inst.tasks[i].id, ch, coeff});
                }
            }
            if (!c.terms.empty()) out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<BendersCut> prefixed_cuts(const Instance& inst, const std::vector<CostVectors>& profiles) {
    std::vector<BendersCut> out;
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const CostVectors& cv = profiles[i];
        if (!is_solver_task(cv.category)) continue;
        for (const ChoiceCost& cc : cv.choices) {
            bool dominated = cv.category == Category::Cat3 && !cc.choice.is_local() && cc.admissible() && cc.delta < 0.0;
            if (cc.admissible() && !dominated) continue;
            BendersCut c;
            c.kind = CutKind::Prefixed;
            c.node = cc.choice.node;
            c.terms.push_back({inst.tasks[i].id, cc.choice, 1.0});
            c.rhs = 0.0;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<BendersCut> rounded_capacity_cuts(const std::vector<BendersCut>& resource) {
    std::vector<BendersCut> out;
    for (const auto& r : resource) {
        if (r.kind != CutKind::Resource || r.terms.empty()) continue;
        double amin = std::numeric_limits<double>::infinity();
        for (const auto& t : r.terms) amin = std::min(amin, t.coeff);
        if (!(amin > 0.0)) continue;
        double k = std::floor(r.rhs / amin * (1.0 + 1e-12));
        if (k >= static_cast<double>(r.terms.size())) continue;
        BendersCut c;
        c.kind = CutKind::Capacity;
        c.node = r.node;
        c.resource = r.resource;
        c.rhs = k;
        c.origin_iteration = r.origin_iteration;
        for (const auto& t : r.terms) c.terms.push_back({t.task_id, t.choice, 1.0});
        out.push_back(std::move(c));
    }
    return out;
}

std::optional<BendersCut> lifted_capacity_cut(const NodeAssignment& failed, const EdgeNode& node, const Instance& inst,
                                              const std::vector<CostVectors>& profiles, int iteration, double tol,
                                              std::optional<double> backhaul_cap) {
    const bool edge = failed.cloud_set.empty();
    if (failed.empty() || (!edge && !failed.edge_set.empty())) return std::nullopt;
    const int M = inst.num_edge();
    const Choice target = edge ? Choice::edge(failed.node_id) : Choice::via(failed.node_id);

    RelativeSize v;
    v.target = target;
    v.up = v.down = v.cycles = v.via = std::numeric_limits<double>::infinity();
    for (int id : edge ? failed.edge_set : failed.cloud_set) {
        const RelativeSize& s = failed.sizes.at(id);
        v.up = std::min(v.up, s.up);
        v.down = std::min(v.down, s.down);
        v.via = std::min(v.via, s.via);
    }
    // Compute demand is up * cycles; dominate it through the product.
    double v_compute = std::numeric_limits<double>::infinity();
    for (int id : edge ? failed.edge_set : failed.cloud_set) v_compute = std::min(v_compute, failed.sizes.at(id).compute());
    v.cycles = edge && v.up > 0.0 ? v_compute / v.up : 0.0;

    auto dominates = [&](const RelativeSize& s) {
        const double slack = 1.0;
        return s.up >= v.up * slack && s.down >= v.down * slack && s.via >= v.via * slack &&
               s.compute() >= v.compute() * slack;
    };
    BendersCut c;
    c.kind = CutKind::Capacity;
    c.node = failed.node_id;
    c.origin_iteration = iteration;
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const CostVectors& cv = profiles[i];
        if (!is_solver_task(cv.category)) continue;
        const ChoiceCost& cc = cv.at(target, M);
        if (!cc.admissible() || !cc.size || !dominates(*cc.size)) continue;
        c.terms.push_back({inst.tasks[i].id, target, 1.0});
    }

    // Largest number of copies of v the node can host.
    auto copies_fit = [&](int k) {
        NodeAssignment a;
        a.node_id = failed.node_id;
        for (int t = 0; t < k; ++t) {
            (edge ? a.edge_set : a.cloud_set).push_back(t);
            a.sizes[t] = v;
        }
        return solve_sp(a, node, tol, edge ? std::nullopt : backhaul_cap).feasible;
    };
    int kmax = 0;
    const int cap = static_cast<int>(c.terms.size());
    while (kmax < cap && copies_fit(kmax + 1)) ++kmax;
    if (kmax >= cap) return std::nullopt;
    c.rhs = kmax;
    return c;
}

NodeAssignment infeasible_core(const NodeAssignment& failed, const EdgeNode& node, double tol,
                               std::optional<double> backhaul_cap) {
    NodeAssignment core = failed;
    auto drop = [&](std::vector<int>& set) {
        for (std::size_t k = 0; k < set.size();) {
            if (core.size() == 1) return;
            const int id = set[k];
            set.erase(set.begin() + static_cast<std::ptrdiff_t>(k));
            if (!solve_sp(core, node, tol, backhaul_cap).feasible) continue;
            set.insert(set.begin() + static_cast<std::ptrdiff_t>(k), id);
            ++k;
        }
    };
    drop(core.edge_set);
    drop(core.cloud_set);
    std::map<int, RelativeSize> kept;
    for (int id : core.edge_set) kept[id] = core.sizes.at(id);
    for (int id : core.cloud_set) kept[id] = core.sizes.at(id);
    core.sizes = std::move(kept);
    return core;
}

std::optional<BendersCut> core_cut(const NodeAssignment& core, const NodeAssignment& failed, int iteration) {
    if (core.size() >= failed.size()) return std::nullopt;
    BendersCut c = subproblem_cut(core, iteration);
    c.kind = CutKind::Capacity;
    return c;
}

double lhs(const BendersCut& cut, const Instance& inst, const OffloadDecision& x) {
    double s = 0.0;
    for (const auto& t : cut.terms) {
        int i = inst.task_index(t.task_id);
        if (i >= 0 && x[static_cast<std::size_t>(i)] == t.choice) s += t.coeff;
    }
    return s;
}

bool eval(const BendersCut& cut, const Instance& inst, const OffloadDecision& x, double tol) {
    return lhs(cut, inst, x) <= cut.rhs + tol;
}

bool CutPool::add(BendersCut cut) {
    if (!keys_.insert(cut.key()).second) return false;
    cuts_.push_back(std::move(cut));
    return true;
}

int CutPool::count(CutKind k) const {
    return static_cast<int>(std::count_if(cuts_.begin(), cuts_.end(), [k](const BendersCut& c) { return c.kind == k; }));
}

bool CutPool::satisfied(const Instance& inst, const OffloadDecision& x, double tol) const {
    return std::all_of(cuts_.begin(), cuts_.end(), [&](const BendersCut& c) { return eval(c, inst, x, tol); });
}

void CutPool::write_audit(std::ostream& os, std::size_t from) const {
    for (std::size_t i = from; i < cuts_.size(); ++i) os << audit_line(cuts_[i]) << '\n';
}

}  // namespace fairoffload
