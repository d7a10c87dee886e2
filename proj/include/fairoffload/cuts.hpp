// SPDX-License-Identifier: Apache-2.0
//
// Linear cuts over offloading indicators and the append-only pool that
// holds them across decomposition iterations.

#pragma once

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fairoffload/energetics.hpp"
#include "fairoffload/model.hpp"
#include "fairoffload/subproblems.hpp"

namespace fairoffload {

// Capacity cuts bound how many tasks of a dominating family fit at a node.
enum class CutKind { Subproblem, Resource, Prefixed, Capacity };
enum class Resource { Up, Down, Compute, Backhaul };

const char* to_string(CutKind k);
const char* to_string(Resource r);

struct CutTerm {
    int task_id = 0;
    Choice choice;
    double coeff = 0.0;
};

// sum coeff * x[task_id == choice] <= rhs
struct BendersCut {
    CutKind kind = CutKind::Subproblem;
    int node = 0;
    Resource resource = Resource::Up;
    std::vector<CutTerm> terms;
    double rhs = 0.0;
    int origin_iteration = 0;

    std::string key() const;
};

BendersCut subproblem_cut(const NodeAssignment& a, int iteration);
std::vector<BendersCut> resource_cuts(const Instance& inst, const std::vector<CostVectors>& profiles);
// Pins inadmissible indicators of solver tasks, plus offloading choices of
// locally admissible tasks whose benefit is negative.
std::vector<BendersCut> prefixed_cuts(const Instance& inst, const std::vector<CostVectors>& profiles);
// Integer rounding of each resource cut: at most floor(1 / smallest coefficient) of its indicators.
std::vector<BendersCut> rounded_capacity_cuts(const std::vector<BendersCut>& resource);
// After a single-mode failure at a node: every admissible task at least as
// large as the failed set's componentwise minimum counts against the number
// of copies of that minimum the node can host.
std::optional<BendersCut> lifted_capacity_cut(const NodeAssignment& failed, const EdgeNode& node, const Instance& inst,
                                              const std::vector<CostVectors>& profiles, int iteration, double tol,
                                              std::optional<double> backhaul_cap);

// Deletion filter: drops members of an infeasible assignment while the rest
// stays infeasible, leaving a set whose every strict subset is feasible.
NodeAssignment infeasible_core(const NodeAssignment& failed, const EdgeNode& node, double tol,
                               std::optional<double> backhaul_cap);
// No-good over an infeasible core, filed as a capacity cut; nullopt when the
// core is the whole failed set, which the subproblem cut already covers.
std::optional<BendersCut> core_cut(const NodeAssignment& core, const NodeAssignment& failed, int iteration);

double lhs(const BendersCut& cut, const Instance& inst, const OffloadDecision& x);
bool eval(const BendersCut& cut, const Instance& inst, const OffloadDecision& x, double tol = 1e-9);

class CutPool {
public:
    bool add(BendersCut cut);
    const std::vector<BendersCut>& cuts() const { return cuts_; }
    std::size_t version() const { return cuts_.size(); }
    int count(CutKind k) const;
    bool satisfied(const Instance& inst, const OffloadDecision& x, double tol = 1e-9) const;
    void write_audit(std::ostream& os, std::size_t from = 0) const;

private:
    std::vector<BendersCut> cuts_;
    std::set<std::string> keys_;
};

std::string audit_line(const BendersCut& cut);

}  // namespace fairoffload
