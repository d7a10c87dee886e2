// SPDX-License-Identifier: Apache-2.0
//
// Decomposition driver: alternate the branch-and-bound master with the
// per-node allocation subproblems until every node accepts its tasks.

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairoffload/cuts.hpp"
#include "fairoffload/fairness.hpp"
#include "fairoffload/master.hpp"
#include "fairoffload/model.hpp"

namespace fairoffload {

enum class ReportStatus { Optimal, Infeasible, IterationLimit };

const char* to_string(ReportStatus s);

struct SolveConfig {
    MasterObjective objective = MasterObjective::ProportionalFair;
    BranchPolicy policy = BranchPolicy::Balanced;
    Relaxation relaxation = Relaxation::Envelope;
    double tol = 1e-7;
    int max_iter = 0;               // 0 selects 10 * number of solver tasks
    bool backhaul_cap = false;      // enforce each node's per-task backhaul cap
    bool capacity_cuts = true;      // rounded and lifted capacity cuts
    std::ostream* trace = nullptr;  // one line per visited tree node
    std::ostream* cut_log = nullptr;
};

struct SolveReport {
    ReportStatus status = ReportStatus::Infeasible;
    std::string solver = "dbbd";
    OffloadDecision decision;
    Allocation allocation;
    double objective = 0.0;
    UtilityVector utilities;
    std::optional<double> jain;
    std::optional<double> minmax;
    double total_energy = 0.0;
    double avg_delay = 0.0;
    int iterations = 0;
    std::map<CutKind, int> cuts_added;
    int nodes_visited = 0;
    int relaxations = 0;
    double wall_time = 0.0;
    std::map<int, double> per_node_gamma;
    double max_kkt = 0.0;
    std::vector<double> master_sequence;  // master optimum per iteration
    std::string diagnostic;

    // Offloaded task count per node id 1..M+1.
    std::vector<int> offloaded_per_node(const Instance& inst) const;
    std::vector<int> offloaded_per_device(const Instance& inst) const;
};

SolveReport solve(const Instance& inst, const SolveConfig& config = {});

// Fill energy, delay, utility and fairness fields from decision and allocation.
void finalize_report(SolveReport& r, const Instance& inst, const std::vector<CostVectors>& profiles);

std::string to_json(const SolveReport& r, const Instance& inst);

// Capacity, deadline and backhaul-cap violations of an allocation under a
// decision; empty when the allocation is feasible.
std::vector<std::string> check_allocation(const Instance& inst, const OffloadDecision& x, const Allocation& alloc,
                                          double tol = 1e-6, bool backhaul_cap = false);

}  // namespace fairoffload
