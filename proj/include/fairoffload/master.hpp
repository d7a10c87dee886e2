// SPDX-License-Identifier: Apache-2.0
//
// Branch-and-bound master over offloading choices: a decision tree that
// persists across decomposition iterations, depth-first traversal with
// cached relaxation bounds, dynamic task selection and load-balancing
// processor order.

#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "fairoffload/convexcore.hpp"
#include "fairoffload/cuts.hpp"
#include "fairoffload/energetics.hpp"
#include "fairoffload/model.hpp"

namespace fairoffload {

enum class MasterObjective { ProportionalFair, Welfare };

// Envelope replaces each device's log utility by the piecewise-linear
// interpolation through its achievable utility values; Log keeps ln itself.
enum class Relaxation { Envelope, Log };

enum class BranchPolicy { Balanced, Lexicographic, SequentialFill };

struct MasterOptions {
    MasterObjective objective = MasterObjective::ProportionalFair;
    Relaxation relaxation = Relaxation::Envelope;
    BranchPolicy policy = BranchPolicy::Balanced;
    double tol = 1e-7;            // constraint and integrality slack
    double solver_tol = 1e-9;     // interior point stopping threshold
    double prune_tol = 1e-8;      // relative tie band for pruning and incumbent updates
    int envelope_limit = 4096;    // achievable values per device before falling back to ln
    std::ostream* trace = nullptr;
};

// Solver-facing view of an instance: profiles plus the Cat3/Cat4 task list.
struct MasterContext {
    const Instance* inst = nullptr;
    std::vector<CostVectors> profiles;
    std::vector<int> tasks;          // instance indices of solver tasks
    std::vector<int> slot_of_task;   // instance index -> solver slot, -1 for pre-local
    std::vector<int> device_of_slot; // device index per solver slot

    static MasterContext build(const Instance& inst);
    std::size_t size() const { return tasks.size(); }
    const CostVectors& profile(int slot) const { return profiles[static_cast<std::size_t>(tasks[static_cast<std::size_t>(slot)])]; }
    int task_id(int slot) const { return inst->tasks[static_cast<std::size_t>(tasks[static_cast<std::size_t>(slot)])].id; }
};

enum class CacheState { None, Infeasible, Value };

struct TreeNode {
    std::vector<int> fixed;  // per solver slot: choice index, or -1 when free
    TreeNode* parent = nullptr;
    int depth = 0;
    bool branched = false;
    int branch_slot = -1;
    std::vector<std::unique_ptr<TreeNode>> children;
    CacheState cache = CacheState::None;
    double bound = 0.0;
    std::size_t cut_version = 0;
};

// Running loads of the path prefix.
struct NodeLoadState {
    std::vector<double> up, down, compute, via;  // per node id - 1
    std::vector<double> utility;                 // per device index
    std::vector<std::vector<int>> chosen;        // per device index, fixed slots
};

NodeLoadState load_state(const MasterContext& ctx, const std::vector<int>& fixed);

// Candidate slots must be free; returns a solver slot.
int select_task(const MasterContext& ctx, const NodeLoadState& state, const std::vector<int>& candidates);
std::vector<Choice> order_processors(const MasterContext& ctx, const NodeLoadState& state, int slot,
                                     const std::vector<bool>& allowed);

struct RelaxedBound {
    CacheState state = CacheState::Infeasible;
    double bound = 0.0;
    std::vector<int> forced;            // per slot choice index after propagation, -1 if still free
    std::vector<std::vector<bool>> allowed;  // per slot, per choice index
    std::optional<OffloadDecision> integral;  // when the relaxed point rounds to a binary decision
    double integral_value = 0.0;
    double kkt_residual = 0.0;
    SolveStatus solver_status = SolveStatus::Feasible;
};

RelaxedBound relaxed_bound(const MasterContext& ctx, const std::vector<int>& fixed, const CutPool& pool,
                           const MasterOptions& opt);

// Exact master objective of a full decision.
double master_value(const MasterContext& ctx, const OffloadDecision& x, MasterObjective obj);

struct DbbStats {
    int nodes_visited = 0;
    int relaxations = 0;
    double max_kkt = 0.0;
};

struct DbbResult {
    std::optional<OffloadDecision> x;
    double value = 0.0;
    DbbStats stats;
};

DbbResult dbb_solve(const MasterContext& ctx, const CutPool& pool, std::unique_ptr<TreeNode>& tree,
                    const MasterOptions& opt);

}  // namespace fairoffload
