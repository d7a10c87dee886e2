// SPDX-License-Identifier: Apache-2.0
//
// Per-node resource allocation for a fixed offloading decision, with the
// balanced closed form and the single-resource overload test as fast paths.

#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "fairoffload/convexcore.hpp"
#include "fairoffload/energetics.hpp"
#include "fairoffload/model.hpp"

namespace fairoffload {

struct NodeAssignment {
    int node_id = 0;
    std::vector<int> edge_set;   // task ids executed at the node
    std::vector<int> cloud_set;  // task ids forwarded to the cloud through the node
    std::map<int, RelativeSize> sizes;

    bool empty() const { return edge_set.empty() && cloud_set.empty(); }
    std::size_t size() const { return edge_set.size() + cloud_set.size(); }
};

enum class FastPath { None, Balanced, Overload };

const char* to_string(FastPath f);

struct SpOutcome {
    bool feasible = false;
    Allocation allocation;
    double gamma = 0.0;  // largest delay satisfaction rate achieved, or a lower bound when infeasible
    FastPath fast_path = FastPath::None;
    double kkt_residual = 0.0;
};

struct BalancedRatios {
    double up = 0.0, down = 0.0, compute = 0.0, backhaul = 0.0;
    double total() const { return up + down + compute + backhaul; }
    double max_single() const;
};

std::vector<NodeAssignment> partition(const OffloadDecision& x, const Instance& inst,
                                      const std::vector<CostVectors>& profiles);

BalancedRatios balanced_ratios(const NodeAssignment& a, const EdgeNode& node);

// Closed-form allocation when the summed single-resource ratios stay within 1.
std::optional<std::pair<Allocation, double>> fast_feasible(const NodeAssignment& a, const EdgeNode& node);
bool fast_infeasible(const NodeAssignment& a, const EdgeNode& node);

// Delay satisfaction rate of each member under an allocation, in member order (edge then cloud).
std::vector<double> member_betas(const NodeAssignment& a, const Allocation& alloc);

ReciprocalProgram build_reciprocal(const NodeAssignment& a, const EdgeNode& node, std::optional<double> backhaul_cap);

// backhaul_cap, when set, bounds every forwarded task's backhaul rate.
SpOutcome solve_sp(const NodeAssignment& a, const EdgeNode& node, double tol = 1e-7,
                   std::optional<double> backhaul_cap = std::nullopt);

// max_i p_i / q_i >= sum p / sum q for nonnegative p and positive q.
bool ratio_bound_holds(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace fairoffload
