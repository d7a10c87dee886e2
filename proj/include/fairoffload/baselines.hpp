// SPDX-License-Identifier: Apache-2.0
//
// Energy-minimizing comparison solvers and the exhaustive oracle.

#pragma once

#include <stdexcept>

#include "fairoffload/dbbd.hpp"

namespace fairoffload {

enum class BaselineKind { SwmGeneric, SwmSequentialFill, Oracle };

const char* to_string(BaselineKind k);

// Decomposition loop with the welfare master. SwmGeneric resolves ties
// toward the lexicographically smallest indicator vector; SwmSequentialFill
// branches tasks by id and fills nodes in id order.
SolveReport swm_solve(const Instance& inst, BaselineKind kind, SolveConfig config = {});

class OracleSizeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct OracleOptions {
    MasterObjective objective = MasterObjective::ProportionalFair;
    int max_tasks = 8;
    int max_edge = 2;
    double tol = 1e-7;
    bool backhaul_cap = false;
};

SolveReport brute_force(const Instance& inst, const OracleOptions& opt = {});

// Strict order on decisions: true when a's indicator vector is
// lexicographically smaller than b's.
bool lex_smaller(const OffloadDecision& a, const OffloadDecision& b, int num_edge);

}  // namespace fairoffload
