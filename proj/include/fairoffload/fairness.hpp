// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "fairoffload/energetics.hpp"
#include "fairoffload/model.hpp"

namespace fairoffload {

struct UtilityVector {
    std::vector<int> ue_ids;      // instance device order
    std::vector<double> u;        // joules
    std::vector<double> weights;  // rho
    double objective = 0.0;
};

class UndefinedIndex : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Weighted log utility with a guard; values at or below zero give -inf.
double log_utility(double weight, double u, double eps);

UtilityVector utilities(const Instance& inst, const OffloadDecision& x, const std::vector<CostVectors>& profiles);

// Linear utility sum, the welfare objective of the energy baselines.
double total_benefit(const UtilityVector& u);

double jain(const std::vector<double>& u);
double minmax(const std::vector<double>& u);

}  // namespace fairoffload
