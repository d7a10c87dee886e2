// SPDX-License-Identifier: Apache-2.0

#include "fairoffload/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairoffload {

double log_utility(double weight, double u, double eps) {
    if (weight == 0.0) return 0.0;
    double v = u + eps;
    if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
    return weight * std::log(v);
}

UtilityVector utilities(const Instance& inst, const OffloadDecision& x, const std::vector<CostVectors>& profiles) {
    UtilityVector out;
    for (const auto& d : inst.devices) {
        out.ue_ids.push_back(d.id);
        out.weights.push_back(d.weight);
        out.u.push_back(0.0);
    }
    const int M = inst.num_edge();
    for (std::size_t i = 0; i < inst.tasks.size(); ++i) {
        const auto& t = inst.tasks[i];
        int k = inst.device_index(t.ue_id);
        out.u[static_cast<std::size_t>(k)] += profiles[i].at(x[i], M).delta;
    }
    out.objective = 0.0;
    for (std::size_t k = 0; k < out.u.size(); ++k)
        out.objective += log_utility(out.weights[k], out.u[k], inst.utility_epsilon);
    return out;
}

double total_benefit(const UtilityVector& u) { return std::accumulate(u.u.begin(), u.u.end(), 0.0); }

double jain(const std::vector<double>& u) {
    double s = 0.0, s2 = 0.0;
    for (double v : u) {
        s += v;
        s2 += v * v;
    }
    if (u.empty() || s2 == 0.0) throw UndefinedIndex("Jain index undefined when every utility is zero");
    return s * s / (static_cast<double>(u.size()) * s2);
}

double minmax(const std::vector<double>& u) {
    if (u.empty()) throw UndefinedIndex("min-max ratio undefined on an empty vector");
    auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    if (!(*hi > 0.0)) throw UndefinedIndex("min-max ratio undefined when the largest utility is not positive");
    return *lo / *hi;
}

}  // namespace fairoffload
