// SPDX-License-Identifier: Apache-2.0
//
// Per-task cost arithmetic: energies, delays, categories, delay budgets and
// the benefit bounds used by task selection.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "fairoffload/model.hpp"

namespace fairoffload {

enum class Category { Cat1, Cat2, Cat3, Cat4 };

const char* to_string(Category c);

// Cat1/Cat2 tasks stay local and never reach the solver.
inline bool is_solver_task(Category c) { return c == Category::Cat3 || c == Category::Cat4; }

enum class Inadmissible {
    None,
    LocalQos,        // local security or deadline fails
    Security,        // target security level above the requirement
    AppSupport,      // edge node does not host the app type
    NoBudget,        // non-positive delay budget
    Unreachable,     // no link profile from the owner to the node
    NoBackhaul,      // CloudVia through the cloud-direct node
    PreLocal,        // offloading choice of a Cat1/Cat2 task
};

const char* to_string(Inadmissible r);

struct LocalCost {
    double energy = 0.0;
    double delay = 0.0;
};

// Demand of one task at one target scaled by its delay budget.
struct RelativeSize {
    Choice target;
    double up = 0.0;      // L^u / budget
    double down = 0.0;    // L^d / budget
    double cycles = 0.0;  // w at an edge, 0 through the cloud
    double via = 0.0;     // (L^u + L^d) / budget through the cloud, else 0

    double compute() const { return up * cycles; }
};

struct ChoiceCost {
    Choice choice;
    Inadmissible reason = Inadmissible::None;
    double energy = 0.0;
    double delta = 0.0;
    double budget = 0.0;       // t^r minus the fixed delay terms
    double fixed_delay = 0.0;  // zeta, plus cloud execution time for CloudVia
    std::optional<RelativeSize> size;

    bool admissible() const { return reason == Inadmissible::None; }
};

struct CostVectors {
    int task_id = 0;
    Category category = Category::Cat1;
    double e_base = 0.0;
    LocalCost local;
    std::vector<ChoiceCost> choices;  // indexed by choice_index
    double delta_max = 0.0;
    double r_min = 0.0;
    double rate = 0.0;

    const ChoiceCost& at(Choice c, int num_edge) const {
        return choices.at(static_cast<std::size_t>(choice_index(c, num_edge)));
    }
    std::vector<Choice> admissible_choices() const;
};

class AbortedTask : public std::runtime_error {
public:
    explicit AbortedTask(int task_id);
    int task_id;
};

class ZeroRate : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Categorization {
    Category category = Category::Cat1;
    double e_base = 0.0;
    bool local_ok = false;
    bool offload_ok = false;
};

LocalCost local_cost(const Task& task, const UserEquipment& ue);
double offload_energy(const Task& task, const LinkProfile& link);

// Achieved delay for a choice under one allocation row. Local ignores alloc.
double delay(const Task& task, Choice choice, const AllocationRow& alloc, const CloudProfile& cloud, double zeta,
             const UserEquipment* ue = nullptr);

// nullopt when the target's delay budget is not positive.
std::optional<RelativeSize> relative_size(const Task& task, Choice target, const CloudProfile& cloud, double zeta);

Categorization categorize(const Task& task, const Instance& inst);
CostVectors benefit_profile(const Task& task, const Instance& inst);

// Profiles for every task in instance order.
std::vector<CostVectors> all_profiles(const Instance& inst);

}  // namespace fairoffload
