// SPDX-License-Identifier: Apache-2.0
//
// Small dense convex solvers: a primal-dual interior point method for a
// concave log-sum objective over a box-bounded polytope, and solvers for
// the min-max reciprocal allocation program.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fairoffload {

using SparseRow = std::vector<std::pair<int, double>>;

struct LogTerm {
    double weight = 1.0;
    SparseRow coeffs;
    double offset = 0.0;
    double eps = 0.0;
};

struct LinearRow {
    SparseRow coeffs;
    double rhs = 0.0;
};

// maximize  sum_k weight_k * ln(c_k.x + offset_k + eps_k) + linear.x
// s.t.      equalities, inequalities (<=), lower <= x <= upper.
// A variable with lower == upper is fixed and substituted out.
struct PolytopeLogProgram {
    int num_vars = 0;
    std::vector<LogTerm> terms;
    std::vector<double> linear;
    std::vector<LinearRow> equalities;
    std::vector<LinearRow> inequalities;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> start;  // optional hint, used when strictly inside the box

    double objective(const std::vector<double>& x) const;
};

enum class SolveStatus { Feasible, Infeasible, IterationLimit };

const char* to_string(SolveStatus s);

struct LogPolytopeResult {
    SolveStatus status = SolveStatus::Infeasible;
    double value = 0.0;  // objective at the returned point
    double bound = 0.0;  // certified upper bound on the optimum
    std::vector<double> x;
    double kkt_residual = 0.0;
    int iterations = 0;
};

struct IpmOptions {
    double tol = 1e-7;
    int max_iter = 10000;
};

LogPolytopeResult maximize_log_polytope(const PolytopeLogProgram& p, const IpmOptions& opt = {});

// One reciprocal term numerator / r, with r its own variable.
struct ReciprocalTerm {
    int group = 0;     // task
    int resource = 0;  // capacity row
    double numerator = 0.0;
    std::optional<double> upper;
};

// minimize gamma s.t. sum_{t in g} n_t / r_t <= gamma for all g,
//                     sum_{t on k} r_t <= capacity_k, r >= 0, r_t <= upper_t.
struct ReciprocalProgram {
    int num_groups = 0;
    std::vector<double> capacity;
    std::vector<ReciprocalTerm> terms;

    bool has_upper_bounds() const;
};

struct ReciprocalResult {
    SolveStatus status = SolveStatus::Feasible;
    double gamma = 0.0;
    double lower_bound = 0.0;  // certified lower bound on the optimal gamma
    std::vector<double> r;     // per term
    std::vector<double> beta;  // per group
    double kkt_residual = 0.0;
    int iterations = 0;
};

// Exact solve via the dominant singular pair of the normalized demand
// matrix; rejects programs with per-term upper bounds.
ReciprocalResult solve_reciprocal_spectral(const ReciprocalProgram& p);
// Log-barrier path following; handles per-term upper bounds.
ReciprocalResult solve_reciprocal_barrier(const ReciprocalProgram& p, double tol = 1e-9, int max_iter = 10000);
// Dispatches to the spectral solver unless upper bounds are present.
ReciprocalResult solve_reciprocal(const ReciprocalProgram& p, double tol = 1e-9);

struct HessianReport {
    int samples = 0;
    double min_form = 0.0;
    double max_abs_error = 0.0;  // finite difference against the closed form
    std::vector<std::string> violations;
};

// Quadratic form of the Hessian of g(x, r) = x^2 / r by finite differences.
double hessian_form_fd(double x, double r, double v1, double v2);
double hessian_form_exact(double x, double r, double v1, double v2);
HessianReport verify_hessian_psd(int samples, std::uint64_t seed, double tol = 1e-8);

}  // namespace fairoffload
