// SPDX-License-Identifier: Apache-2.0
//
// Generators for the four fairness experiments and the CSV sweep runner.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairoffload/baselines.hpp"
#include "fairoffload/dbbd.hpp"
#include "fairoffload/model.hpp"

namespace fairoffload {

// Scenario 1 sweeps the device count, 2 and 3 the edge resource scale
// (a fraction of the full totals), 4 the task count over two devices.
struct ScenarioSpec {
    int id = 1;
    std::uint64_t seed = 1;
    std::vector<double> points;  // empty selects the default sweep
};

std::vector<double> default_points(int scenario);
Instance generate(const ScenarioSpec& spec, double point);

enum class SolverId { Dbbd, SwmGeneric, SwmSequentialFill, Oracle };

const char* to_string(SolverId s);
std::optional<SolverId> parse_solver(const std::string& s);

SolveReport run_solver(const Instance& inst, SolverId solver, const SolveConfig& base = {});

struct MatrixOptions {
    bool timings = true;  // false writes 0 in wall_time for byte-stable output
};

std::string csv_header();
std::string csv_row(double point, const SolveReport& r, const Instance& inst, const MatrixOptions& opt = {});
std::string run_matrix(const ScenarioSpec& spec, const std::vector<SolverId>& solvers, const MatrixOptions& opt = {});

}  // namespace fairoffload
