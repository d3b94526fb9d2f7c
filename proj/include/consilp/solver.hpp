#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "consilp/constraint.hpp"
#include "consilp/model.hpp"
#include "consilp/scoring.hpp"

namespace consilp {

/// A 0/1 selection problem: exactly one variable per group is set, the
/// objective is the sum of the chosen weights, subject to the linear
/// constraints.
struct IlpProblem {
    struct Group {
        std::string id;
        std::vector<double> weights;
    };
    std::vector<Group> groups;
    std::vector<LinearConstraint> constraints;
};

struct SolveConfig {
    std::int64_t node_limit = 10'000'000;
};

enum class SolveStatus { Optimal, Infeasible, NodeLimit };

const char* solve_status_name(SolveStatus status);

struct SolveResult {
    SolveStatus status = SolveStatus::Infeasible;
    Assignment assignment;
    double objective = 0.0;
    std::int64_t nodes = 0;
    double wall_seconds = 0.0;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Assembles an IlpProblem from per-group weight vectors and compiled
/// constraints. Throws SolverError on a constraint referencing an
/// unknown group or label.
IlpProblem build_ilp(const Instance& instance,
                     const std::vector<WeightVector>& weights,
                     const std::vector<LinearConstraint>& constraints);

/// Exact branch-and-bound maximization. Branches on groups by descending
/// weight spread (max minus second-largest), children by descending
/// weight; the bound adds each unassigned group's best still-feasible
/// label weight. Among equal-objective optima (1e-12 tie epsilon)
/// returns the lexicographically smallest label-index tuple in group
/// order.
SolveResult solve(const IlpProblem& problem, const SolveConfig& config = {});

/// Enumerates the full Cartesian product (guarded at 1e6 joint
/// assignments), filters by constraints, and maximizes under the same
/// tie-break. Verification oracle for solve().
SolveResult brute_force(const IlpProblem& problem);

} // namespace consilp
