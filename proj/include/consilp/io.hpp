#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "consilp/constraint.hpp"
#include "consilp/fixtures.hpp"
#include "consilp/metrics.hpp"
#include "consilp/model.hpp"
#include "consilp/scoring.hpp"
#include "consilp/solver.hpp"

namespace consilp {

inline constexpr int kSchemaVersion = 1;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Predictions document

Problem predictions_from_json(const nlohmann::json& doc);
nlohmann::ordered_json predictions_to_json(const Problem& problem);

/// Reads and validates a predictions document. Throws IoError carrying
/// the consolidated violation list on any failure.
Problem load_predictions(const std::string& path);
void save_predictions(const Problem& problem, const std::string& path);

/// Merges a gold file ({"instance": {"group": "label"}}) into the
/// problem, overriding any embedded gold.
void merge_gold(Problem& problem, const nlohmann::json& gold_doc);

// ---------------------------------------------------------------------------
// Pipeline

struct RunConfig {
    std::string method = "baseline"; // baseline | sequential:<strategy> | ilp
    ScoringConfig scoring;
    SolveConfig solver;
    std::string constraints_text; // DSL source, may be empty
};

struct InstanceResult {
    std::string instance_id;
    Assignment assignment;
    SolveStatus status = SolveStatus::Optimal;
    double satisfaction = 100.0;
};

struct PipelineResult {
    std::vector<InstanceResult> results; // sorted by instance id
    EvalReport report;
    int num_infeasible = 0;
};

/// The ground constraint program for one instance: parsed DSL statements
/// plus implicit exactly-one, hierarchy constraints generated from the
/// parent map, and transition + location-coupling constraints when a
/// transition matrix is present.
std::vector<GroundConstraint> ground_program(const ConstraintAst& ast,
                                             const Instance& instance);

/// Scores, infers, and evaluates every instance with the chosen method.
/// Infeasible ILP instances fall back to the baseline assignment and are
/// counted in num_infeasible.
PipelineResult run_pipeline(const Problem& problem, const RunConfig& config);

// ---------------------------------------------------------------------------
// Reports

nlohmann::ordered_json report_to_json(const Problem& problem, const RunConfig& config,
                                      const PipelineResult& result);

/// Human-readable table: Acc / C / +C / -C per group role, macro-F1,
/// satisfaction, and set correctness.
std::string render_table(const RunConfig& config, const PipelineResult& result);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace consilp
