#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "consilp/decoder.hpp"
#include "consilp/fixtures.hpp"
#include "consilp/io.hpp"
#include "consilp/metrics.hpp"
#include "consilp/model.hpp"
#include "consilp/scoring.hpp"
#include "consilp/solver.hpp"

namespace py = pybind11;
using namespace consilp;

namespace {

double entropy_list(const std::vector<double>& probs, double base) {
    return entropy(probs, base);
}

Problem load_json_str(const std::string& text) {
    Problem p = predictions_from_json(nlohmann::json::parse(text));
    auto errors = validate_problem(p);
    if (!errors.empty()) {
        std::string msg = "validation failed:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw IoError(msg);
    }
    return p;
}

std::string dump_json_str(const Problem& p) { return predictions_to_json(p).dump(2); }

std::string report_json_str(const Problem& p, const RunConfig& cfg,
                            const PipelineResult& r) {
    return report_to_json(p, cfg, r).dump(2);
}

} // namespace

PYBIND11_MODULE(_consilp, m) {
    m.doc() = "Consistent joint decisions over heterogeneous model outputs: "
              "calibrated scoring, exact 0/1 ILP, sequential decoders, metrics";

    // --- data model -------------------------------------------------------
    py::class_<DecisionGroup>(m, "DecisionGroup")
        .def(py::init<>())
        .def_readwrite("id", &DecisionGroup::id)
        .def_readwrite("labels", &DecisionGroup::labels)
        .def_readwrite("probs", &DecisionGroup::probs)
        .def_readwrite("model_id", &DecisionGroup::model_id)
        .def_readwrite("level", &DecisionGroup::level)
        .def_readwrite("seq_index", &DecisionGroup::seq_index)
        .def_readwrite("none_index", &DecisionGroup::none_index)
        .def("label_index", &DecisionGroup::label_index)
        .def("role", &DecisionGroup::role);

    py::class_<ModelMeta>(m, "ModelMeta")
        .def(py::init<>())
        .def_readwrite("id", &ModelMeta::id)
        .def_readwrite("accuracy", &ModelMeta::accuracy)
        .def_readwrite("priors", &ModelMeta::priors);

    py::class_<TransitionMatrix>(m, "TransitionMatrix")
        .def(py::init<>())
        .def_readwrite("labels", &TransitionMatrix::labels)
        .def_readwrite("valid", &TransitionMatrix::valid)
        .def("allows", &TransitionMatrix::allows);

    py::class_<Instance>(m, "Instance")
        .def(py::init<>())
        .def_readwrite("id", &Instance::id)
        .def_readwrite("groups", &Instance::groups)
        .def_readwrite("gold", &Instance::gold)
        .def_readwrite("parent", &Instance::parent)
        .def_readwrite("transitions", &Instance::transitions)
        .def("has_gold", &Instance::has_gold);

    py::class_<Problem>(m, "Problem")
        .def(py::init<>())
        .def_readwrite("instances", &Problem::instances)
        .def_readwrite("models", &Problem::models);

    py::class_<Assignment>(m, "Assignment")
        .def(py::init<>())
        .def_readwrite("choice", &Assignment::choice)
        .def_readwrite("provenance", &Assignment::provenance);

    m.def("validate_problem", &validate_problem,
          "Validates all invariants; returns the violation list");
    m.def("baseline_argmax", &baseline_argmax);

    // --- scoring ----------------------------------------------------------
    py::enum_<PriorMode>(m, "PriorMode")
        .value("UNIFORM_SIZE", PriorMode::UniformSize)
        .value("EMPIRICAL", PriorMode::Empirical);
    py::enum_<EntropyVariant>(m, "EntropyVariant")
        .value("LITERAL", EntropyVariant::Literal)
        .value("INVERSE_NORMALIZED", EntropyVariant::InverseNormalized);

    py::class_<ScoringConfig>(m, "ScoringConfig")
        .def(py::init<>())
        .def_readwrite("use_prior", &ScoringConfig::use_prior)
        .def_readwrite("use_entropy", &ScoringConfig::use_entropy)
        .def_readwrite("use_accuracy", &ScoringConfig::use_accuracy)
        .def_readwrite("prior_mode", &ScoringConfig::prior_mode)
        .def_readwrite("log_base", &ScoringConfig::log_base)
        .def_readwrite("entropy_floor", &ScoringConfig::entropy_floor)
        .def_readwrite("entropy_variant", &ScoringConfig::entropy_variant)
        .def_static("from_factors", &ScoringConfig::from_factors)
        .def("factor_tag", &ScoringConfig::factor_tag);

    py::class_<WeightVector>(m, "WeightVector")
        .def_readonly("group_id", &WeightVector::group_id)
        .def_readonly("weights", &WeightVector::weights)
        .def_readonly("gamma", &WeightVector::gamma);

    m.def("entropy", &entropy_list, py::arg("probs"), py::arg("base") = 0.0);
    m.def("score", &score, py::arg("group"), py::arg("config"), py::arg("meta"));

    // --- constraints ------------------------------------------------------
    py::class_<ConstraintAst>(m, "ConstraintAst");
    py::class_<GroundConstraint>(m, "GroundConstraint")
        .def_readonly("line", &GroundConstraint::line);
    py::class_<LinearConstraint>(m, "LinearConstraint");

    m.def("parse_constraints", &parse_constraints);
    m.def("ground", &consilp::ground);
    m.def("ground_program", &ground_program, py::arg("ast"), py::arg("instance"),
          "Parsed statements plus implicit, hierarchy, and transition constraints");
    m.def("hierarchy_constraints", &hierarchy_constraints);
    m.def("transition_constraints", &transition_constraints, py::arg("instance"),
          py::arg("matrix"), py::arg("seq_base") = "action");
    m.def("coupling_constraints", &coupling_constraints);
    m.def("compile_linear", &compile_linear);
    m.def("default_action_transitions", &default_action_transitions);
    m.def(
        "satisfaction_rate",
        [](const Assignment& a, const std::vector<GroundConstraint>& cs) {
            return satisfaction_rate(a, cs);
        },
        py::arg("assignment"), py::arg("constraints"));

    // --- solver -----------------------------------------------------------
    py::enum_<SolveStatus>(m, "SolveStatus")
        .value("OPTIMAL", SolveStatus::Optimal)
        .value("INFEASIBLE", SolveStatus::Infeasible)
        .value("NODE_LIMIT", SolveStatus::NodeLimit);

    py::class_<IlpProblem>(m, "IlpProblem").def(py::init<>());
    py::class_<SolveConfig>(m, "SolveConfig")
        .def(py::init<>())
        .def_readwrite("node_limit", &SolveConfig::node_limit);
    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("status", &SolveResult::status)
        .def_readonly("assignment", &SolveResult::assignment)
        .def_readonly("objective", &SolveResult::objective)
        .def_readonly("nodes", &SolveResult::nodes)
        .def_readonly("wall_seconds", &SolveResult::wall_seconds);

    m.def("build_ilp", &build_ilp);
    m.def("solve", &solve, py::arg("problem"), py::arg("config") = SolveConfig{});
    m.def("brute_force", &brute_force);

    // --- decoders ---------------------------------------------------------
    py::class_<HierarchyMeta>(m, "HierarchyMeta")
        .def_static("from_instance", &HierarchyMeta::from_instance)
        .def_readonly("level_group_ids", &HierarchyMeta::level_group_ids);
    m.def("decode_top_down", &decode_top_down);
    m.def("decode_bottom_up", &decode_bottom_up);
    m.def("decode_two_stage", &decode_two_stage);
    m.def("decode_stepwise", &decode_stepwise, py::arg("instance"), py::arg("matrix"),
          py::arg("coupling") = std::vector<GroundConstraint>{},
          py::arg("seq_base") = "action");

    // --- metrics ----------------------------------------------------------
    py::class_<ChangeCounts>(m, "ChangeCounts")
        .def_readonly("changed", &ChangeCounts::changed)
        .def_readonly("improved", &ChangeCounts::improved)
        .def_readonly("worsened", &ChangeCounts::worsened)
        .def("plus_c", &ChangeCounts::plus_c)
        .def("minus_c", &ChangeCounts::minus_c);
    py::class_<ChangeReport>(m, "ChangeReport")
        .def_readonly("total", &ChangeReport::total)
        .def_readonly("per_role", &ChangeReport::per_role);
    py::class_<RoleScores>(m, "RoleScores")
        .def_readonly("correct", &RoleScores::correct)
        .def_readonly("total", &RoleScores::total)
        .def("accuracy", &RoleScores::accuracy)
        .def("macro_f1", &RoleScores::macro_f1);

    m.def("evaluate_changes", &evaluate_changes);
    m.def("set_correctness", &set_correctness);
    m.def("per_group_scores", &per_group_scores);

    // --- fixtures ---------------------------------------------------------
    py::enum_<FixtureKind>(m, "FixtureKind")
        .value("HIERARCHY", FixtureKind::Hierarchy)
        .value("SEQUENCE", FixtureKind::Sequence);
    py::class_<GeneratorSpec>(m, "GeneratorSpec")
        .def(py::init<>())
        .def_readwrite("kind", &GeneratorSpec::kind)
        .def_readwrite("num_instances", &GeneratorSpec::num_instances)
        .def_readwrite("seed", &GeneratorSpec::seed)
        .def_readwrite("level_sizes", &GeneratorSpec::level_sizes)
        .def_readwrite("none_labels", &GeneratorSpec::none_labels)
        .def_readwrite("accuracy_targets", &GeneratorSpec::accuracy_targets)
        .def_readwrite("sharpness", &GeneratorSpec::sharpness)
        .def_readwrite("steps", &GeneratorSpec::steps)
        .def_readwrite("min_locations", &GeneratorSpec::min_locations)
        .def_readwrite("max_locations", &GeneratorSpec::max_locations);
    py::class_<HeterogeneityFixture>(m, "HeterogeneityFixture")
        .def_readonly("problem", &HeterogeneityFixture::problem)
        .def_readonly("constraints", &HeterogeneityFixture::constraints);
    m.def("generate", &generate);
    m.def("heterogeneity_fixture", &heterogeneity_fixture);

    // --- pipeline + serialization ----------------------------------------
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("method", &RunConfig::method)
        .def_readwrite("scoring", &RunConfig::scoring)
        .def_readwrite("solver", &RunConfig::solver)
        .def_readwrite("constraints_text", &RunConfig::constraints_text);
    py::class_<InstanceResult>(m, "InstanceResult")
        .def_readonly("instance_id", &InstanceResult::instance_id)
        .def_readonly("assignment", &InstanceResult::assignment)
        .def_readonly("status", &InstanceResult::status)
        .def_readonly("satisfaction", &InstanceResult::satisfaction);
    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("per_role", &EvalReport::per_role)
        .def_readonly("changes", &EvalReport::changes)
        .def_readonly("satisfaction", &EvalReport::satisfaction)
        .def_readonly("set_correctness", &EvalReport::set_correctness)
        .def_readonly("has_gold", &EvalReport::has_gold)
        .def("average_accuracy", &EvalReport::average_accuracy)
        .def("pooled_accuracy", &EvalReport::pooled_accuracy);
    py::class_<PipelineResult>(m, "PipelineResult")
        .def_readonly("results", &PipelineResult::results)
        .def_readonly("report", &PipelineResult::report)
        .def_readonly("num_infeasible", &PipelineResult::num_infeasible);

    m.def("run_pipeline", &run_pipeline);
    m.def("load_predictions_json", &load_json_str,
          "Parse and validate a predictions document from a JSON string");
    m.def("dump_predictions_json", &dump_json_str);
    m.def("report_json", &report_json_str);

    py::register_exception<ParseError>(m, "ParseError");
    py::register_exception<GroundError>(m, "GroundError");
    py::register_exception<SolverError>(m, "SolverError");
    py::register_exception<DecodeError>(m, "DecodeError");
    py::register_exception<MetricsError>(m, "MetricsError");
    py::register_exception<IoError>(m, "IoError");
}
