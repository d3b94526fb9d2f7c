#include "consilp/io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "consilp/decoder.hpp"

namespace consilp {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Predictions document

namespace {

DecisionGroup group_from_json(const json& j) {
    DecisionGroup g;
    g.id = j.at("id").get<std::string>();
    g.labels = j.at("labels").get<std::vector<std::string>>();
    g.probs = j.at("probs").get<std::vector<double>>();
    g.model_id = j.at("model").get<std::string>();
    if (j.contains("level")) g.level = j["level"].get<int>();
    if (j.contains("seq_index")) g.seq_index = j["seq_index"].get<int>();
    if (j.contains("none_label")) {
        int idx = g.label_index(j["none_label"].get<std::string>());
        if (idx < 0)
            throw IoError("group '" + g.id + "': none_label '" +
                          j["none_label"].get<std::string>() + "' is not a label");
        g.none_index = idx;
    }
    return g;
}

TransitionMatrix transitions_from_json(const json& j) {
    TransitionMatrix m;
    m.labels = j.at("labels").get<std::vector<std::string>>();
    for (const auto& row : j.at("valid")) {
        std::vector<bool> r;
        for (const auto& v : row) r.push_back(v.get<int>() != 0);
        m.valid.push_back(std::move(r));
    }
    return m;
}

} // namespace

Problem predictions_from_json(const json& doc) {
    if (!doc.contains("schema_version") ||
        doc["schema_version"].get<int>() != kSchemaVersion)
        throw IoError("unsupported or missing schema_version (expected " +
                      std::to_string(kSchemaVersion) + ")");
    Problem problem;
    for (const auto& mj : doc.value("models", json::array())) {
        ModelMeta m;
        m.id = mj.at("id").get<std::string>();
        m.accuracy = mj.value("accuracy", 1.0);
        if (mj.contains("priors"))
            m.priors = mj["priors"].get<std::map<std::string, double>>();
        problem.models[m.id] = m;
    }
    for (const auto& ij : doc.at("instances")) {
        Instance inst;
        inst.id = ij.at("id").get<std::string>();
        for (const auto& gj : ij.at("groups"))
            inst.groups.push_back(group_from_json(gj));
        if (ij.contains("hierarchy"))
            inst.parent = ij["hierarchy"].get<std::map<std::string, std::string>>();
        if (ij.contains("transitions"))
            inst.transitions = transitions_from_json(ij["transitions"]);
        if (ij.contains("gold")) {
            for (const auto& [gid, label] : ij["gold"].items()) {
                const auto* g = inst.find_group(gid);
                if (!g)
                    throw IoError("instance '" + inst.id + "': gold names unknown group '" +
                                  gid + "'");
                int idx = g->label_index(label.get<std::string>());
                if (idx < 0)
                    throw IoError("instance '" + inst.id + "': gold label '" +
                                  label.get<std::string>() + "' not in group '" + gid +
                                  "'");
                inst.gold[gid] = idx;
            }
        }
        problem.instances.push_back(std::move(inst));
    }
    return problem;
}

ordered_json predictions_to_json(const Problem& problem) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["models"] = ordered_json::array();
    for (const auto& [id, m] : problem.models) {
        ordered_json mj;
        mj["id"] = m.id;
        mj["accuracy"] = m.accuracy;
        if (!m.priors.empty()) mj["priors"] = m.priors;
        doc["models"].push_back(std::move(mj));
    }
    doc["instances"] = ordered_json::array();
    for (const auto& inst : problem.instances) {
        ordered_json ij;
        ij["id"] = inst.id;
        ij["groups"] = ordered_json::array();
        for (const auto& g : inst.groups) {
            ordered_json gj;
            gj["id"] = g.id;
            gj["labels"] = g.labels;
            gj["probs"] = g.probs;
            gj["model"] = g.model_id;
            if (g.level) gj["level"] = *g.level;
            if (g.seq_index) gj["seq_index"] = *g.seq_index;
            if (g.none_index) gj["none_label"] = g.labels[*g.none_index];
            ij["groups"].push_back(std::move(gj));
        }
        if (!inst.parent.empty()) ij["hierarchy"] = inst.parent;
        if (inst.transitions) {
            ordered_json tj;
            tj["labels"] = inst.transitions->labels;
            tj["valid"] = ordered_json::array();
            for (const auto& row : inst.transitions->valid) {
                ordered_json r = ordered_json::array();
                for (bool v : row) r.push_back(v ? 1 : 0);
                tj["valid"].push_back(std::move(r));
            }
            ij["transitions"] = std::move(tj);
        }
        if (!inst.gold.empty()) {
            ordered_json gj;
            for (const auto& [gid, idx] : inst.gold)
                gj[gid] = inst.find_group(gid)->labels[idx];
            ij["gold"] = std::move(gj);
        }
        doc["instances"].push_back(std::move(ij));
    }
    return doc;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
}

Problem load_predictions(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw IoError("'" + path + "': " + e.what());
    }
    Problem problem;
    try {
        problem = predictions_from_json(doc);
    } catch (const json::exception& e) {
        throw IoError("'" + path + "': " + e.what());
    }
    auto errors = validate_problem(problem);
    if (!errors.empty()) {
        std::string msg = "'" + path + "' failed validation:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw IoError(msg);
    }
    return problem;
}

void save_predictions(const Problem& problem, const std::string& path) {
    write_file(path, predictions_to_json(problem).dump(2) + "\n");
}

void merge_gold(Problem& problem, const json& gold_doc) {
    for (const auto& [iid, groups] : gold_doc.items()) {
        auto it = std::find_if(problem.instances.begin(), problem.instances.end(),
                               [&](const Instance& i) { return i.id == iid; });
        if (it == problem.instances.end())
            throw IoError("gold file names unknown instance '" + iid + "'");
        for (const auto& [gid, label] : groups.items()) {
            const auto* g = it->find_group(gid);
            if (!g)
                throw IoError("gold file: instance '" + iid + "' has no group '" + gid +
                              "'");
            int idx = g->label_index(label.get<std::string>());
            if (idx < 0)
                throw IoError("gold file: label '" + label.get<std::string>() +
                              "' not in group '" + gid + "'");
            it->gold[gid] = idx;
        }
    }
}

// ---------------------------------------------------------------------------
// Pipeline

std::vector<GroundConstraint> ground_program(const ConstraintAst& ast,
                                             const Instance& instance) {
    auto program = ground(ast, instance);
    if (!instance.parent.empty()) {
        auto h = hierarchy_constraints(instance);
        program.insert(program.end(), h.begin(), h.end());
    }
    if (instance.transitions) {
        auto t = transition_constraints(instance, *instance.transitions);
        program.insert(program.end(), t.begin(), t.end());
        auto c = coupling_constraints(instance);
        program.insert(program.end(), c.begin(), c.end());
    }
    return program;
}

namespace {

Assignment infer_instance(const Instance& inst, const Problem& problem,
                          const RunConfig& config,
                          const std::vector<GroundConstraint>& program,
                          SolveStatus& status) {
    status = SolveStatus::Optimal;
    if (config.method == "baseline") return baseline_argmax(inst);

    if (config.method.starts_with("sequential:")) {
        std::string strategy = config.method.substr(11);
        if (strategy == "stepwise") {
            if (!inst.transitions)
                throw IoError("instance '" + inst.id +
                              "' has no transition matrix for stepwise decoding");
            return decode_stepwise(inst, *inst.transitions, program);
        }
        auto meta = HierarchyMeta::from_instance(inst);
        if (strategy == "top_down") return decode_top_down(inst, meta);
        if (strategy == "bottom_up") return decode_bottom_up(inst, meta);
        if (strategy == "two_stage") return decode_two_stage(inst, meta);
        throw IoError("unknown sequential strategy '" + strategy + "'");
    }

    if (config.method == "ilp") {
        std::vector<WeightVector> weights;
        for (const auto& g : inst.groups)
            weights.push_back(score(g, config.scoring, problem.models.at(g.model_id)));
        auto ilp = build_ilp(inst, weights, compile_linear(program));
        auto result = solve(ilp, config.solver);
        status = result.status;
        if (result.status != SolveStatus::Optimal) return baseline_argmax(inst);
        result.assignment.provenance = "ilp:" + config.scoring.factor_tag();
        return result.assignment;
    }
    throw IoError("unknown method '" + config.method + "'");
}

} // namespace

PipelineResult run_pipeline(const Problem& problem, const RunConfig& config) {
    ConstraintAst ast;
    if (!config.constraints_text.empty())
        ast = parse_constraints(config.constraints_text);

    std::vector<const Instance*> order;
    for (const auto& inst : problem.instances) order.push_back(&inst);
    std::sort(order.begin(), order.end(),
              [](const Instance* a, const Instance* b) { return a->id < b->id; });

    PipelineResult out;
    std::vector<Instance> sorted_instances;
    std::vector<Assignment> assignments;
    long satisfied = 0, total_constraints = 0;
    bool all_gold = true;

    for (const Instance* inst : order) {
        auto program = ground_program(ast, *inst);
        InstanceResult r;
        r.instance_id = inst->id;
        r.assignment = infer_instance(*inst, problem, config, program, r.status);
        if (r.status != SolveStatus::Optimal) ++out.num_infeasible;

        auto sat = check_satisfaction(r.assignment, program);
        r.satisfaction = sat.rate();
        satisfied += sat.num_satisfied;
        total_constraints += sat.total;

        auto before = baseline_argmax(*inst);
        out.report.changes.merge(evaluate_changes(*inst, before, r.assignment,
                                                  inst->gold));
        if (!inst->has_gold()) all_gold = false;

        sorted_instances.push_back(*inst);
        assignments.push_back(r.assignment);
        out.results.push_back(std::move(r));
    }

    out.report.satisfaction =
        total_constraints == 0 ? 100.0 : 100.0 * satisfied / total_constraints;
    out.report.has_gold = all_gold && !problem.instances.empty();
    if (out.report.has_gold) {
        out.report.per_role = per_group_scores(sorted_instances, assignments);
        out.report.set_correctness = set_correctness(sorted_instances, assignments);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reports

ordered_json report_to_json(const Problem& problem, const RunConfig& config,
                            const PipelineResult& result) {
    ordered_json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["method"] = config.method;
    doc["factors"] = config.scoring.factor_tag();
    doc["num_instances"] = problem.instances.size();
    doc["num_infeasible"] = result.num_infeasible;

    doc["instances"] = ordered_json::array();
    for (const auto& r : result.results) {
        ordered_json ij;
        ij["id"] = r.instance_id;
        ij["status"] = solve_status_name(r.status);
        ij["satisfaction"] = r.satisfaction;
        ordered_json aj;
        auto it = std::find_if(problem.instances.begin(), problem.instances.end(),
                               [&](const Instance& i) { return i.id == r.instance_id; });
        const Instance* inst = &*it;
        for (const auto& [gid, idx] : r.assignment.choice)
            aj[gid] = inst->find_group(gid)->labels[idx];
        ij["assignment"] = std::move(aj);
        doc["instances"].push_back(std::move(ij));
    }

    ordered_json metrics;
    const auto& rep = result.report;
    metrics["satisfaction"] = rep.satisfaction;
    if (rep.has_gold) {
        metrics["set_correctness"] = rep.set_correctness;
        metrics["average_accuracy"] = rep.average_accuracy();
        metrics["pooled_accuracy"] = rep.pooled_accuracy();
    }
    ordered_json roles;
    for (const auto& [role, counts] : rep.changes.per_role) {
        ordered_json rj;
        if (rep.has_gold && rep.per_role.count(role)) {
            rj["accuracy"] = rep.per_role.at(role).accuracy();
            rj["macro_f1"] = rep.per_role.at(role).macro_f1();
        }
        rj["changes"] = counts.changed;
        rj["plus_c"] = counts.plus_c();
        rj["minus_c"] = counts.minus_c();
        roles[role] = std::move(rj);
    }
    metrics["per_role"] = std::move(roles);
    metrics["total_changes"] = rep.changes.total.changed;
    metrics["plus_c"] = rep.changes.total.plus_c();
    metrics["minus_c"] = rep.changes.total.minus_c();
    doc["metrics"] = std::move(metrics);
    return doc;
}

std::string render_table(const RunConfig& config, const PipelineResult& result) {
    const auto& rep = result.report;
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "method: " << config.method;
    if (config.method == "ilp") os << " (factors: " << config.scoring.factor_tag() << ")";
    os << "\n";

    os << std::left << std::setw(12) << "group" << std::right << std::setw(8) << "Acc"
       << std::setw(8) << "F1" << std::setw(6) << "C" << std::setw(8) << "+C"
       << std::setw(8) << "-C" << "\n";
    for (const auto& [role, counts] : rep.changes.per_role) {
        os << std::left << std::setw(12) << role << std::right;
        if (rep.has_gold && rep.per_role.count(role)) {
            os << std::setw(8) << rep.per_role.at(role).accuracy() << std::setw(8)
               << rep.per_role.at(role).macro_f1();
        } else {
            os << std::setw(8) << "-" << std::setw(8) << "-";
        }
        os << std::setw(6) << counts.changed << std::setw(8) << counts.plus_c()
           << std::setw(8) << counts.minus_c() << "\n";
    }
    if (rep.has_gold) {
        os << std::left << std::setw(12) << "Average" << std::right << std::setw(8)
           << rep.average_accuracy() << "\n";
        os << "set correctness: " << rep.set_correctness << "\n";
    }
    os << "satisfaction: " << rep.satisfaction << "\n";
    if (result.num_infeasible > 0)
        os << "infeasible instances: " << result.num_infeasible << "\n";
    return os.str();
}

} // namespace consilp
