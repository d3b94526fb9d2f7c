#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "consilp/io.hpp"

namespace {

using namespace consilp;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitInputError = 2;

struct CommonOpts {
    std::string predictions;
    std::string constraints;
    std::string gold;
    std::string method = "baseline";
    std::string factors;
    std::string report;
    std::string prior_mode = "uniform-size";
    std::string entropy_variant = "literal";
    double entropy_base = 0.0;
    double entropy_floor = 1e-6;
    std::int64_t node_limit = 10'000'000;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_method = true) {
    cmd->add_option("--predictions", o.predictions, "Predictions JSON document")
        ->required();
    cmd->add_option("--constraints", o.constraints, "Constraint DSL file");
    cmd->add_option("--gold", o.gold, "Gold assignment JSON file");
    if (with_method) {
        cmd->add_option("--method", o.method,
                        "baseline | sequential:<top_down|bottom_up|two_stage|stepwise> "
                        "| ilp");
        cmd->add_option("--factors", o.factors,
                        "Comma list of scoring factors: prior,entropy,accuracy");
        cmd->add_option("--prior-mode", o.prior_mode, "uniform-size | empirical");
        cmd->add_option("--entropy-base", o.entropy_base,
                        "Entropy log base (0 = natural)");
        cmd->add_option("--entropy-floor", o.entropy_floor, "Entropy floor epsilon");
        cmd->add_option("--entropy-variant", o.entropy_variant,
                        "literal | inverse-normalized");
    }
    cmd->add_option("--report", o.report, "Machine-readable report output path");
    cmd->add_option("--node-limit", o.node_limit, "Solver node limit");
}

RunConfig make_config(const CommonOpts& o) {
    RunConfig cfg;
    cfg.method = o.method;
    cfg.scoring = ScoringConfig::from_factors(o.factors);
    if (o.prior_mode == "empirical") {
        cfg.scoring.prior_mode = PriorMode::Empirical;
    } else if (o.prior_mode != "uniform-size") {
        throw IoError("unknown prior mode '" + o.prior_mode + "'");
    }
    if (o.entropy_variant == "inverse-normalized") {
        cfg.scoring.entropy_variant = EntropyVariant::InverseNormalized;
    } else if (o.entropy_variant != "literal") {
        throw IoError("unknown entropy variant '" + o.entropy_variant + "'");
    }
    cfg.scoring.log_base = o.entropy_base;
    cfg.scoring.entropy_floor = o.entropy_floor;
    cfg.solver.node_limit = o.node_limit;
    if (!o.constraints.empty()) cfg.constraints_text = read_file(o.constraints);
    return cfg;
}

Problem load_problem(const CommonOpts& o) {
    Problem problem = load_predictions(o.predictions);
    if (!o.gold.empty())
        merge_gold(problem, nlohmann::json::parse(read_file(o.gold)));
    return problem;
}

int run_infer(const CommonOpts& o, bool require_gold) {
    Problem problem = load_problem(o);
    RunConfig cfg = make_config(o);
    if (require_gold)
        for (const auto& inst : problem.instances)
            if (!inst.has_gold())
                throw IoError("evaluate needs gold for instance '" + inst.id + "'");
    auto result = run_pipeline(problem, cfg);
    std::cout << render_table(cfg, result);
    if (!o.report.empty())
        write_file(o.report, report_to_json(problem, cfg, result).dump(2) + "\n");
    return result.num_infeasible > 0 ? kExitInfeasible : kExitOk;
}

int run_check(const CommonOpts& o) {
    Problem problem = load_problem(o);
    RunConfig cfg = make_config(o);
    ConstraintAst ast;
    if (!cfg.constraints_text.empty()) ast = parse_constraints(cfg.constraints_text);

    int infeasible = 0;
    for (const auto& inst : problem.instances) {
        auto program = ground_program(ast, inst);
        std::vector<WeightVector> weights;
        for (const auto& g : inst.groups)
            weights.push_back({g.id, g.probs, 1.0});
        auto res = solve(build_ilp(inst, weights, compile_linear(program)),
                         cfg.solver);
        std::cout << inst.id << ": " << solve_status_name(res.status) << " ("
                  << program.size() << " constraints)\n";
        if (res.status != SolveStatus::Optimal) ++infeasible;
    }
    std::cout << (infeasible == 0 ? "all instances feasible"
                                  : std::to_string(infeasible) + " infeasible")
              << "\n";
    return infeasible > 0 ? kExitInfeasible : kExitOk;
}

int run_oracle(const CommonOpts& o) {
    Problem problem = load_problem(o);
    RunConfig cfg = make_config(o);
    ConstraintAst ast;
    if (!cfg.constraints_text.empty()) ast = parse_constraints(cfg.constraints_text);

    int mismatches = 0;
    for (const auto& inst : problem.instances) {
        auto program = compile_linear(ground_program(ast, inst));
        std::vector<WeightVector> weights;
        for (const auto& g : inst.groups)
            weights.push_back(score(g, cfg.scoring, problem.models.at(g.model_id)));
        auto ilp = build_ilp(inst, weights, program);
        auto a = solve(ilp, cfg.solver);
        auto b = brute_force(ilp);
        bool same_status = a.status == b.status;
        bool same = same_status &&
                    (a.status != SolveStatus::Optimal ||
                     (std::abs(a.objective - b.objective) <= 1e-9 &&
                      a.assignment.choice == b.assignment.choice));
        std::cout << inst.id << ": " << (same ? "match" : "MISMATCH") << " (solve "
                  << solve_status_name(a.status) << " obj " << a.objective
                  << ", brute " << solve_status_name(b.status) << " obj "
                  << b.objective << ")\n";
        if (!same) ++mismatches;
    }
    return mismatches > 0 ? kExitInfeasible : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Globally consistent joint decisions over heterogeneous model "
                 "outputs: calibrated scoring, exact 0/1 ILP, sequential decoders, "
                 "and consistency metrics"};
    app.require_subcommand(1);

    CommonOpts infer_opts, eval_opts, check_opts, oracle_opts;
    auto* infer = app.add_subcommand("infer", "Run scoring + inference and report");
    add_common(infer, infer_opts);
    auto* evaluate =
        app.add_subcommand("evaluate", "Run inference and score against gold");
    add_common(evaluate, eval_opts);
    auto* check =
        app.add_subcommand("check", "Validate inputs and probe feasibility");
    add_common(check, check_opts, false);
    auto* oracle = app.add_subcommand(
        "oracle", "Diff the branch-and-bound solver against brute force");
    add_common(oracle, oracle_opts);

    auto* generate = app.add_subcommand("generate", "Emit a synthetic fixture");
    std::string out_path, kind = "hierarchy", profile = "3,15", accuracies = "0.85";
    GeneratorSpec spec;
    bool none_labels = false;
    generate->add_option("--out", out_path, "Output predictions path")->required();
    generate->add_option("--kind", kind, "hierarchy | sequence");
    generate->add_option("--profile", profile, "Comma list of level sizes");
    generate->add_option("--accuracy", accuracies,
                         "Comma list of per-level accuracy targets");
    generate->add_option("--instances", spec.num_instances, "Instance count");
    generate->add_option("--seed", spec.seed, "Random seed");
    generate->add_option("--steps", spec.steps, "Sequence length");
    generate->add_option("--sharpness", spec.sharpness,
                         "Probability concentration in (0,1)");
    generate->add_flag("--none-labels", none_labels, "'None' labels on levels >= 2");

    CLI11_PARSE(app, argc, argv);

    try {
        if (infer->parsed()) return run_infer(infer_opts, false);
        if (evaluate->parsed()) return run_infer(eval_opts, true);
        if (check->parsed()) return run_check(check_opts);
        if (oracle->parsed()) return run_oracle(oracle_opts);
        if (generate->parsed()) {
            spec.kind = kind == "sequence" ? FixtureKind::Sequence
                                           : FixtureKind::Hierarchy;
            spec.none_labels = none_labels;
            spec.level_sizes.clear();
            std::stringstream ps(profile);
            for (std::string tok; std::getline(ps, tok, ',');)
                spec.level_sizes.push_back(std::stoi(tok));
            spec.accuracy_targets.clear();
            std::stringstream as(accuracies);
            for (std::string tok; std::getline(as, tok, ',');)
                spec.accuracy_targets.push_back(std::stod(tok));
            save_predictions(consilp::generate(spec), out_path);
            std::cout << "wrote " << out_path << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
