#include <doctest.h>

#include <cstdio>

#include "consilp/io.hpp"
#include "helpers.hpp"

using namespace consilp;
using namespace consilp::testing;
using nlohmann::json;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(std::string p) : path(std::move(p)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("predictions round-trip through JSON for both profiles") {
    for (auto kind : {FixtureKind::Hierarchy, FixtureKind::Sequence}) {
        GeneratorSpec spec;
        spec.kind = kind;
        spec.num_instances = 5;
        spec.none_labels = kind == FixtureKind::Hierarchy;
        auto problem = generate(spec);
        auto doc = predictions_to_json(problem);
        auto back = predictions_from_json(doc);
        CHECK(predictions_to_json(back) == doc);
        CHECK(back.instances.size() == problem.instances.size());
        CHECK(back.models.size() == problem.models.size());
        CHECK(back.instances[0].gold == problem.instances[0].gold);
        CHECK(back.instances[0].groups[0].probs == problem.instances[0].groups[0].probs);
    }
}

TEST_CASE("schema version is mandatory and checked") {
    json doc;
    doc["instances"] = json::array();
    CHECK_THROWS_AS(predictions_from_json(doc), IoError);
    doc["schema_version"] = kSchemaVersion + 1;
    CHECK_THROWS_AS(predictions_from_json(doc), IoError);
    doc["schema_version"] = kSchemaVersion;
    CHECK_NOTHROW(predictions_from_json(doc));
}

TEST_CASE("bad embedded references are rejected with context") {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["models"] = {{{"id", "m"}, {"accuracy", 1.0}}};
    json group = {{"id", "g"},
                  {"labels", {"x", "y"}},
                  {"probs", {0.5, 0.5}},
                  {"model", "m"}};
    doc["instances"] = {{{"id", "i"}, {"groups", {group}}}};

    SUBCASE("none_label must name a label") {
        doc["instances"][0]["groups"][0]["none_label"] = "nope";
        CHECK_THROWS_WITH_AS(predictions_from_json(doc),
                             doctest::Contains("none_label 'nope'"), IoError);
    }
    SUBCASE("gold must name known groups and labels") {
        doc["instances"][0]["gold"] = {{"other", "x"}};
        CHECK_THROWS_WITH_AS(predictions_from_json(doc),
                             doctest::Contains("unknown group 'other'"), IoError);
        doc["instances"][0]["gold"] = {{"g", "z"}};
        CHECK_THROWS_WITH_AS(predictions_from_json(doc),
                             doctest::Contains("gold label 'z'"), IoError);
    }
}

TEST_CASE("load_predictions consolidates validation failures") {
    TempFile tmp("test_io_bad_predictions.json");
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["models"] = json::array();
    json group = {{"id", "g"},
                  {"labels", {"x", "y"}},
                  {"probs", {0.9, 0.9}},
                  {"model", "missing"}};
    doc["instances"] = {{{"id", "i"}, {"groups", {group}}}};
    write_file(tmp.path, doc.dump());
    try {
        load_predictions(tmp.path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        std::string msg = e.what();
        CHECK(msg.find("failed validation") != std::string::npos);
        CHECK(msg.find("probability sum") != std::string::npos);
        CHECK(msg.find("unknown model id 'missing'") != std::string::npos);
    }
}

TEST_CASE("save/load round-trips a generated problem") {
    TempFile tmp("test_io_roundtrip.json");
    GeneratorSpec spec;
    spec.num_instances = 4;
    auto problem = generate(spec);
    save_predictions(problem, tmp.path);
    auto back = load_predictions(tmp.path);
    CHECK(predictions_to_json(back) == predictions_to_json(problem));
}

TEST_CASE("merge_gold overrides embedded gold and validates names") {
    GeneratorSpec spec;
    spec.num_instances = 2;
    auto problem = generate(spec);
    const auto& inst = problem.instances[0];
    const auto& g = inst.groups[0];
    int target = inst.gold.at(g.id) == 0 ? 1 : 0;
    json gold = {{inst.id, {{g.id, g.labels[target]}}}};
    merge_gold(problem, gold);
    CHECK(problem.instances[0].gold.at(g.id) == target);

    CHECK_THROWS_AS(merge_gold(problem, json{{"ghost", json::object()}}), IoError);
    CHECK_THROWS_AS(merge_gold(problem, json{{inst.id, {{g.id, "ghost"}}}}), IoError);
}

TEST_CASE("pipeline: baseline reproduces the per-group argmax") {
    GeneratorSpec spec;
    spec.num_instances = 10;
    auto problem = generate(spec);
    RunConfig config; // method = baseline
    auto out = run_pipeline(problem, config);
    REQUIRE(out.results.size() == problem.instances.size());
    CHECK(out.report.changes.total.changed == 0);
    CHECK(out.num_infeasible == 0);
    for (const auto& r : out.results) {
        const Instance* inst = nullptr;
        for (const auto& i : problem.instances)
            if (i.id == r.instance_id) inst = &i;
        REQUIRE(inst != nullptr);
        CHECK(r.assignment.choice == baseline_argmax(*inst).choice);
    }
    CHECK(out.report.has_gold);
}

TEST_CASE("pipeline: ilp matches the standalone solver on the frozen fixture") {
    auto fx = heterogeneity_fixture();
    RunConfig config;
    config.method = "ilp";
    config.constraints_text = "nand small.a0 large.b0\n";

    auto raw = run_pipeline(fx.problem, config);
    REQUIRE(raw.results.size() == 1);
    CHECK(raw.results[0].assignment.at("small") == 0);
    CHECK(raw.results[0].assignment.at("large") == 1);
    CHECK(raw.results[0].satisfaction == 100.0);
    CHECK(raw.results[0].assignment.provenance == "ilp:raw");

    config.scoring = ScoringConfig::from_factors("prior");
    auto prior = run_pipeline(fx.problem, config);
    CHECK(prior.results[0].assignment.at("small") == 1);
    CHECK(prior.results[0].assignment.at("large") == 0);
    CHECK(prior.results[0].assignment.provenance == "ilp:prior");
}

TEST_CASE("pipeline: infeasible instances fall back to the baseline") {
    Instance inst;
    inst.id = "i";
    inst.groups.push_back(make_group("g", {0.7, 0.3}));
    auto problem = make_problem({inst});
    RunConfig config;
    config.method = "ilp";
    config.constraints_text = "nand g.g_l0 g.g_l0\nnand g.g_l1 g.g_l1\n";
    auto out = run_pipeline(problem, config);
    CHECK(out.num_infeasible == 1);
    CHECK(out.results[0].status == SolveStatus::Infeasible);
    CHECK(out.results[0].assignment.choice == baseline_argmax(inst).choice);
    CHECK(out.results[0].satisfaction < 100.0);
}

TEST_CASE("pipeline: sequential strategies run end to end") {
    GeneratorSpec spec;
    spec.num_instances = 6;
    spec.level_sizes = {3, 15};
    auto problem = generate(spec);
    for (const char* method : {"sequential:top_down", "sequential:bottom_up",
                               "sequential:two_stage"}) {
        RunConfig config;
        config.method = method;
        auto out = run_pipeline(problem, config);
        CHECK(out.report.satisfaction == 100.0);
    }

    GeneratorSpec sspec;
    sspec.kind = FixtureKind::Sequence;
    sspec.num_instances = 6;
    sspec.steps = 5;
    RunConfig config;
    config.method = "sequential:stepwise";
    auto out = run_pipeline(generate(sspec), config);
    CHECK(out.report.satisfaction == 100.0);
}

TEST_CASE("pipeline: unknown methods are rejected") {
    GeneratorSpec spec;
    spec.num_instances = 1;
    auto problem = generate(spec);
    RunConfig config;
    config.method = "oracle?";
    CHECK_THROWS_AS(run_pipeline(problem, config), IoError);
    config.method = "sequential:sideways";
    CHECK_THROWS_AS(run_pipeline(problem, config), IoError);
}

TEST_CASE("machine reports are byte-identical across repeated runs") {
    GeneratorSpec spec;
    spec.num_instances = 8;
    spec.none_labels = false;
    auto problem = generate(spec);
    RunConfig config;
    config.method = "ilp";
    config.scoring = ScoringConfig::from_factors("prior,entropy");
    auto a = report_to_json(problem, config, run_pipeline(problem, config)).dump(2);
    auto b = report_to_json(problem, config, run_pipeline(problem, config)).dump(2);
    CHECK(a == b);
    CHECK_FALSE(a.empty());
}

TEST_CASE("report JSON carries the metric block and sorted instances") {
    GeneratorSpec spec;
    spec.num_instances = 12;
    auto problem = generate(spec);
    RunConfig config;
    config.method = "ilp";
    auto out = run_pipeline(problem, config);
    auto doc = report_to_json(problem, config, out);
    CHECK(doc.at("schema_version") == kSchemaVersion);
    CHECK(doc.at("method") == "ilp");
    CHECK(doc.at("factors") == "raw");
    CHECK(doc.at("metrics").contains("satisfaction"));
    CHECK(doc.at("metrics").contains("set_correctness"));
    CHECK(doc.at("metrics").at("per_role").contains("level1"));
    const auto& ids = doc.at("instances");
    for (std::size_t i = 1; i < ids.size(); ++i)
        CHECK(ids[i - 1].at("id").get<std::string>() <
              ids[i].at("id").get<std::string>());
}

TEST_CASE("human table renders the headline metrics") {
    GeneratorSpec spec;
    spec.num_instances = 5;
    auto problem = generate(spec);
    RunConfig config;
    auto out = run_pipeline(problem, config);
    auto table = render_table(config, out);
    CHECK(table.find("satisfaction") != std::string::npos);
    CHECK(table.find("level1") != std::string::npos);
    CHECK(table.find("Acc") != std::string::npos);
}
