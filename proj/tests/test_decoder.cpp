#include <doctest.h>

#include "consilp/decoder.hpp"
#include "consilp/fixtures.hpp"
#include "helpers.hpp"

using namespace consilp;
using namespace consilp::testing;

namespace {

// Two levels: {animal, plant} over {cat, dog, rose, tulip}.
Instance flora_fauna(std::vector<double> l1, std::vector<double> l2) {
    Instance inst;
    inst.id = "h";
    DecisionGroup g1;
    g1.id = "level1";
    g1.labels = {"animal", "plant"};
    g1.probs = std::move(l1);
    g1.model_id = "m";
    g1.level = 1;
    DecisionGroup g2;
    g2.id = "level2";
    g2.labels = {"cat", "dog", "rose", "tulip"};
    g2.probs = std::move(l2);
    g2.model_id = "m";
    g2.level = 2;
    inst.groups = {g1, g2};
    inst.parent = {{"cat", "animal"}, {"dog", "animal"},
                   {"rose", "plant"}, {"tulip", "plant"}};
    return inst;
}

} // namespace

TEST_CASE("top-down keeps level 1 and picks the best consistent child") {
    // Level 1 says animal; level 2 favors rose, but the best
    // animal-child is cat.
    auto inst = flora_fauna({0.7, 0.3}, {0.25, 0.15, 0.40, 0.20});
    auto meta = HierarchyMeta::from_instance(inst);
    auto a = decode_top_down(inst, meta);
    CHECK(a.at("level1") == 0);
    CHECK(inst.groups[1].labels[a.at("level2")] == "cat");
    CHECK(a.provenance == "sequential:top_down");
}

TEST_CASE("top-down is a no-op on a consistent baseline") {
    auto inst = flora_fauna({0.7, 0.3}, {0.40, 0.15, 0.25, 0.20});
    auto meta = HierarchyMeta::from_instance(inst);
    CHECK(decode_top_down(inst, meta).choice == baseline_argmax(inst).choice);
}

TEST_CASE("top-down errors when no child and no None exists") {
    auto inst = flora_fauna({0.2, 0.2}, {0.25, 0.25, 0.25, 0.25});
    inst.groups[0].labels.push_back("food"); // childless
    inst.groups[0].probs = {0.2, 0.2, 0.6};
    auto meta = HierarchyMeta::from_instance(inst);
    CHECK_THROWS_AS(decode_top_down(inst, meta), DecodeError);
}

TEST_CASE("top-down falls back to None for a childless parent") {
    auto inst = flora_fauna({0.2, 0.2}, {0.22, 0.22, 0.22, 0.22});
    inst.groups[0].labels.push_back("food");
    inst.groups[0].probs = {0.2, 0.2, 0.6};
    inst.groups[1].labels.push_back("None");
    inst.groups[1].probs = {0.22, 0.22, 0.22, 0.22, 0.12};
    inst.groups[1].none_index = 4;
    auto meta = HierarchyMeta::from_instance(inst);
    auto a = decode_top_down(inst, meta);
    CHECK(a.at("level2") == 4);
}

TEST_CASE("bottom-up keeps the deepest level and forces the parent chain") {
    // Level 2 argmax tulip forces level 1 to plant despite animal's 0.7.
    auto inst = flora_fauna({0.7, 0.3}, {0.10, 0.15, 0.30, 0.45});
    auto meta = HierarchyMeta::from_instance(inst);
    auto a = decode_bottom_up(inst, meta);
    CHECK(inst.groups[1].labels[a.at("level2")] == "tulip");
    CHECK(inst.groups[0].labels[a.at("level1")] == "plant");
    CHECK(a.at("level2") == baseline_argmax(inst).at("level2"));
}

TEST_CASE("bottom-up is a no-op on a consistent baseline") {
    auto inst = flora_fauna({0.7, 0.3}, {0.45, 0.15, 0.30, 0.10});
    auto meta = HierarchyMeta::from_instance(inst);
    CHECK(decode_bottom_up(inst, meta).choice == baseline_argmax(inst).choice);
}

TEST_CASE("bottom-up None falls back to per-level argmax above") {
    auto inst = flora_fauna({0.7, 0.3}, {0.20, 0.15, 0.25, 0.10});
    inst.groups[1].labels.push_back("None");
    inst.groups[1].probs = {0.20, 0.15, 0.25, 0.10, 0.30};
    inst.groups[1].none_index = 4;
    auto meta = HierarchyMeta::from_instance(inst);
    auto a = decode_bottom_up(inst, meta);
    CHECK(a.at("level2") == 4);
    CHECK(a.at("level1") == 0); // own argmax: animal
}

namespace {

// Four levels with None on 2..4; parents follow the name chain.
Instance deep_hierarchy(std::vector<std::vector<double>> probs) {
    Instance inst;
    inst.id = "deep";
    const std::vector<std::vector<std::string>> labels = {
        {"a", "b"},
        {"a1", "b1", "None2"},
        {"a2", "b2", "None3"},
        {"a3", "b3", "None4"},
    };
    for (int k = 0; k < 4; ++k) {
        DecisionGroup g;
        g.id = "level" + std::to_string(k + 1);
        g.labels = labels[k];
        g.probs = probs[k];
        g.model_id = "m";
        g.level = k + 1;
        if (k > 0) g.none_index = 2;
        inst.groups.push_back(std::move(g));
    }
    inst.parent = {{"a1", "a"}, {"b1", "b"}, {"a2", "a1"},
                   {"b2", "b1"}, {"a3", "a2"}, {"b3", "b2"}};
    return inst;
}

} // namespace

TEST_CASE("two-stage: None at level 2 propagates to levels 3 and 4") {
    auto inst = deep_hierarchy({{0.8, 0.2},
                                {0.2, 0.2, 0.6},
                                {0.5, 0.3, 0.2},
                                {0.4, 0.4, 0.2}});
    auto meta = HierarchyMeta::from_instance(inst);
    auto a = decode_two_stage(inst, meta);
    CHECK(a.at("level1") == 0);
    CHECK(a.at("level2") == 2);
    CHECK(a.at("level3") == 2);
    CHECK(a.at("level4") == 2);
}

TEST_CASE("two-stage: consistent non-None baseline is unchanged") {
    auto inst = deep_hierarchy({{0.8, 0.2},
                                {0.6, 0.2, 0.2},
                                {0.6, 0.2, 0.2},
                                {0.6, 0.2, 0.2}});
    auto meta = HierarchyMeta::from_instance(inst);
    CHECK(decode_two_stage(inst, meta).choice == baseline_argmax(inst).choice);
}

TEST_CASE("two-stage: deepest non-None overwrites mismatched ancestors") {
    // Level 4 argmax b3; levels 3..1 argmax on the 'a' branch.
    auto inst = deep_hierarchy({{0.8, 0.2},
                                {0.6, 0.2, 0.2},
                                {0.6, 0.2, 0.2},
                                {0.2, 0.6, 0.2}});
    auto meta = HierarchyMeta::from_instance(inst);
    auto a = decode_two_stage(inst, meta);
    CHECK(a.at("level4") == 1);
    CHECK(a.at("level3") == 1);
    CHECK(a.at("level2") == 1);
    CHECK(a.at("level1") == 1);
}

namespace {

Instance propara_like(std::vector<std::string> gold_actions) {
    auto matrix = default_action_transitions();
    Instance inst;
    inst.id = "p";
    inst.transitions = matrix;
    for (std::size_t t = 0; t < gold_actions.size(); ++t) {
        DecisionGroup g;
        g.id = "action[" + std::to_string(t) + "]";
        g.labels = matrix.labels;
        g.model_id = "m";
        g.seq_index = static_cast<int>(t);
        g.probs.assign(6, 0.06);
        g.probs[matrix.label_index(gold_actions[t])] = 0.7;
        inst.groups.push_back(std::move(g));
    }
    return inst;
}

} // namespace

TEST_CASE("stepwise repairs the attested invalid Destroy->Move pair") {
    auto matrix = default_action_transitions();
    auto inst = propara_like({"Create", "Destroy", "Move", "Post"});
    auto a = decode_stepwise(inst, matrix);
    CHECK(inst.groups[0].labels[a.at("action[0]")] == "Create");
    CHECK(inst.groups[1].labels[a.at("action[1]")] == "Destroy");
    // Step 2 cannot be Move after Destroy; Post is the only valid successor.
    CHECK(inst.groups[2].labels[a.at("action[2]")] == "Post");
    CHECK(inst.groups[3].labels[a.at("action[3]")] == "Post");
}

TEST_CASE("stepwise keeps an already valid sequence") {
    auto matrix = default_action_transitions();
    auto inst = propara_like({"Prior", "Create", "Move", "Destroy"});
    auto a = decode_stepwise(inst, matrix);
    CHECK(a.choice == baseline_argmax(inst).choice);
}

TEST_CASE("stepwise never changes the step-1 action") {
    auto matrix = default_action_transitions();
    for (const auto& first : matrix.labels) {
        auto inst = propara_like({first, "Move", "Move"});
        auto a = decode_stepwise(inst, matrix);
        CHECK(a.at("action[0]") == baseline_argmax(inst).at("action[0]"));
    }
}

TEST_CASE("stepwise re-selects locations under coupling constraints") {
    GeneratorSpec spec;
    spec.kind = FixtureKind::Sequence;
    spec.num_instances = 20;
    spec.seed = 5;
    spec.steps = 6;
    auto problem = generate(spec);
    REQUIRE(validate_problem(problem).empty());
    for (const auto& inst : problem.instances) {
        auto coupling = coupling_constraints(inst);
        auto trans = transition_constraints(inst, *inst.transitions);
        auto program = coupling;
        program.insert(program.end(), trans.begin(), trans.end());
        auto a = decode_stepwise(inst, *inst.transitions, program);
        CHECK(check_satisfaction(a, program).rate() == 100.0);
    }
}

TEST_CASE("decoder outputs satisfy their constraint programs") {
    auto inst = flora_fauna({0.3, 0.7}, {0.40, 0.15, 0.25, 0.20});
    auto meta = HierarchyMeta::from_instance(inst);
    auto program = hierarchy_constraints(inst);
    CHECK(check_satisfaction(decode_top_down(inst, meta), program).rate() == 100.0);
    CHECK(check_satisfaction(decode_bottom_up(inst, meta), program).rate() == 100.0);
}
