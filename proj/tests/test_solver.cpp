#include <doctest.h>

#include <cmath>
#include <random>

#include "consilp/solver.hpp"
#include "helpers.hpp"

using namespace consilp;
using namespace consilp::testing;

namespace {

IlpProblem single_group(std::vector<double> weights) {
    IlpProblem p;
    p.groups.push_back({"g", std::move(weights)});
    return p;
}

LinearConstraint nand(const std::string& ga, int la, const std::string& gb, int lb) {
    return {{{ga, la, 1}, {gb, lb, 1}}, Comparator::LessEq, 1};
}

// Random selection problems with random NAND / IMPLY side constraints.
IlpProblem random_problem(std::mt19937_64& rng) {
    IlpProblem p;
    int num_groups = 1 + static_cast<int>(rng() % 4);
    for (int g = 0; g < num_groups; ++g) {
        int size = 2 + static_cast<int>(rng() % 4);
        std::vector<double> w;
        for (int l = 0; l < size; ++l)
            w.push_back(static_cast<double>(rng() >> 11) * 0x1.0p-53);
        p.groups.push_back({"g" + std::to_string(g), std::move(w)});
    }
    int num_constraints = static_cast<int>(rng() % 7);
    for (int c = 0; c < num_constraints; ++c) {
        int ga = static_cast<int>(rng() % num_groups);
        int gb = static_cast<int>(rng() % num_groups);
        int la = static_cast<int>(rng() % p.groups[ga].weights.size());
        int lb = static_cast<int>(rng() % p.groups[gb].weights.size());
        if (rng() % 2 == 0) {
            p.constraints.push_back(nand(p.groups[ga].id, la, p.groups[gb].id, lb));
        } else {
            // imply a -> b
            p.constraints.push_back({{{p.groups[ga].id, la, 1}, {p.groups[gb].id, lb, -1}},
                                     Comparator::LessEq,
                                     0});
        }
    }
    return p;
}

} // namespace

TEST_CASE("solve: unconstrained single group is the argmax") {
    auto res = solve(single_group({0.2, 0.5, 0.3}));
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.assignment.at("g") == 1);
    CHECK(res.objective == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("solve: nand on the top labels, frozen enumeration optimum") {
    IlpProblem p;
    p.groups.push_back({"A", {0.6, 0.4}});
    p.groups.push_back({"B", {0.45, 0.30, 0.25}});
    p.constraints.push_back(nand("A", 0, "B", 0));
    auto res = solve(p);
    REQUIRE(res.status == SolveStatus::Optimal);
    // Brute-forced over the 6 joint assignments: A.0 + B.1 = 0.90.
    CHECK(res.assignment.at("A") == 0);
    CHECK(res.assignment.at("B") == 1);
    CHECK(res.objective == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("solve: contradictory self-nands are infeasible") {
    IlpProblem p;
    p.groups.push_back({"X", {0.5, 0.5}});
    p.constraints.push_back(nand("X", 0, "X", 0)); // 2 y0 <= 1, forces y0 = 0
    p.constraints.push_back(nand("X", 1, "X", 1));
    p.constraints.push_back({{{"X", 0, 1}, {"X", 1, 1}}, Comparator::Eq, 1});
    auto res = solve(p);
    CHECK(res.status == SolveStatus::Infeasible);
}

TEST_CASE("solve: node limit reported") {
    IlpProblem p;
    for (int g = 0; g < 8; ++g)
        p.groups.push_back({"g" + std::to_string(g), {0.5, 0.5}});
    SolveConfig cfg;
    cfg.node_limit = 3;
    CHECK(solve(p, cfg).status == SolveStatus::NodeLimit);
}

TEST_CASE("brute force: unconstrained equals per-group argmax") {
    IlpProblem p;
    p.groups.push_back({"a", {0.9, 0.1}});
    p.groups.push_back({"b", {0.1, 0.2, 0.7}});
    auto res = brute_force(p);
    REQUIRE(res.status == SolveStatus::Optimal);
    CHECK(res.assignment.at("a") == 0);
    CHECK(res.assignment.at("b") == 2);
}

TEST_CASE("brute force: search-space guard") {
    IlpProblem p;
    for (int g = 0; g < 21; ++g)
        p.groups.push_back({"g" + std::to_string(g), {0.5, 0.5}});
    CHECK_THROWS_AS(brute_force(p), SolverError);
}

TEST_CASE("oracle equivalence over randomized problems") {
    std::mt19937_64 rng(2024);
    int feasible = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto p = random_problem(rng);
        auto a = solve(p);
        auto b = brute_force(p);
        REQUIRE(a.status == b.status);
        if (a.status != SolveStatus::Optimal) continue;
        ++feasible;
        CHECK(std::abs(a.objective - b.objective) <= 1e-9);
        CHECK(a.assignment.choice == b.assignment.choice);
    }
    CHECK(feasible > 500); // most random problems should be feasible
}

TEST_CASE("tie-break: lexicographically smallest tuple in group order") {
    IlpProblem p;
    p.groups.push_back({"a", {0.5, 0.5}});
    p.groups.push_back({"b", {0.25, 0.25, 0.25, 0.25}});
    auto s = solve(p);
    auto bf = brute_force(p);
    CHECK(s.assignment.at("a") == 0);
    CHECK(s.assignment.at("b") == 0);
    CHECK(bf.assignment.choice == s.assignment.choice);

    // Constraint knocks out the (0, 0) corner; next in lex order wins.
    p.constraints.push_back(nand("a", 0, "b", 0));
    auto s2 = solve(p);
    auto bf2 = brute_force(p);
    CHECK(s2.assignment.at("a") == 0);
    CHECK(s2.assignment.at("b") == 1);
    CHECK(bf2.assignment.choice == s2.assignment.choice);
}

TEST_CASE("positive rescaling leaves the assignment unchanged") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        auto p = random_problem(rng);
        auto base = solve(p);
        if (base.status != SolveStatus::Optimal) continue;
        auto scaled = p;
        const double c = 37.5;
        for (auto& g : scaled.groups)
            for (auto& w : g.weights) w *= c;
        auto res = solve(scaled);
        REQUIRE(res.status == SolveStatus::Optimal);
        CHECK(res.assignment.choice == base.assignment.choice);
        CHECK(res.objective == doctest::Approx(base.objective * c).epsilon(1e-9));
    }
}

TEST_CASE("optimal objective equals the sum of chosen weights") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        auto p = random_problem(rng);
        auto res = solve(p);
        if (res.status != SolveStatus::Optimal) continue;
        double sum = 0.0;
        for (std::size_t g = 0; g < p.groups.size(); ++g)
            sum += p.groups[g].weights[res.assignment.at(p.groups[g].id)];
        CHECK(std::abs(sum - res.objective) <= 1e-9);
        // And the assignment satisfies every constraint.
        for (const auto& c : p.constraints) CHECK(linear_holds(c, res.assignment));
    }
}

TEST_CASE("build_ilp validates group and weight references") {
    Instance inst;
    inst.id = "i";
    inst.groups.push_back(make_group("g", {0.5, 0.5}));
    std::vector<WeightVector> ok = {{"g", {1.0, 2.0}, 1.0}};
    CHECK_NOTHROW(build_ilp(inst, ok, {}));
    std::vector<WeightVector> missing = {{"other", {1.0, 2.0}, 1.0}};
    CHECK_THROWS_AS(build_ilp(inst, missing, {}), SolverError);
    std::vector<LinearConstraint> bad = {{{{"nope", 0, 1}}, Comparator::LessEq, 1}};
    CHECK_THROWS_AS(build_ilp(inst, ok, bad), SolverError);
}
