#include "consilp/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace consilp {

namespace {

// Bit-level uniform doubles in [0,1); avoids the implementation-defined
// std::uniform_real_distribution so seeded output is portable.
double next_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int next_int(std::mt19937_64& rng, int bound) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(bound));
}

std::mt19937_64 instance_rng(std::uint64_t master_seed, int index) {
    return std::mt19937_64(master_seed + 0x9E3779B97F4A7C15ull * (index + 1));
}

// A probability vector whose argmax is `target`, mixing uniform noise
// with a one-hot spike; `sharpness` controls the entropy.
std::vector<double> noisy_probs(std::mt19937_64& rng, int size, int target,
                                double sharpness) {
    std::vector<double> p(size);
    double sum = 0.0;
    for (double& x : p) {
        x = 0.05 + next_double(rng);
        sum += x;
    }
    for (double& x : p) x = x / sum * (1.0 - sharpness);
    p[target] += sharpness;
    // If noise still beats the spike, swap the mass onto the target.
    int a = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    if (a != target) std::swap(p[a], p[target]);
    return p;
}

int pick_argmax(std::mt19937_64& rng, int gold, int size, double accuracy) {
    if (next_double(rng) < accuracy) return gold;
    int wrong = next_int(rng, size - 1);
    return wrong >= gold ? wrong + 1 : wrong;
}

double target_for(const GeneratorSpec& spec, std::size_t group_index) {
    if (spec.accuracy_targets.empty()) return 0.85;
    return spec.accuracy_targets[group_index % spec.accuracy_targets.size()];
}

std::string level_label(int level, int j) {
    return "L" + std::to_string(level) + "_" + std::to_string(j);
}

Problem generate_hierarchy(const GeneratorSpec& spec) {
    Problem problem;
    const int depth = static_cast<int>(spec.level_sizes.size());

    // Shared label inventory and parent structure across instances.
    std::vector<std::vector<std::string>> labels(depth);
    std::vector<int> none_idx(depth, -1);
    std::map<std::string, std::string> parent;
    std::vector<int> real_count(depth);
    for (int k = 0; k < depth; ++k) {
        int size = spec.level_sizes[k];
        bool with_none = spec.none_labels && k > 0;
        real_count[k] = with_none ? size - 1 : size;
        for (int j = 0; j < real_count[k]; ++j)
            labels[k].push_back(level_label(k + 1, j));
        if (with_none) {
            none_idx[k] = real_count[k];
            labels[k].push_back("L" + std::to_string(k + 1) + "_none");
        }
        if (k > 0)
            for (int j = 0; j < real_count[k]; ++j)
                parent[labels[k][j]] = labels[k - 1][j % real_count[k - 1]];
    }

    for (int k = 0; k < depth; ++k) {
        ModelMeta meta;
        meta.id = "model_level" + std::to_string(k + 1);
        meta.accuracy = target_for(spec, k);
        problem.models[meta.id] = meta;
    }

    std::map<std::string, std::map<std::string, int>> gold_counts;
    for (int i = 0; i < spec.num_instances; ++i) {
        auto rng = instance_rng(spec.seed, i);
        Instance inst;
        inst.id = "h" + std::to_string(i);
        inst.parent = parent;

        // Consistent gold chain, top-down. A level without a child for
        // the chosen parent goes to 'None' (and stays there below).
        std::vector<int> gold(depth);
        gold[0] = next_int(rng, real_count[0]);
        for (int k = 1; k < depth; ++k) {
            if (gold[k - 1] == none_idx[k - 1]) {
                gold[k] = none_idx[k];
                continue;
            }
            std::vector<int> children;
            for (int j = 0; j < real_count[k]; ++j)
                if (parent.at(labels[k][j]) == labels[k - 1][gold[k - 1]])
                    children.push_back(j);
            if (children.empty()) {
                if (none_idx[k] < 0)
                    throw std::invalid_argument(
                        "hierarchy profile with childless parents requires none_labels");
                gold[k] = none_idx[k];
            } else {
                gold[k] = children[next_int(rng, static_cast<int>(children.size()))];
            }
        }

        for (int k = 0; k < depth; ++k) {
            DecisionGroup g;
            g.id = "level" + std::to_string(k + 1);
            g.labels = labels[k];
            g.model_id = "model_level" + std::to_string(k + 1);
            g.level = k + 1;
            if (none_idx[k] >= 0) g.none_index = none_idx[k];
            int m = pick_argmax(rng, gold[k], static_cast<int>(g.labels.size()),
                                target_for(spec, k));
            g.probs = noisy_probs(rng, static_cast<int>(g.labels.size()), m,
                                  spec.sharpness);
            inst.gold[g.id] = gold[k];
            ++gold_counts[g.model_id][g.labels[gold[k]]];
            inst.groups.push_back(std::move(g));
        }
        problem.instances.push_back(std::move(inst));
    }

    // Empirical priors from the gold tallies, Laplace-smoothed so every
    // label keeps a strictly positive prior.
    for (int k = 0; k < depth; ++k) {
        auto& meta = problem.models["model_level" + std::to_string(k + 1)];
        const auto& counts = gold_counts[meta.id];
        double denom = static_cast<double>(spec.num_instances + labels[k].size());
        for (const auto& name : labels[k]) {
            auto it = counts.find(name);
            int c = it == counts.end() ? 0 : it->second;
            meta.priors[name] = (c + 1.0) / denom;
        }
    }
    return problem;
}

Problem generate_sequence(const GeneratorSpec& spec) {
    Problem problem;
    const auto matrix = default_action_transitions();
    const int num_actions = static_cast<int>(matrix.labels.size());

    ModelMeta action_model{"model_action", target_for(spec, 0), {}};
    ModelMeta location_model{"model_location", target_for(spec, 1), {}};
    problem.models[action_model.id] = action_model;
    problem.models[location_model.id] = location_model;

    for (int i = 0; i < spec.num_instances; ++i) {
        auto rng = instance_rng(spec.seed, i);
        Instance inst;
        inst.id = "s" + std::to_string(i);
        inst.transitions = matrix;

        int num_locations =
            spec.min_locations +
            next_int(rng, spec.max_locations - spec.min_locations + 1);
        std::vector<std::string> loc_labels;
        for (int j = 0; j < num_locations; ++j)
            loc_labels.push_back("loc_" + std::to_string(j));

        // Gold actions: a random walk through the validity matrix.
        std::vector<int> gold_actions(spec.steps);
        gold_actions[0] = next_int(rng, num_actions);
        for (int t = 1; t < spec.steps; ++t) {
            std::vector<int> valid;
            for (int b = 0; b < num_actions; ++b)
                if (matrix.valid[gold_actions[t - 1]][b]) valid.push_back(b);
            gold_actions[t] = valid[next_int(rng, static_cast<int>(valid.size()))];
        }
        // Gold locations: change on Move, otherwise stay put.
        std::vector<int> gold_locs(spec.steps);
        gold_locs[0] = next_int(rng, num_locations);
        const int move = matrix.label_index("Move");
        for (int t = 1; t < spec.steps; ++t) {
            if (gold_actions[t] == move) {
                int other = next_int(rng, num_locations - 1);
                gold_locs[t] = other >= gold_locs[t - 1] ? other + 1 : other;
            } else {
                gold_locs[t] = gold_locs[t - 1];
            }
        }

        for (int t = 0; t < spec.steps; ++t) {
            DecisionGroup a;
            a.id = "action[" + std::to_string(t) + "]";
            a.labels = matrix.labels;
            a.model_id = action_model.id;
            a.seq_index = t;
            int m = pick_argmax(rng, gold_actions[t], num_actions,
                                target_for(spec, 0));
            a.probs = noisy_probs(rng, num_actions, m, spec.sharpness);
            inst.gold[a.id] = gold_actions[t];
            inst.groups.push_back(std::move(a));

            DecisionGroup l;
            l.id = "location[" + std::to_string(t) + "]";
            l.labels = loc_labels;
            l.model_id = location_model.id;
            l.seq_index = t;
            int ml = pick_argmax(rng, gold_locs[t], num_locations, target_for(spec, 1));
            l.probs = noisy_probs(rng, num_locations, ml, spec.sharpness);
            inst.gold[l.id] = gold_locs[t];
            inst.groups.push_back(std::move(l));
        }
        problem.instances.push_back(std::move(inst));
    }
    return problem;
}

} // namespace

Problem generate(const GeneratorSpec& spec) {
    return spec.kind == FixtureKind::Hierarchy ? generate_hierarchy(spec)
                                               : generate_sequence(spec);
}

std::vector<GroundConstraint> coupling_constraints(const Instance& instance) {
    std::vector<GroundConstraint> out;
    const int move_t = [&] {
        for (const auto& g : instance.groups)
            if (g.id.starts_with("action[")) return g.label_index("Move");
        return -1;
    }();
    if (move_t < 0) return out;

    for (int t = 1;; ++t) {
        const auto* action = instance.find_group("action[" + std::to_string(t) + "]");
        const auto* here = instance.find_group("location[" + std::to_string(t) + "]");
        const auto* prev =
            instance.find_group("location[" + std::to_string(t - 1) + "]");
        if (!action || !here || !prev) break;
        for (int l = 0; l < static_cast<int>(here->size()); ++l) {
            int pl = prev->label_index(here->labels[l]);
            if (pl < 0) continue;
            GroundConstraint gc;
            gc.kind = StmtKind::Imply;
            gc.literals = {{action->id, move_t, false},
                           {prev->id, pl, false},
                           {here->id, l, true}};
            out.push_back(std::move(gc));
        }
    }
    return out;
}

HeterogeneityFixture heterogeneity_fixture() {
    HeterogeneityFixture fx;
    ModelMeta small_model{"m_small", 1.0, {}};
    ModelMeta large_model{"m_large", 1.0, {}};
    fx.problem.models[small_model.id] = small_model;
    fx.problem.models[large_model.id] = large_model;

    Instance inst;
    inst.id = "hetero";

    DecisionGroup small;
    small.id = "small";
    small.labels = {"a0", "a1"};
    small.probs = {0.6, 0.4};
    small.model_id = small_model.id;

    DecisionGroup large;
    large.id = "large";
    large.model_id = large_model.id;
    for (int j = 0; j < 10; ++j) large.labels.push_back("b" + std::to_string(j));
    large.probs = {0.30, 0.25, 0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.03};

    inst.groups.push_back(small);
    inst.groups.push_back(large);
    fx.problem.instances.push_back(std::move(inst));

    // The two argmax labels conflict. Raw weights: dropping large.b0
    // costs 0.05, dropping small.a0 costs 0.20, so the size-10 group
    // moves. After the prior factor (x2 / x10): dropping large.b0 costs
    // 0.5, dropping small.a0 costs 0.4, so the size-2 group moves.
    GroundConstraint nand;
    nand.kind = StmtKind::Nand;
    nand.literals = {{"small", 0, false}, {"large", 0, false}};
    fx.constraints.push_back(nand);
    for (const auto& g : fx.problem.instances[0].groups) {
        GroundConstraint eo;
        eo.kind = StmtKind::ExactlyOne;
        for (int l = 0; l < static_cast<int>(g.size()); ++l)
            eo.literals.push_back({g.id, l, false});
        fx.constraints.push_back(std::move(eo));
    }
    return fx;
}

} // namespace consilp
