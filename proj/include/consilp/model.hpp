#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace consilp {

/// One multi-class decision: a set of mutually exclusive labels with a
/// probability per label, produced by a single model.
struct DecisionGroup {
    std::string id;
    std::vector<std::string> labels;
    std::vector<double> probs;
    std::string model_id;

    // Structural tags. `level` marks a hierarchy level (1 = root level),
    // `seq_index` a position in a sequence, `none_index` the index of a
    // designated 'None' label.
    std::optional<int> level;
    std::optional<int> seq_index;
    std::optional<int> none_index;

    std::size_t size() const { return labels.size(); }

    /// Index of `name` in the label list, -1 if absent.
    int label_index(std::string_view name) const;

    /// Role key used for metric aggregation: "level<k>" for hierarchy
    /// groups, the template base name for sequence groups ("action[3]"
    /// reports as "action"), otherwise the group id.
    std::string role() const;
};

struct ModelMeta {
    std::string id;
    double accuracy = 1.0;
    // Optional empirical label priors, keyed by label name. Empty means
    // no priors available for this model.
    std::map<std::string, double> priors;
};

/// Boolean successor-validity matrix over a sequence group's label set.
/// valid[a][b] is true when label b may follow label a.
struct TransitionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<bool>> valid;

    int label_index(std::string_view name) const;
    bool allows(int from, int to) const { return valid[from][to]; }
};

/// One test example's interrelated decisions.
struct Instance {
    std::string id;
    std::vector<DecisionGroup> groups;

    // Gold assignment, group id -> label index. Empty when unlabeled.
    std::map<std::string, int> gold;

    // Hierarchy metadata: child label -> parent label on the previous level.
    std::map<std::string, std::string> parent;

    std::optional<TransitionMatrix> transitions;

    const DecisionGroup* find_group(std::string_view group_id) const;
    bool has_gold() const { return !gold.empty(); }
};

struct Problem {
    std::vector<Instance> instances;
    std::map<std::string, ModelMeta> models;
};

/// One chosen label per group, with provenance
/// (baseline | sequential:<strategy> | ilp:<scoring>).
struct Assignment {
    std::map<std::string, int> choice;
    std::string provenance;

    int at(const std::string& group_id) const { return choice.at(group_id); }
};

/// Index of the largest element; ties broken by lowest index.
int argmax_index(std::span<const double> values);

/// Checks every type invariant and cross-reference in the problem.
/// Returns the list of violations; an empty list means the problem is
/// valid. Probability vectors within the 1e-6 sum tolerance are
/// renormalized in place to sum exactly 1.
std::vector<std::string> validate_problem(Problem& problem);

/// Per-group independent argmax (the unconstrained baseline).
Assignment baseline_argmax(const Instance& instance);

inline constexpr double kProbSumTolerance = 1e-6;

} // namespace consilp
