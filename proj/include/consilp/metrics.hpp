#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "consilp/constraint.hpp"
#include "consilp/model.hpp"

namespace consilp {

struct MetricsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Change tallies between two assignments. +C / -C are percentages of
/// the changed decisions only; both report 0 when nothing changed.
struct ChangeCounts {
    int changed = 0;
    int improved = 0; // wrong -> right
    int worsened = 0; // right -> wrong

    double plus_c() const { return changed == 0 ? 0.0 : 100.0 * improved / changed; }
    double minus_c() const { return changed == 0 ? 0.0 : 100.0 * worsened / changed; }
    void add(const ChangeCounts& other);
};

struct ChangeReport {
    ChangeCounts total;
    std::map<std::string, ChangeCounts> per_role;
    bool has_gold = false;

    void merge(const ChangeReport& other);
};

/// Accuracy and macro-F1 for one group role, plus the raw confusion
/// tallies they are computed from.
struct RoleScores {
    int correct = 0;
    int total = 0;
    // Per label: true positives, false positives, false negatives.
    std::map<std::string, std::array<int, 3>> confusion;

    double accuracy() const { return total == 0 ? 0.0 : 100.0 * correct / total; }
    double macro_f1() const;
};

struct EvalReport {
    std::map<std::string, RoleScores> per_role;
    ChangeReport changes;
    double satisfaction = 100.0;
    double set_correctness = 0.0;
    bool has_gold = false;

    /// Unweighted mean of per-role accuracies.
    double average_accuracy() const;
    /// Accuracy over all decisions pooled (weighs roles by count).
    double pooled_accuracy() const;
};

/// Compares `before` and `after` over one instance. Gold may be empty,
/// in which case only the change count is populated.
ChangeReport evaluate_changes(const Instance& instance, const Assignment& before,
                              const Assignment& after,
                              const std::map<std::string, int>& gold);

/// 100 * satisfied / total ground constraints (100 when there are none).
double satisfaction_rate(const Assignment& assignment,
                         const std::vector<GroundConstraint>& constraints);

/// Percentage of instances whose groups are all simultaneously correct.
/// Throws MetricsError when an instance lacks gold.
double set_correctness(const std::vector<Instance>& instances,
                       const std::vector<Assignment>& assignments);

/// Accuracy and macro-F1 aggregated per group role across instances.
std::map<std::string, RoleScores> per_group_scores(
    const std::vector<Instance>& instances, const std::vector<Assignment>& assignments);

} // namespace consilp
