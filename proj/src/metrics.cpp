#include "consilp/metrics.hpp"

namespace consilp {

void ChangeCounts::add(const ChangeCounts& other) {
    changed += other.changed;
    improved += other.improved;
    worsened += other.worsened;
}

void ChangeReport::merge(const ChangeReport& other) {
    total.add(other.total);
    has_gold = has_gold || other.has_gold;
    for (const auto& [role, c] : other.per_role) per_role[role].add(c);
}

double RoleScores::macro_f1() const {
    double sum = 0.0;
    int labels = 0;
    for (const auto& [label, c] : confusion) {
        auto [tp, fp, fn] = c;
        if (tp + fp + fn == 0) continue; // never predicted, never gold
        ++labels;
        if (tp > 0) sum += 2.0 * tp / (2.0 * tp + fp + fn);
    }
    return labels == 0 ? 0.0 : 100.0 * sum / labels;
}

double EvalReport::average_accuracy() const {
    if (per_role.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [role, s] : per_role) sum += s.accuracy();
    return sum / per_role.size();
}

double EvalReport::pooled_accuracy() const {
    int correct = 0, total = 0;
    for (const auto& [role, s] : per_role) {
        correct += s.correct;
        total += s.total;
    }
    return total == 0 ? 0.0 : 100.0 * correct / total;
}

ChangeReport evaluate_changes(const Instance& instance, const Assignment& before,
                              const Assignment& after,
                              const std::map<std::string, int>& gold) {
    ChangeReport report;
    report.has_gold = !gold.empty();
    for (const auto& g : instance.groups) {
        auto b = before.choice.find(g.id);
        auto a = after.choice.find(g.id);
        if (b == before.choice.end() || a == after.choice.end())
            throw MetricsError("assignments do not cover group '" + g.id + "'");
        report.per_role.try_emplace(g.role());
        if (b->second == a->second) continue;
        ChangeCounts c;
        c.changed = 1;
        auto gd = gold.find(g.id);
        if (gd != gold.end()) {
            const bool before_right = b->second == gd->second;
            const bool after_right = a->second == gd->second;
            if (!before_right && after_right) c.improved = 1;
            if (before_right && !after_right) c.worsened = 1;
        }
        report.total.add(c);
        report.per_role[g.role()].add(c);
    }
    return report;
}

double satisfaction_rate(const Assignment& assignment,
                         const std::vector<GroundConstraint>& constraints) {
    return check_satisfaction(assignment, constraints).rate();
}

double set_correctness(const std::vector<Instance>& instances,
                       const std::vector<Assignment>& assignments) {
    if (instances.size() != assignments.size())
        throw MetricsError("instance/assignment count mismatch");
    if (instances.empty()) return 0.0;
    int fully_correct = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (!inst.has_gold())
            throw MetricsError("set correctness needs gold for instance '" + inst.id +
                               "'");
        bool all = true;
        for (const auto& g : inst.groups) {
            auto gd = inst.gold.find(g.id);
            if (gd == inst.gold.end())
                throw MetricsError("gold missing group '" + g.id + "' in instance '" +
                                   inst.id + "'");
            if (assignments[i].at(g.id) != gd->second) all = false;
        }
        if (all) ++fully_correct;
    }
    return 100.0 * fully_correct / instances.size();
}

std::map<std::string, RoleScores> per_group_scores(
    const std::vector<Instance>& instances,
    const std::vector<Assignment>& assignments) {
    if (instances.size() != assignments.size())
        throw MetricsError("instance/assignment count mismatch");
    std::map<std::string, RoleScores> out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (!inst.has_gold())
            throw MetricsError("per-group scores need gold for instance '" + inst.id +
                               "'");
        for (const auto& g : inst.groups) {
            auto gd = inst.gold.find(g.id);
            if (gd == inst.gold.end())
                throw MetricsError("gold missing group '" + g.id + "' in instance '" +
                                   inst.id + "'");
            auto& role = out[g.role()];
            const int pred = assignments[i].at(g.id);
            ++role.total;
            if (pred == gd->second) {
                ++role.correct;
                ++role.confusion[g.labels[pred]][0]; // TP
            } else {
                ++role.confusion[g.labels[pred]][1];        // FP
                ++role.confusion[g.labels[gd->second]][2];  // FN
            }
            // Make sure every label of the group appears in the tally so
            // the "never predicted, never gold" exclusion is explicit.
            for (const auto& l : g.labels) role.confusion.try_emplace(l);
        }
    }
    return out;
}

} // namespace consilp
