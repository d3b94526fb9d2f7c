#include "consilp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace consilp {

int DecisionGroup::label_index(std::string_view name) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return static_cast<int>(i);
    return -1;
}

std::string DecisionGroup::role() const {
    if (level) return "level" + std::to_string(*level);
    auto pos = id.find('[');
    if (pos != std::string::npos && pos > 0) return id.substr(0, pos);
    return id;
}

int TransitionMatrix::label_index(std::string_view name) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return static_cast<int>(i);
    return -1;
}

const DecisionGroup* Instance::find_group(std::string_view group_id) const {
    for (const auto& g : groups)
        if (g.id == group_id) return &g;
    return nullptr;
}

int argmax_index(std::span<const double> values) {
    int best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = static_cast<int>(i);
    return best;
}

namespace {

void validate_group(const Instance& inst, DecisionGroup& g, const Problem& problem,
                    std::vector<std::string>& errors) {
    auto where = [&] {
        return "instance '" + inst.id + "' group '" + g.id + "': ";
    };
    if (g.labels.size() < 2)
        errors.push_back(where() + "needs at least 2 labels");
    if (g.labels.size() != g.probs.size()) {
        errors.push_back(where() + "label/probability length mismatch");
        return;
    }
    std::set<std::string> seen;
    for (const auto& l : g.labels) {
        if (l.empty()) errors.push_back(where() + "empty label");
        if (!seen.insert(l).second)
            errors.push_back(where() + "duplicate label '" + l + "'");
    }
    double sum = 0.0;
    bool range_ok = true;
    for (double p : g.probs) {
        if (p < 0.0 || p > 1.0) range_ok = false;
        sum += p;
    }
    if (!range_ok)
        errors.push_back(where() + "probability outside [0,1]");
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
        std::ostringstream os;
        os << where() << "probability sum " << sum << " exceeds tolerance";
        errors.push_back(os.str());
    } else if (sum > 0.0 && std::abs(sum - 1.0) > 1e-12) {
        // Renormalize only genuine drift; a sum off by a few ulps is left
        // untouched so that serialization round-trips byte-identically.
        for (double& p : g.probs) p /= sum;
    }
    if (!problem.models.count(g.model_id))
        errors.push_back(where() + "unknown model id '" + g.model_id + "'");
    if (g.none_index && (*g.none_index < 0 ||
                         *g.none_index >= static_cast<int>(g.labels.size())))
        errors.push_back(where() + "'None' label index out of range");
}

void validate_instance(Instance& inst, const Problem& problem,
                       std::vector<std::string>& errors) {
    std::set<std::string> group_ids;
    for (auto& g : inst.groups) {
        if (!group_ids.insert(g.id).second)
            errors.push_back("instance '" + inst.id + "': duplicate group id '" +
                             g.id + "'");
        validate_group(inst, g, problem, errors);
    }
    for (const auto& [gid, idx] : inst.gold) {
        const auto* g = inst.find_group(gid);
        if (!g) {
            errors.push_back("instance '" + inst.id + "': gold names unknown group '" +
                             gid + "'");
        } else if (idx < 0 || idx >= static_cast<int>(g->size())) {
            errors.push_back("instance '" + inst.id + "': gold index out of range for group '" +
                             gid + "'");
        }
    }
    if (!inst.parent.empty()) {
        // Every parent reference must name a label on some shallower level.
        std::set<std::string> known_labels;
        for (const auto& g : inst.groups)
            for (const auto& l : g.labels) known_labels.insert(l);
        for (const auto& [child, par] : inst.parent) {
            if (!known_labels.count(child))
                errors.push_back("instance '" + inst.id + "': parent map child '" +
                                 child + "' is not a label of any group");
            if (!known_labels.count(par))
                errors.push_back("instance '" + inst.id + "': dangling parent reference '" +
                                 par + "' (child '" + child + "')");
        }
    }
    if (inst.transitions) {
        const auto& t = *inst.transitions;
        bool square = t.valid.size() == t.labels.size();
        for (const auto& row : t.valid)
            if (row.size() != t.labels.size()) square = false;
        if (!square) {
            errors.push_back("instance '" + inst.id + "': transition matrix is not square");
        } else {
            for (std::size_t a = 0; a < t.labels.size(); ++a) {
                bool any = false;
                for (std::size_t b = 0; b < t.labels.size(); ++b)
                    if (t.valid[a][b]) any = true;
                if (!any)
                    errors.push_back("instance '" + inst.id + "': transition label '" +
                                     t.labels[a] + "' has no valid successor");
            }
        }
    }
}

} // namespace

std::vector<std::string> validate_problem(Problem& problem) {
    std::vector<std::string> errors;
    for (const auto& [id, m] : problem.models) {
        if (m.accuracy <= 0.0)
            errors.push_back("model '" + id + "': accuracy must be strictly positive");
        for (const auto& [label, p] : m.priors)
            if (p <= 0.0)
                errors.push_back("model '" + id + "': prior for '" + label +
                                 "' must be strictly positive");
    }
    std::set<std::string> instance_ids;
    for (auto& inst : problem.instances) {
        if (!instance_ids.insert(inst.id).second)
            errors.push_back("duplicate instance id '" + inst.id + "'");
        validate_instance(inst, problem, errors);
    }
    return errors;
}

Assignment baseline_argmax(const Instance& instance) {
    Assignment out;
    out.provenance = "baseline";
    for (const auto& g : instance.groups)
        out.choice[g.id] = argmax_index(g.probs);
    return out;
}

} // namespace consilp
