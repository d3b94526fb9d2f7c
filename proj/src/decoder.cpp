#include "consilp/decoder.hpp"

#include <algorithm>
#include <set>

namespace consilp {

namespace {

const DecisionGroup& group_or_throw(const Instance& inst, const std::string& id) {
    const auto* g = inst.find_group(id);
    if (!g) throw DecodeError("instance '" + inst.id + "' has no group '" + id + "'");
    return *g;
}

// Argmax restricted to a candidate set; ties by lowest index.
int best_among(const DecisionGroup& g, const std::vector<int>& candidates) {
    int best = -1;
    for (int l : candidates)
        if (best < 0 || g.probs[l] > g.probs[best]) best = l;
    return best;
}

} // namespace

HierarchyMeta HierarchyMeta::from_instance(const Instance& instance) {
    HierarchyMeta meta;
    std::vector<const DecisionGroup*> levels;
    for (const auto& g : instance.groups)
        if (g.level) levels.push_back(&g);
    std::sort(levels.begin(), levels.end(),
              [](const auto* a, const auto* b) { return *a->level < *b->level; });
    for (const auto* g : levels) {
        meta.level_group_ids.push_back(g->id);
        meta.none_index.push_back(g->none_index.value_or(-1));
    }
    meta.parent = instance.parent;
    return meta;
}

Assignment decode_top_down(const Instance& instance, const HierarchyMeta& hierarchy) {
    if (hierarchy.depth() == 0)
        throw DecodeError("top-down decoding needs hierarchy metadata");
    Assignment out;
    out.provenance = "sequential:top_down";

    std::string chosen_parent;
    for (std::size_t k = 0; k < hierarchy.depth(); ++k) {
        const auto& g = group_or_throw(instance, hierarchy.level_group_ids[k]);
        int pick;
        if (k == 0) {
            pick = argmax_index(g.probs);
        } else {
            std::vector<int> candidates;
            for (int l = 0; l < static_cast<int>(g.size()); ++l) {
                if (l == hierarchy.none_index[k]) {
                    candidates.push_back(l);
                    continue;
                }
                auto it = hierarchy.parent.find(g.labels[l]);
                if (it != hierarchy.parent.end() && it->second == chosen_parent)
                    candidates.push_back(l);
            }
            pick = best_among(g, candidates);
            if (pick < 0)
                throw DecodeError("no child of '" + chosen_parent +
                                  "' at level group '" + g.id + "' and no 'None' label");
        }
        out.choice[g.id] = pick;
        chosen_parent = g.labels[pick];
    }
    // Groups outside the hierarchy keep their argmax.
    for (const auto& g : instance.groups)
        if (!out.choice.count(g.id)) out.choice[g.id] = argmax_index(g.probs);
    return out;
}

namespace {

// Walks choices upward from `from_level`: a 'None' choice below leaves a
// level at its own argmax, a real choice forces the parent chain.
void propagate_up(const Instance& instance, const HierarchyMeta& hierarchy,
                  std::vector<int>& picks, int from_level) {
    for (int k = from_level; k >= 0; --k) {
        const auto& below = group_or_throw(instance, hierarchy.level_group_ids[k + 1]);
        const auto& g = group_or_throw(instance, hierarchy.level_group_ids[k]);
        int child_pick = picks[k + 1];
        if (child_pick == hierarchy.none_index[k + 1]) {
            picks[k] = argmax_index(g.probs);
            continue;
        }
        auto it = hierarchy.parent.find(below.labels[child_pick]);
        if (it == hierarchy.parent.end())
            throw DecodeError("label '" + below.labels[child_pick] +
                              "' has no parent in the hierarchy map");
        int pidx = g.label_index(it->second);
        if (pidx < 0)
            throw DecodeError("parent '" + it->second + "' is not a label of group '" +
                              g.id + "'");
        picks[k] = pidx;
    }
}

Assignment finish_hierarchy(const Instance& instance, const HierarchyMeta& hierarchy,
                            const std::vector<int>& picks, std::string provenance) {
    Assignment out;
    out.provenance = std::move(provenance);
    for (std::size_t k = 0; k < hierarchy.depth(); ++k)
        out.choice[hierarchy.level_group_ids[k]] = picks[k];
    for (const auto& g : instance.groups)
        if (!out.choice.count(g.id)) out.choice[g.id] = argmax_index(g.probs);
    return out;
}

} // namespace

Assignment decode_bottom_up(const Instance& instance, const HierarchyMeta& hierarchy) {
    if (hierarchy.depth() == 0)
        throw DecodeError("bottom-up decoding needs hierarchy metadata");
    const int deepest = static_cast<int>(hierarchy.depth()) - 1;
    std::vector<int> picks(hierarchy.depth(), -1);
    picks[deepest] =
        argmax_index(group_or_throw(instance, hierarchy.level_group_ids[deepest]).probs);
    propagate_up(instance, hierarchy, picks, deepest - 1);
    return finish_hierarchy(instance, hierarchy, picks, "sequential:bottom_up");
}

Assignment decode_two_stage(const Instance& instance, const HierarchyMeta& hierarchy) {
    if (hierarchy.depth() == 0)
        throw DecodeError("two-stage decoding needs hierarchy metadata");
    const int depth = static_cast<int>(hierarchy.depth());
    std::vector<int> picks(depth);
    for (int k = 0; k < depth; ++k)
        picks[k] =
            argmax_index(group_or_throw(instance, hierarchy.level_group_ids[k]).probs);

    // Stage 1: 'None' propagates downward from the shallowest 'None' pick.
    int first_none = depth;
    for (int k = 0; k < depth; ++k) {
        if (picks[k] == hierarchy.none_index[k] && hierarchy.none_index[k] >= 0) {
            first_none = k;
            break;
        }
    }
    for (int k = first_none; k < depth; ++k) {
        if (hierarchy.none_index[k] < 0)
            throw DecodeError("level group '" + hierarchy.level_group_ids[k] +
                              "' has no 'None' label to propagate into");
        picks[k] = hierarchy.none_index[k];
    }

    // Stage 2: the deepest non-'None' pick propagates bottom-up.
    int anchor = first_none - 1;
    if (first_none == depth) anchor = depth - 1;
    if (anchor >= 0) propagate_up(instance, hierarchy, picks, anchor - 1);
    return finish_hierarchy(instance, hierarchy, picks, "sequential:two_stage");
}

namespace {

std::vector<const DecisionGroup*> sequence_groups(const Instance& inst,
                                                  const std::string& base) {
    std::vector<std::pair<int, const DecisionGroup*>> found;
    for (const auto& g : inst.groups) {
        if (!g.id.starts_with(base) || g.id.size() <= base.size() + 2) continue;
        if (g.id[base.size()] != '[' || g.id.back() != ']') continue;
        int t = std::stoi(g.id.substr(base.size() + 1, g.id.size() - base.size() - 2));
        found.emplace_back(t, &g);
    }
    std::sort(found.begin(), found.end());
    std::vector<const DecisionGroup*> out;
    for (auto& [t, g] : found) out.push_back(g);
    return out;
}

// A constraint is decided once every group it mentions has been fixed.
bool fully_decided(const GroundConstraint& c, const Assignment& partial) {
    for (const auto& l : c.literals)
        if (!partial.choice.count(l.group)) return false;
    return true;
}

} // namespace

Assignment decode_stepwise(const Instance& instance, const TransitionMatrix& matrix,
                           const std::vector<GroundConstraint>& coupling,
                           const std::string& seq_base) {
    auto steps = sequence_groups(instance, seq_base);
    if (steps.empty())
        throw DecodeError("stepwise decoding found no '" + seq_base + "[t]' groups");

    Assignment out;
    out.provenance = "sequential:stepwise";

    int prev = -1; // matrix index of the previous action
    for (std::size_t t = 0; t < steps.size(); ++t) {
        const auto& g = *steps[t];
        int pick;
        if (t == 0) {
            pick = argmax_index(g.probs);
        } else {
            std::vector<int> candidates;
            for (int l = 0; l < static_cast<int>(g.size()); ++l) {
                int m = matrix.label_index(g.labels[l]);
                if (m < 0)
                    throw DecodeError("action label '" + g.labels[l] +
                                      "' missing from the transition matrix");
                if (matrix.allows(prev, m)) candidates.push_back(l);
            }
            pick = best_among(g, candidates);
            if (pick < 0)
                throw DecodeError("no valid successor action at step " +
                                  std::to_string(t));
        }
        out.choice[g.id] = pick;
        prev = matrix.label_index(g.labels[pick]);
    }

    // Location (non-action) groups, re-argmaxed in order under the
    // constraints decided by the choices fixed so far.
    std::set<std::string> action_ids;
    for (const auto* g : steps) action_ids.insert(g->id);
    for (const auto& g : instance.groups) {
        if (action_ids.count(g.id)) continue;
        int best = -1;
        for (int l = 0; l < static_cast<int>(g.size()); ++l) {
            Assignment trial = out;
            trial.choice[g.id] = l;
            bool ok = true;
            for (const auto& c : coupling) {
                if (!fully_decided(c, trial)) continue;
                if (!constraint_holds(c, trial)) {
                    ok = false;
                    break;
                }
            }
            if (ok && (best < 0 || g.probs[l] > g.probs[best])) best = l;
        }
        // No label satisfies the decided constraints: keep the argmax.
        out.choice[g.id] = best >= 0 ? best : argmax_index(g.probs);
    }
    return out;
}

} // namespace consilp
