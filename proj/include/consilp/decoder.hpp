#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "consilp/constraint.hpp"
#include "consilp/model.hpp"

namespace consilp {

/// Per-level view of an instance's hierarchy groups, derived from the
/// level tags and the parent map.
struct HierarchyMeta {
    std::vector<std::string> level_group_ids; // shallowest first
    std::map<std::string, std::string> parent; // child label -> parent label
    std::vector<int> none_index; // per level, -1 when absent

    static HierarchyMeta from_instance(const Instance& instance);
    std::size_t depth() const { return level_group_ids.size(); }
};

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Top-down propagation: level 1 keeps its argmax; each deeper level
/// picks its best label among children of the level above (the 'None'
/// label, when designated, is always a candidate).
Assignment decode_top_down(const Instance& instance, const HierarchyMeta& hierarchy);

/// Bottom-up propagation: the deepest level keeps its argmax and each
/// ancestor is forced to the unique parent chain. When the deepest
/// choice is 'None', levels stay at their own argmax going up until the
/// first non-'None' choice, from which the parent chain takes over.
Assignment decode_bottom_up(const Instance& instance, const HierarchyMeta& hierarchy);

/// Two-stage decoding: 'None' first propagates downward from the
/// shallowest 'None' argmax, then the deepest non-'None' choice
/// propagates bottom-up through the parent chain.
Assignment decode_two_stage(const Instance& instance, const HierarchyMeta& hierarchy);

/// Stepwise sequence repair: step 1 keeps its argmax action, each later
/// step takes its best action valid after the previous choice, then
/// location groups are re-argmaxed (in sequence order) subject to the
/// ground constraints that are decided by the fixed choices so far.
Assignment decode_stepwise(const Instance& instance, const TransitionMatrix& matrix,
                           const std::vector<GroundConstraint>& coupling = {},
                           const std::string& seq_base = "action");

} // namespace consilp
