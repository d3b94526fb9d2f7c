#pragma once

#include <cstdint>
#include <vector>

#include "consilp/constraint.hpp"
#include "consilp/model.hpp"

namespace consilp {

enum class FixtureKind { Hierarchy, Sequence };

/// Recipe for a synthetic problem set. Generation is a pure function of
/// the spec: a fixed seed yields byte-identical output (random numbers
/// come from mt19937_64 with explicit bit-level double conversion, never
/// from distribution objects).
struct GeneratorSpec {
    FixtureKind kind = FixtureKind::Hierarchy;
    int num_instances = 100;
    std::uint64_t seed = 42;

    // Hierarchy: per-level group sizes, shallowest first. The size
    // includes the 'None' slot on levels >= 2 when none_labels is set.
    std::vector<int> level_sizes = {3, 15};
    bool none_labels = false;

    // Per-group baseline accuracy targets (cycled when shorter than the
    // group list). Probability sharpness in (0,1) tunes entropy.
    std::vector<double> accuracy_targets = {0.85};
    double sharpness = 0.5;

    // Sequence shape: steps of 6-action groups plus one location group
    // per step with a per-instance size drawn from [min,max].
    int steps = 8;
    int min_locations = 3;
    int max_locations = 8;
};

/// Deterministic synthetic instances with gold, hierarchy or transition
/// metadata, and model registry (accuracy set to the target, empirical
/// priors tallied from the generated gold).
Problem generate(const GeneratorSpec& spec);

/// Move-at-step-t implies a location change from step t-1, expressed per
/// shared location label. Applies to Sequence-shaped instances.
std::vector<GroundConstraint> coupling_constraints(const Instance& instance);

struct HeterogeneityFixture {
    Problem problem;
    std::vector<GroundConstraint> constraints; // NAND on the top labels + exactly-one
};

/// The frozen two-group problem (sizes 2 and 10) whose top labels
/// conflict: raw-probability weights resolve the conflict by changing
/// the size-10 group, prior-scored weights by changing the size-2 group.
HeterogeneityFixture heterogeneity_fixture();

} // namespace consilp
