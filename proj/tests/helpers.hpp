#pragma once

#include <random>
#include <string>
#include <vector>

#include "consilp/model.hpp"

namespace consilp::testing {

inline DecisionGroup make_group(std::string id, std::vector<double> probs,
                                std::string model_id = "m") {
    DecisionGroup g;
    g.id = std::move(id);
    g.probs = std::move(probs);
    for (std::size_t i = 0; i < g.probs.size(); ++i)
        g.labels.push_back(g.id + "_l" + std::to_string(i));
    g.model_id = std::move(model_id);
    return g;
}

inline Problem make_problem(std::vector<Instance> instances,
                            double accuracy = 1.0) {
    Problem p;
    p.instances = std::move(instances);
    ModelMeta m;
    m.id = "m";
    m.accuracy = accuracy;
    p.models[m.id] = m;
    return p;
}

/// Random probability vector summing to 1, entries > 0.
inline std::vector<double> random_probs(std::mt19937_64& rng, int size) {
    std::vector<double> p(size);
    double sum = 0.0;
    for (double& x : p) {
        x = 0.01 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
        sum += x;
    }
    for (double& x : p) x /= sum;
    return p;
}

} // namespace consilp::testing
