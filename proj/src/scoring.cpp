#include "consilp/scoring.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace consilp {

ScoringConfig ScoringConfig::from_factors(const std::string& factors) {
    ScoringConfig cfg;
    std::stringstream ss(factors);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "prior") {
            cfg.use_prior = true;
        } else if (item == "entropy" || item == "ent") {
            cfg.use_entropy = true;
        } else if (item == "accuracy" || item == "acc") {
            cfg.use_accuracy = true;
        } else {
            throw std::invalid_argument("unknown scoring factor '" + item + "'");
        }
    }
    return cfg;
}

std::string ScoringConfig::factor_tag() const {
    std::string tag;
    auto add = [&](const char* name) {
        if (!tag.empty()) tag += ',';
        tag += name;
    };
    if (use_prior) add("prior");
    if (use_entropy) add("entropy");
    if (use_accuracy) add("accuracy");
    return tag.empty() ? "raw" : tag;
}

double entropy(std::span<const double> probs, double base) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    if (base > 1.0) h /= std::log(base);
    return h;
}

double group_factor(Factor kind, const DecisionGroup& group, const ModelMeta& meta,
                    const ScoringConfig& config) {
    const double n = static_cast<double>(group.size());
    switch (kind) {
    case Factor::Prior:
        if (config.prior_mode == PriorMode::Empirical) return 1.0;
        return n;
    case Factor::Entropy: {
        const double h = entropy(group.probs, config.log_base);
        if (config.entropy_variant == EntropyVariant::InverseNormalized) {
            const double log_n =
                config.log_base > 1.0 ? std::log(n) / std::log(config.log_base)
                                      : std::log(n);
            return 1.0 / std::max(h / log_n, config.entropy_floor);
        }
        return n / std::max(h, config.entropy_floor);
    }
    case Factor::Accuracy:
        return meta.accuracy;
    }
    throw std::logic_error("unreachable factor kind");
}

WeightVector score(const DecisionGroup& group, const ScoringConfig& config,
                   const ModelMeta& meta) {
    WeightVector wv;
    wv.group_id = group.id;
    wv.weights = group.probs;

    double gamma = 1.0;
    if (config.use_prior) {
        if (config.prior_mode == PriorMode::Empirical) {
            for (std::size_t i = 0; i < group.size(); ++i) {
                auto it = meta.priors.find(group.labels[i]);
                if (it == meta.priors.end())
                    throw std::invalid_argument(
                        "empirical prior mode: model '" + meta.id +
                        "' has no prior for label '" + group.labels[i] + "'");
                wv.weights[i] /= it->second;
            }
        } else {
            gamma *= group_factor(Factor::Prior, group, meta, config);
        }
    }
    if (config.use_entropy)
        gamma *= group_factor(Factor::Entropy, group, meta, config);
    if (config.use_accuracy)
        gamma *= group_factor(Factor::Accuracy, group, meta, config);

    for (double& w : wv.weights) w *= gamma;
    wv.gamma = gamma;
    return wv;
}

} // namespace consilp
