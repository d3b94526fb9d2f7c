#pragma once

#include <span>
#include <string>
#include <vector>

#include "consilp/model.hpp"

namespace consilp {

enum class Factor { Prior, Entropy, Accuracy };

enum class PriorMode { UniformSize, Empirical };

enum class EntropyVariant { Literal, InverseNormalized };

struct ScoringConfig {
    bool use_prior = false;
    bool use_entropy = false;
    bool use_accuracy = false;
    PriorMode prior_mode = PriorMode::UniformSize;
    double log_base = 0.0; // 0 means natural log
    double entropy_floor = 1e-6;
    EntropyVariant entropy_variant = EntropyVariant::Literal;

    bool any_factor() const { return use_prior || use_entropy || use_accuracy; }

    /// Parses a comma-separated factor list ("prior,entropy,accuracy",
    /// "acc" accepted for accuracy, "ent" for entropy). Empty string
    /// enables nothing (basic objective on raw probabilities).
    static ScoringConfig from_factors(const std::string& factors);

    /// Canonical comma-separated factor list, for provenance tags.
    std::string factor_tag() const;
};

/// Calibrated objective coefficients for one group. The weights are a
/// positive rescaling of the group's probabilities (gamma is the
/// group-level multiplier; with empirical priors per-label divisors are
/// folded in and gamma reports the non-prior part).
struct WeightVector {
    std::string group_id;
    std::vector<double> weights;
    double gamma = 1.0;
};

/// Shannon entropy -sum p log p with 0 log 0 == 0, in `base`
/// (0 = natural log).
double entropy(std::span<const double> probs, double base = 0.0);

/// The per-group scalar for one factor: prior/uniform -> N,
/// entropy -> N / max(H, eps) (or the inverse-normalized variant),
/// accuracy -> Acc of the producing model. Empirical priors are applied
/// per label inside score(); for them this returns 1.
double group_factor(Factor kind, const DecisionGroup& group, const ModelMeta& meta,
                    const ScoringConfig& config);

/// Maps raw probabilities to ILP weights: w_i = p_i * product of enabled
/// factors (p_i / prior_i for empirical priors). With no factors enabled
/// this is the identity.
WeightVector score(const DecisionGroup& group, const ScoringConfig& config,
                   const ModelMeta& meta);

} // namespace consilp
