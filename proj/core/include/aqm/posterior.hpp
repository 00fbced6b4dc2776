#pragma once

#include <span>
#include <vector>

#include "aqm/common.hpp"

namespace aqm {

/// Normalized probability vector over all classes.
class Belief {
public:
    /// Validates entries >= 0 and sum = 1 within 1e-9.
    explicit Belief(std::vector<double> probs);

    /// Divides nonnegative weights by their sum. Throws DegenerateEvidence
    /// when the sum is zero.
    static Belief normalized(std::vector<double> weights);

    std::size_t size() const { return probs_.size(); }
    double operator[](std::size_t c) const { return probs_[c]; }
    const std::vector<double>& probs() const { return probs_; }
    operator std::span<const double>() const { return probs_; }

    bool operator==(const Belief&) const = default;

private:
    struct Unchecked {};
    Belief(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}

    std::vector<double> probs_;
};

/// softmax(lambda * scores), max-subtracted.
Belief prior_from_scores(std::span<const double> scores, double lambda);

Belief uniform_prior(std::size_t num_classes);

/// Elementwise product with the likelihood, renormalized.
/// Throws DegenerateEvidence when the product has no mass.
Belief bayes_update(const Belief& belief, std::span<const double> likelihood);

/// Mid-rank of `target`: 1 + #{greater} + #{ties} / 2.
double rank_of(std::span<const double> values, ClassId target);

/// (N - rank) / (N - 1); 1 when N = 1.
double pmr(double rank, std::size_t num_classes);

/// Largest entry, ties by ascending id.
ClassId argmax(std::span<const double> values);

}  // namespace aqm
