#include "aqm/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aqm {

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw ValidationError("invalid belief: no classes");
    double sum = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) throw ValidationError("invalid belief: negative or non-finite entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("invalid belief: entries do not sum to 1");
}

Belief Belief::normalized(std::vector<double> weights) {
    if (weights.empty()) throw ValidationError("invalid belief: no classes");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("invalid belief: negative or non-finite weight");
        sum += w;
    }
    if (!(sum > 0.0)) throw DegenerateEvidence("belief has no mass left to normalize");
    for (double& w : weights) w /= sum;
    return Belief(std::move(weights), Unchecked{});
}

Belief prior_from_scores(std::span<const double> scores, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("invalid lambda: must be finite and >= 0");
    if (scores.empty()) throw ValidationError("invalid scores: empty");
    for (double s : scores) {
        if (!std::isfinite(s)) throw ValidationError("invalid scores: non-finite entry");
    }
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<double> weights(scores.size());
    for (std::size_t c = 0; c < scores.size(); ++c) {
        weights[c] = std::exp(lambda * (scores[c] - top));
    }
    return Belief::normalized(std::move(weights));
}

Belief uniform_prior(std::size_t num_classes) {
    if (num_classes == 0) throw ValidationError("invalid num_classes: must be >= 1");
    return Belief(std::vector<double>(num_classes, 1.0 / static_cast<double>(num_classes)));
}

Belief bayes_update(const Belief& belief, std::span<const double> likelihood) {
    if (likelihood.size() != belief.size()) throw ValidationError("invalid likelihood: size differs from belief");
    std::vector<double> product(belief.size());
    for (std::size_t c = 0; c < belief.size(); ++c) {
        const double l = likelihood[c];
        if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("invalid likelihood: entries must be in [0, 1]");
        product[c] = belief[c] * l;
    }
    return Belief::normalized(std::move(product));
}

double rank_of(std::span<const double> values, ClassId target) {
    if (target >= values.size()) throw ValidationError("invalid target: not a class id");
    const double own = values[target];
    std::size_t greater = 0, ties = 0;
    for (std::size_t c = 0; c < values.size(); ++c) {
        if (c == target) continue;
        if (values[c] > own) {
            ++greater;
        } else if (values[c] == own) {
            ++ties;
        }
    }
    return 1.0 + static_cast<double>(greater) + 0.5 * static_cast<double>(ties);
}

double pmr(double rank, std::size_t num_classes) {
    if (num_classes == 0) throw ValidationError("invalid num_classes: must be >= 1");
    if (num_classes == 1) return 1.0;
    const double n = static_cast<double>(num_classes);
    if (!(rank >= 1.0 && rank <= n)) throw ValidationError("invalid rank: must be in [1, N]");
    return (n - rank) / (n - 1.0);
}

ClassId argmax(std::span<const double> values) {
    if (values.empty()) throw ValidationError("argmax of empty vector");
    // max_element returns the first maximum, i.e. the smallest id among ties.
    return static_cast<ClassId>(std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace aqm
