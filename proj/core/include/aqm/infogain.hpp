#pragma once

#include <span>
#include <vector>

#include "aqm/common.hpp"
#include "aqm/models.hpp"

namespace aqm {

/// Information gain of one candidate question, in nats.
struct IGReport {
    QuestionId question = 0;
    double value = 0.0;
    std::size_t num_classes = 0;
    std::size_t num_answers = 0;
    // Some class put no mass on the answer subset and was given a uniform row.
    bool uniform_fallback = false;
    // At least one 0 * ln(0 / x) term was dropped.
    bool skipped_zero_terms = false;
};

/// Mutual information between the class and the answer,
///   sum_c sum_a p(c) p(a|c) ln[p(a|c) / p(a)],  p(a) = sum_c p(c) p(a|c).
/// `belief` may be unnormalized; `rows[c]` is class c's answer distribution.
double exact_ig(std::span<const double> belief, const std::vector<std::vector<double>>& rows);

/// Belief restricted to `classes` and renormalized. Throws ValidationError
/// when the restriction has zero mass.
std::vector<double> reg_posterior(std::span<const double> belief, std::span<const ClassId> classes);

struct RegularizedRow {
    std::vector<double> probs;
    bool uniform_fallback = false;
};

/// Answer distribution restricted to `answers` and renormalized; a uniform
/// row over `answers` when the restriction has zero mass.
RegularizedRow reg_answer(std::span<const double> dist, std::span<const AnswerId> answers);

/// sum_c reg_belief[c] * reg_rows[c].
std::vector<double> marginal_answer(std::span<const double> reg_belief,
                                    const std::vector<std::vector<double>>& reg_rows);

/// Top-K information gain over the class subset `classes` and answer subset
/// `answers`, with class rows supplied directly over the full vocabulary
/// (rows[i] belongs to classes[i]).
IGReport ig_topk(std::span<const double> belief, std::span<const ClassId> classes,
                 std::span<const AnswerId> answers, const std::vector<std::vector<double>>& rows,
                 QuestionId question = 0);

/// Top-K information gain with rows drawn from `model` for question `q`.
IGReport ig_topk(std::span<const double> belief, std::span<const ClassId> classes,
                 std::span<const AnswerId> answers, const AnswerModel& model, QuestionId q,
                 const DialogHistory& history);

}  // namespace aqm
