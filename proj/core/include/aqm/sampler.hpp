#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqm/common.hpp"
#include "aqm/models.hpp"
#include "aqm/rng.hpp"

namespace aqm {

enum class QuestionMode { PerTurn, Gen1Q, RandQ };
enum class AnswerMode { Top1PerClass, Extended, FixedRandom };

struct SamplerConfig {
    std::uint32_t k_classes = 20;
    std::uint32_t k_questions = 20;
    std::uint32_t k_answers = 20;
    QuestionMode question_mode = QuestionMode::PerTurn;
    AnswerMode answer_mode = AnswerMode::Top1PerClass;
    // Size of the per-episode answer set in FixedRandom mode.
    std::uint32_t fixed_answer_count = 2;

    void validate() const;
    bool operator==(const SamplerConfig&) const = default;
};

/// The per-turn subsets used by the top-K information gain.
struct CandidateSets {
    std::vector<ClassId> classes;
    std::vector<QuestionId> questions;
    std::map<QuestionId, std::vector<AnswerId>> answers_per_question;
};

/// The k most probable classes, descending, ties by ascending id.
std::vector<ClassId> topk_classes(std::span<const double> belief, std::size_t k);

/// Candidate question source for one episode. Holds the turn-1 list (gen1Q)
/// or the fixed random pool (randQ) across turns.
class QuestionCandidates {
public:
    QuestionCandidates(ProposerPtr proposer, const SamplerConfig& config, std::uint64_t seed);

    /// Throws NoCandidates when every candidate has been asked.
    std::vector<QuestionId> next(const DialogHistory& history);

private:
    ProposerPtr proposer_;
    QuestionMode mode_;
    std::size_t k_;
    std::optional<std::vector<QuestionId>> fixed_;
    std::uint64_t seed_;
};

/// Convenience for a single call; gen1Q and randQ state lives in `source`.
std::vector<QuestionId> candidate_questions(QuestionCandidates& source, const DialogHistory& history);

/// Top-1 answer of every candidate class, deduplicated in order of first
/// appearance.
std::vector<AnswerId> candidate_answers(const AnswerModel& model, QuestionId q, std::span<const ClassId> classes,
                                        const DialogHistory& history);

/// Top-m answers per class with m = ceil(target_size / |classes|),
/// deduplicated, then thinned uniformly at random to target_size.
std::vector<AnswerId> extended_answers(const AnswerModel& model, QuestionId q, std::span<const ClassId> classes,
                                       std::size_t target_size, const DialogHistory& history, Rng& rng);

/// Seeded uniform sample of `size` distinct answers from [0, num_answers).
std::vector<AnswerId> fixed_random_answers(std::uint32_t num_answers, std::uint32_t size, std::uint64_t seed);

/// Smallest m with target_size <= num_classes * m.
std::size_t answers_per_class(std::size_t target_size, std::size_t num_classes);

std::string to_string(QuestionMode mode);
std::string to_string(AnswerMode mode);
QuestionMode parse_question_mode(const std::string& s);
AnswerMode parse_answer_mode(const std::string& s);

}  // namespace aqm
