#include "aqm/sampler.hpp"

#include <algorithm>
#include <numeric>

namespace aqm {

void SamplerConfig::validate() const {
    if (k_classes < 1) throw ValidationError("invalid k_classes: must be >= 1");
    if (k_questions < 1) throw ValidationError("invalid k_questions: must be >= 1");
    if (k_answers < 1) throw ValidationError("invalid k_answers: must be >= 1");
    if (fixed_answer_count < 1) throw ValidationError("invalid fixed_answer_count: must be >= 1");
}

std::vector<ClassId> topk_classes(std::span<const double> belief, std::size_t k) {
    std::vector<ClassId> order(belief.size());
    std::iota(order.begin(), order.end(), ClassId{0});
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](ClassId x, ClassId y) { return belief[x] > belief[y] || (belief[x] == belief[y] && x < y); });
    order.resize(k);
    return order;
}

QuestionCandidates::QuestionCandidates(ProposerPtr proposer, const SamplerConfig& config, std::uint64_t seed)
    : proposer_(std::move(proposer)), mode_(config.question_mode), k_(config.k_questions), seed_(seed) {
    config.validate();
}

std::vector<QuestionId> QuestionCandidates::next(const DialogHistory& history) {
    std::vector<QuestionId> out;
    switch (mode_) {
    case QuestionMode::PerTurn:
        out = proposer_->propose(history, k_);
        break;
    case QuestionMode::Gen1Q:
        if (!fixed_) fixed_ = proposer_->propose(history, k_);
        break;
    case QuestionMode::RandQ:
        if (!fixed_) {
            const auto nq = proposer_->num_questions();
            const auto k = static_cast<std::uint32_t>(std::min<std::size_t>(k_, nq));
            Rng rng(seed_);
            auto pool = rng.sample_without_replacement(nq, k);
            fixed_ = std::vector<QuestionId>(pool.begin(), pool.end());
        }
        break;
    }
    if (fixed_) {
        std::copy_if(fixed_->begin(), fixed_->end(), std::back_inserter(out),
                     [&](QuestionId q) { return !history.asked(q); });
    }
    if (out.empty()) throw NoCandidates("no unasked candidate questions remain");
    return out;
}

std::vector<QuestionId> candidate_questions(QuestionCandidates& source, const DialogHistory& history) {
    return source.next(history);
}

namespace {

void push_unique(std::vector<AnswerId>& out, AnswerId a) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
}

}  // namespace

std::vector<AnswerId> candidate_answers(const AnswerModel& model, QuestionId q, std::span<const ClassId> classes,
                                        const DialogHistory& history) {
    std::vector<AnswerId> out;
    for (ClassId c : classes) {
        push_unique(out, model.top_answers(c, q, history, 1).front());
    }
    return out;
}

std::size_t answers_per_class(std::size_t target_size, std::size_t num_classes) {
    if (num_classes == 0) throw ValidationError("answers_per_class: no classes");
    return (target_size + num_classes - 1) / num_classes;
}

std::vector<AnswerId> extended_answers(const AnswerModel& model, QuestionId q, std::span<const ClassId> classes,
                                       std::size_t target_size, const DialogHistory& history, Rng& rng) {
    if (target_size == 0) throw ValidationError("invalid target_size: must be >= 1");
    if (target_size > model.num_answers()) throw ValidationError("invalid target_size: exceeds answer vocabulary");
    const std::size_t m = answers_per_class(target_size, classes.size());
    std::vector<AnswerId> pool;
    for (ClassId c : classes) {
        for (AnswerId a : model.top_answers(c, q, history, m)) push_unique(pool, a);
    }
    if (pool.size() <= target_size) return pool;
    const auto drop = rng.sample_without_replacement(static_cast<std::uint32_t>(pool.size()),
                                                     static_cast<std::uint32_t>(pool.size() - target_size));
    std::vector<bool> removed(pool.size(), false);
    for (auto i : drop) removed[i] = true;
    std::vector<AnswerId> out;
    out.reserve(target_size);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!removed[i]) out.push_back(pool[i]);
    }
    return out;
}

std::vector<AnswerId> fixed_random_answers(std::uint32_t num_answers, std::uint32_t size, std::uint64_t seed) {
    if (size == 0) throw ValidationError("invalid fixed answer size: must be >= 1");
    if (size > num_answers) throw ValidationError("invalid fixed answer size: exceeds answer vocabulary");
    Rng rng(seed);
    const auto drawn = rng.sample_without_replacement(num_answers, size);
    return {drawn.begin(), drawn.end()};
}

std::string to_string(QuestionMode mode) {
    switch (mode) {
    case QuestionMode::PerTurn: return "per-turn";
    case QuestionMode::Gen1Q: return "gen1Q";
    case QuestionMode::RandQ: return "randQ";
    }
    return "?";
}

std::string to_string(AnswerMode mode) {
    switch (mode) {
    case AnswerMode::Top1PerClass: return "top1-per-class";
    case AnswerMode::Extended: return "extended";
    case AnswerMode::FixedRandom: return "fixed-random";
    }
    return "?";
}

QuestionMode parse_question_mode(const std::string& s) {
    if (s == "per-turn") return QuestionMode::PerTurn;
    if (s == "gen1Q") return QuestionMode::Gen1Q;
    if (s == "randQ") return QuestionMode::RandQ;
    throw ValidationError("invalid question_mode: unknown value '" + s + "'");
}

AnswerMode parse_answer_mode(const std::string& s) {
    if (s == "top1-per-class") return AnswerMode::Top1PerClass;
    if (s == "extended") return AnswerMode::Extended;
    if (s == "fixed-random") return AnswerMode::FixedRandom;
    throw ValidationError("invalid answer_mode: unknown value '" + s + "'");
}

}  // namespace aqm
