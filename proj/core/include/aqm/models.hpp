#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqm/common.hpp"
#include "aqm/rng.hpp"
#include "aqm/world.hpp"

namespace aqm {

struct DialogTurn {
    QuestionId question;
    AnswerId answer;
    bool operator==(const DialogTurn&) const = default;
};

/// h_t: the caption observed before the dialog plus the completed turns.
class DialogHistory {
public:
    DialogHistory() = default;
    explicit DialogHistory(std::vector<CaptionBit> caption) : caption_(std::move(caption)) {}

    const std::vector<CaptionBit>& caption() const { return caption_; }
    const std::vector<DialogTurn>& turns() const { return turns_; }
    std::size_t size() const { return turns_.size(); }

    bool caption_mentions(FeatureId f) const;
    bool asked(QuestionId q) const;
    /// Answer received the most recent time `q` was asked, if ever.
    std::optional<AnswerId> last_answer_to(QuestionId q) const;

    void append(QuestionId q, AnswerId a) { turns_.push_back({q, a}); }
    /// Same caption, no turns.
    DialogHistory without_turns() const { return DialogHistory(caption_); }

    bool operator==(const DialogHistory&) const = default;

private:
    std::vector<CaptionBit> caption_;
    std::vector<DialogTurn> turns_;
};

/// p(a | c, q, h): the answerer, or the questioner's approximation of it.
class AnswerModel {
public:
    virtual ~AnswerModel() = default;

    virtual std::uint32_t num_classes() const = 0;
    virtual std::uint32_t num_questions() const = 0;
    virtual std::uint32_t num_answers() const = 0;

    virtual std::vector<double> dist(ClassId c, QuestionId q, const DialogHistory& history) const = 0;

    /// The m most probable answers, descending, ties by ascending id.
    std::vector<AnswerId> top_answers(ClassId c, QuestionId q, const DialogHistory& history,
                                      std::size_t m) const;
};

using AnswerModelPtr = std::shared_ptr<const AnswerModel>;

struct ModelProvenance {
    std::string setting = "trueA";  // indA, depA, trueA
    double alpha = 0.0;
    std::uint64_t triple_count = 0;
    std::uint64_t seed = 0;
    bool operator==(const ModelProvenance&) const = default;
};

/// History-independent model backed by a dense [class][question][answer] table.
class TableAnswerModel final : public AnswerModel {
public:
    TableAnswerModel(std::uint32_t num_classes, std::uint32_t num_questions, std::uint32_t num_answers,
                     std::vector<double> table, ModelProvenance provenance);

    std::uint32_t num_classes() const override { return num_classes_; }
    std::uint32_t num_questions() const override { return num_questions_; }
    std::uint32_t num_answers() const override { return num_answers_; }

    std::vector<double> dist(ClassId c, QuestionId q, const DialogHistory& history) const override;
    std::span<const double> row(ClassId c, QuestionId q) const {
        return {table_.data() + (std::size_t{c} * num_questions_ + q) * num_answers_, num_answers_};
    }

    const std::vector<double>& table() const { return table_; }
    const ModelProvenance& provenance() const { return provenance_; }

    /// Evaluates `model` with an empty history on every cell.
    static TableAnswerModel materialize(const AnswerModel& model, ModelProvenance provenance);

private:
    std::uint32_t num_classes_;
    std::uint32_t num_questions_;
    std::uint32_t num_answers_;
    std::vector<double> table_;
    ModelProvenance provenance_;
};

/// trueA: the world's own answer table.
std::shared_ptr<const TableAnswerModel> tabular_answer_model(const World& world);

/// Mixes a point mass on the previous answer into repeated questions:
/// rho * delta(prev) + (1 - rho) * inner. Unasked questions pass through.
AnswerModelPtr consistency_wrapper(AnswerModelPtr inner, double rho);

/// (1 - mix) * inner + mix * uniform.
AnswerModelPtr noisy_model(AnswerModelPtr inner, double mix);

struct Observation {
    ClassId class_id;
    QuestionId question;
    AnswerId answer;
};

struct ModelShape {
    std::uint32_t num_classes;
    std::uint32_t num_questions;
    std::uint32_t num_answers;
};

/// Additively smoothed counts: (n(c,q,a) + alpha) / (n(c,q) + alpha * |A|).
/// Throws ValidationError on out-of-range ids or when alpha = 0 leaves a cell
/// without data.
std::shared_ptr<const TableAnswerModel> fit_counts(std::span<const Observation> triples, double alpha,
                                                   ModelShape shape, ModelProvenance provenance = {});

/// indA: offline triples with uniform classes and questions, answers drawn
/// from the world's answerer.
std::shared_ptr<const TableAnswerModel> fit_independent(const World& world, std::uint64_t num_triples,
                                                        double alpha, std::uint64_t seed);

/// A questioner used to drive rollouts. Returns nullopt when it has nothing
/// left to ask.
using QuestionerPolicy = std::function<std::optional<QuestionId>(const DialogHistory&, Rng&)>;

struct RolloutParams {
    std::uint64_t num_dialogs = 0;
    std::uint32_t rounds = 10;
    CaptionParams caption;
};

/// depA: plays `num_dialogs` games of `policy` against the world's answerer
/// and fits counts on the (target, question, answer) triples observed.
std::shared_ptr<const TableAnswerModel> fit_from_rollouts(const World& world, const QuestionerPolicy& policy,
                                                          const RolloutParams& params, double alpha,
                                                          std::uint64_t seed);

/// Same rollouts as fit_from_rollouts, returning the raw triples.
std::vector<Observation> collect_rollouts(const World& world, const QuestionerPolicy& policy,
                                          const RolloutParams& params, std::uint64_t seed);

/// Proposes candidate questions given the dialog so far.
class QuestionProposer {
public:
    virtual ~QuestionProposer() = default;
    virtual std::uint32_t num_questions() const = 0;
    /// Up to k distinct, not-yet-asked question ids, best first.
    virtual std::vector<QuestionId> propose(const DialogHistory& history, std::size_t k) const = 0;
};

using ProposerPtr = std::shared_ptr<const QuestionProposer>;

inline constexpr double kDefaultCaptionWeight = -0.5;

/// Scores unasked questions by 1 + w_cap * [caption mentions the probed
/// feature] and returns the top k, ties by ascending id.
class HeuristicProposer final : public QuestionProposer {
public:
    HeuristicProposer(std::vector<FeatureId> question_feature, double caption_weight);

    std::uint32_t num_questions() const override {
        return static_cast<std::uint32_t>(question_feature_.size());
    }
    std::vector<QuestionId> propose(const DialogHistory& history, std::size_t k) const override;

    double relevance(QuestionId q, const DialogHistory& history) const;

private:
    std::vector<FeatureId> question_feature_;
    double caption_weight_;
};

ProposerPtr heuristic_proposer(const World& world, double caption_weight = kDefaultCaptionWeight);

/// Per-class scores from the initial context (the prior's input).
class ScoreModel {
public:
    virtual ~ScoreModel() = default;
    virtual std::vector<double> scores(const DialogHistory& history) const = 0;
};

using ScoreModelPtr = std::shared_ptr<const ScoreModel>;

/// Caption log-likelihoods of `episode`, independent of later turns.
ScoreModelPtr caption_score_model(const World& world, const Episode& episode);
/// All-zero scores (no caption signal).
ScoreModelPtr flat_score_model(std::uint32_t num_classes);

/// Guesser-style policy: the proposer's top-1 question.
QuestionerPolicy proposer_policy(ProposerPtr proposer);
/// Uniform over unasked questions.
QuestionerPolicy random_policy(std::uint32_t num_questions);

inline constexpr int kModelFileVersion = 1;

void save_answer_model(const TableAnswerModel& model, const std::filesystem::path& path);
TableAnswerModel load_answer_model(const std::filesystem::path& path);
std::string answer_model_to_json(const TableAnswerModel& model);
TableAnswerModel answer_model_from_json(const std::string& text);

}  // namespace aqm
