#include "aqm/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aqm {

bool DialogHistory::caption_mentions(FeatureId f) const {
    return std::any_of(caption_.begin(), caption_.end(),
                       [f](const CaptionBit& b) { return b.feature == f; });
}

bool DialogHistory::asked(QuestionId q) const {
    return std::any_of(turns_.begin(), turns_.end(), [q](const DialogTurn& t) { return t.question == q; });
}

std::optional<AnswerId> DialogHistory::last_answer_to(QuestionId q) const {
    for (auto it = turns_.rbegin(); it != turns_.rend(); ++it) {
        if (it->question == q) return it->answer;
    }
    return std::nullopt;
}

std::vector<AnswerId> AnswerModel::top_answers(ClassId c, QuestionId q, const DialogHistory& history,
                                               std::size_t m) const {
    const auto probs = dist(c, q, history);
    std::vector<AnswerId> order(probs.size());
    std::iota(order.begin(), order.end(), AnswerId{0});
    m = std::min(m, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                      [&](AnswerId x, AnswerId y) { return probs[x] > probs[y] || (probs[x] == probs[y] && x < y); });
    order.resize(m);
    return order;
}

TableAnswerModel::TableAnswerModel(std::uint32_t num_classes, std::uint32_t num_questions,
                                   std::uint32_t num_answers, std::vector<double> table,
                                   ModelProvenance provenance)
    : num_classes_(num_classes),
      num_questions_(num_questions),
      num_answers_(num_answers),
      table_(std::move(table)),
      provenance_(std::move(provenance)) {
    if (table_.size() != std::size_t{num_classes_} * num_questions_ * num_answers_) {
        throw ValidationError("invalid answer_table: expected N*Q*A entries");
    }
}

std::vector<double> TableAnswerModel::dist(ClassId c, QuestionId q, const DialogHistory&) const {
    const auto r = row(c, q);
    return {r.begin(), r.end()};
}

TableAnswerModel TableAnswerModel::materialize(const AnswerModel& model, ModelProvenance provenance) {
    const std::uint32_t n = model.num_classes(), nq = model.num_questions(), na = model.num_answers();
    std::vector<double> table;
    table.reserve(std::size_t{n} * nq * na);
    const DialogHistory empty;
    for (ClassId c = 0; c < n; ++c) {
        for (QuestionId q = 0; q < nq; ++q) {
            const auto d = model.dist(c, q, empty);
            table.insert(table.end(), d.begin(), d.end());
        }
    }
    return TableAnswerModel(n, nq, na, std::move(table), std::move(provenance));
}

std::shared_ptr<const TableAnswerModel> tabular_answer_model(const World& world) {
    return std::make_shared<const TableAnswerModel>(world.num_classes(), world.num_questions(),
                                                    world.num_answers(), world.answer_table(),
                                                    ModelProvenance{"trueA", 0.0, 0, world.spec().seed});
}

namespace {

class ConsistencyModel final : public AnswerModel {
public:
    ConsistencyModel(AnswerModelPtr inner, double rho) : inner_(std::move(inner)), rho_(rho) {}

    std::uint32_t num_classes() const override { return inner_->num_classes(); }
    std::uint32_t num_questions() const override { return inner_->num_questions(); }
    std::uint32_t num_answers() const override { return inner_->num_answers(); }

    std::vector<double> dist(ClassId c, QuestionId q, const DialogHistory& history) const override {
        auto d = inner_->dist(c, q, history);
        const auto previous = history.last_answer_to(q);
        if (!previous) return d;
        double sum = 0.0;
        for (auto& p : d) {
            p *= 1.0 - rho_;
            sum += p;
        }
        d[*previous] += rho_;
        sum += rho_;
        for (auto& p : d) p /= sum;
        return d;
    }

private:
    AnswerModelPtr inner_;
    double rho_;
};

class NoisyModel final : public AnswerModel {
public:
    NoisyModel(AnswerModelPtr inner, double mix) : inner_(std::move(inner)), mix_(mix) {}

    std::uint32_t num_classes() const override { return inner_->num_classes(); }
    std::uint32_t num_questions() const override { return inner_->num_questions(); }
    std::uint32_t num_answers() const override { return inner_->num_answers(); }

    std::vector<double> dist(ClassId c, QuestionId q, const DialogHistory& history) const override {
        auto d = inner_->dist(c, q, history);
        const double uniform = mix_ / static_cast<double>(d.size());
        for (auto& p : d) p = (1.0 - mix_) * p + uniform;
        return d;
    }

private:
    AnswerModelPtr inner_;
    double mix_;
};

void check_unit_interval(double x, const char* field) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError(std::string("invalid ") + field + ": must be in [0, 1]");
    }
}

}  // namespace

AnswerModelPtr consistency_wrapper(AnswerModelPtr inner, double rho) {
    check_unit_interval(rho, "rho");
    return std::make_shared<const ConsistencyModel>(std::move(inner), rho);
}

AnswerModelPtr noisy_model(AnswerModelPtr inner, double mix) {
    check_unit_interval(mix, "mix");
    return std::make_shared<const NoisyModel>(std::move(inner), mix);
}

std::shared_ptr<const TableAnswerModel> fit_counts(std::span<const Observation> triples, double alpha,
                                                   ModelShape shape, ModelProvenance provenance) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ValidationError("invalid alpha: must be finite and >= 0");
    }
    if (shape.num_classes == 0 || shape.num_questions == 0 || shape.num_answers == 0) {
        throw ValidationError("invalid shape: all dimensions must be >= 1");
    }
    const std::size_t na = shape.num_answers;
    std::vector<double> table(std::size_t{shape.num_classes} * shape.num_questions * na, 0.0);
    for (const auto& t : triples) {
        if (t.class_id >= shape.num_classes || t.question >= shape.num_questions || t.answer >= shape.num_answers) {
            throw ValidationError("invalid triple: id outside model shape");
        }
        table[(std::size_t{t.class_id} * shape.num_questions + t.question) * na + t.answer] += 1.0;
    }
    for (std::size_t cell = 0; cell < table.size() / na; ++cell) {
        double* row = table.data() + cell * na;
        const double total = std::accumulate(row, row + na, 0.0);
        const double denom = total + alpha * static_cast<double>(na);
        if (!(denom > 0.0)) {
            throw ValidationError("alpha = 0 with no observations for class " +
                                  std::to_string(cell / shape.num_questions) + ", question " +
                                  std::to_string(cell % shape.num_questions) + ": distribution undefined");
        }
        for (std::size_t a = 0; a < na; ++a) row[a] = (row[a] + alpha) / denom;
    }
    provenance.alpha = alpha;
    provenance.triple_count = triples.size();
    return std::make_shared<const TableAnswerModel>(shape.num_classes, shape.num_questions, shape.num_answers,
                                                    std::move(table), std::move(provenance));
}

namespace {

AnswerId sample_answer(std::span<const double> row, Rng& rng) {
    return static_cast<AnswerId>(rng.categorical(row));
}

}  // namespace

std::shared_ptr<const TableAnswerModel> fit_independent(const World& world, std::uint64_t num_triples,
                                                        double alpha, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Observation> triples;
    triples.reserve(num_triples);
    for (std::uint64_t i = 0; i < num_triples; ++i) {
        const auto c = static_cast<ClassId>(rng.below(world.num_classes()));
        const auto q = static_cast<QuestionId>(rng.below(world.num_questions()));
        triples.push_back({c, q, sample_answer(world.answer_row(c, q), rng)});
    }
    return fit_counts(triples, alpha, {world.num_classes(), world.num_questions(), world.num_answers()},
                      ModelProvenance{"indA", alpha, num_triples, seed});
}

std::vector<Observation> collect_rollouts(const World& world, const QuestionerPolicy& policy,
                                          const RolloutParams& params, std::uint64_t seed) {
    std::vector<Observation> triples;
    triples.reserve(params.num_dialogs * params.rounds);
    for (std::uint64_t d = 0; d < params.num_dialogs; ++d) {
        Rng rng(derive_seed(seed, d));
        const Episode episode = sample_episode(world, params.caption, rng);
        DialogHistory history(episode.caption);
        for (std::uint32_t t = 0; t < params.rounds; ++t) {
            const auto q = policy(history, rng);
            if (!q) break;
            const AnswerId a = sample_answer(world.answer_row(episode.target, *q), rng);
            triples.push_back({episode.target, *q, a});
            history.append(*q, a);
        }
    }
    return triples;
}

std::shared_ptr<const TableAnswerModel> fit_from_rollouts(const World& world, const QuestionerPolicy& policy,
                                                          const RolloutParams& params, double alpha,
                                                          std::uint64_t seed) {
    const auto triples = collect_rollouts(world, policy, params, seed);
    return fit_counts(triples, alpha, {world.num_classes(), world.num_questions(), world.num_answers()},
                      ModelProvenance{"depA", alpha, triples.size(), seed});
}

HeuristicProposer::HeuristicProposer(std::vector<FeatureId> question_feature, double caption_weight)
    : question_feature_(std::move(question_feature)), caption_weight_(caption_weight) {}

double HeuristicProposer::relevance(QuestionId q, const DialogHistory& history) const {
    const double evidence = history.caption_mentions(question_feature_[q]) ? 1.0 : 0.0;
    return evidence * caption_weight_ + 1.0;
}

std::vector<QuestionId> HeuristicProposer::propose(const DialogHistory& history, std::size_t k) const {
    std::vector<std::pair<double, QuestionId>> scored;
    scored.reserve(question_feature_.size());
    for (QuestionId q = 0; q < question_feature_.size(); ++q) {
        if (!history.asked(q)) scored.emplace_back(relevance(q, history), q);
    }
    k = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                      [](const auto& x, const auto& y) {
                          return x.first > y.first || (x.first == y.first && x.second < y.second);
                      });
    std::vector<QuestionId> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
    return out;
}

ProposerPtr heuristic_proposer(const World& world, double caption_weight) {
    return std::make_shared<const HeuristicProposer>(world.question_features(), caption_weight);
}

namespace {

class FixedScoreModel final : public ScoreModel {
public:
    explicit FixedScoreModel(std::vector<double> scores) : scores_(std::move(scores)) {}
    std::vector<double> scores(const DialogHistory&) const override { return scores_; }

private:
    std::vector<double> scores_;
};

}  // namespace

ScoreModelPtr caption_score_model(const World& world, const Episode& episode) {
    return std::make_shared<const FixedScoreModel>(caption_scores(world, episode));
}

ScoreModelPtr flat_score_model(std::uint32_t num_classes) {
    return std::make_shared<const FixedScoreModel>(std::vector<double>(num_classes, 0.0));
}

QuestionerPolicy proposer_policy(ProposerPtr proposer) {
    return [proposer = std::move(proposer)](const DialogHistory& history, Rng&) -> std::optional<QuestionId> {
        const auto top = proposer->propose(history, 1);
        if (top.empty()) return std::nullopt;
        return top.front();
    };
}

QuestionerPolicy random_policy(std::uint32_t num_questions) {
    return [num_questions](const DialogHistory& history, Rng& rng) -> std::optional<QuestionId> {
        std::vector<QuestionId> unasked;
        for (QuestionId q = 0; q < num_questions; ++q) {
            if (!history.asked(q)) unasked.push_back(q);
        }
        if (unasked.empty()) return std::nullopt;
        return unasked[rng.below(unasked.size())];
    };
}

}  // namespace aqm
