#include "aqm/planner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace aqm {

void QuestionerConfig::validate() const {
    sampler.validate();
    if (rounds < 1) throw ValidationError("invalid rounds: must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("invalid lambda: must be finite and >= 0");
}

bool same_transcript(const EpisodeResult& a, const EpisodeResult& b) {
    if (a.world_seed != b.world_seed || a.target != b.target || a.seed != b.seed ||
        a.final_guess != b.final_guess || a.truncated != b.truncated || a.final_belief != b.final_belief ||
        a.turns.size() != b.turns.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.turns.size(); ++i) {
        const auto& x = a.turns[i];
        const auto& y = b.turns[i];
        if (x.round != y.round || x.question != y.question || x.answer != y.answer || x.rank != y.rank ||
            x.pmr != y.pmr || x.degenerate_evidence != y.degenerate_evidence ||
            x.carried_forward != y.carried_forward) {
            return false;
        }
    }
    return true;
}

Selection select_question(const Belief& belief, const DialogHistory& history, const CandidateSets& candidates,
                          const AnswerModel& approx) {
    if (candidates.questions.empty()) throw NoCandidates("select_question: no candidate questions");
    Selection selection{candidates.questions.front(), {}};
    selection.reports.reserve(candidates.questions.size());
    double best = -std::numeric_limits<double>::infinity();
    for (QuestionId q : candidates.questions) {
        const auto it = candidates.answers_per_question.find(q);
        if (it == candidates.answers_per_question.end()) {
            throw ValidationError("select_question: no answer set for question " + std::to_string(q));
        }
        auto report = ig_topk(belief.probs(), candidates.classes, it->second, approx, q, history);
        if (report.value > best || (report.value == best && q < selection.question)) {
            best = report.value;
            selection.question = q;
        }
        selection.reports.push_back(std::move(report));
    }
    return selection;
}

StepOutcome step(const EpisodeState& state, QuestionId q, AnswerId a, const AnswerModel& approx,
                 HistoryMode history_mode) {
    const DialogHistory model_history =
        history_mode == HistoryMode::Full ? state.history : state.history.without_turns();
    std::vector<double> likelihood(state.belief.size());
    for (ClassId c = 0; c < likelihood.size(); ++c) {
        likelihood[c] = approx.dist(c, q, model_history)[a];
    }
    StepOutcome out{state, false};
    out.state.history.append(q, a);
    try {
        out.state.belief = bayes_update(state.belief, likelihood);
    } catch (const DegenerateEvidence&) {
        out.degenerate_evidence = true;
    }
    return out;
}

namespace {

// Independent streams per purpose, so strategies that draw nothing for one
// purpose stay aligned with those that do.
enum StreamTag : std::uint64_t { kEpisodeStream = 0, kAnswerStream = 1, kSamplerStream = 2, kPolicyStream = 3,
                                 kFixedAnswerStream = 4, kRandQStream = 5 };

}  // namespace

EpisodeResult run_episode(const World& world, const Episode& episode, const QuestionerConfig& config,
                          const QuestionerModels& models, const AnswerModel& answerer, std::uint64_t seed) {
    config.validate();
    episode.validate_for(world);
    using Clock = std::chrono::steady_clock;

    Rng answer_rng(derive_seed(seed, kAnswerStream));
    Rng sampler_rng(derive_seed(seed, kSamplerStream));
    Rng policy_rng(derive_seed(seed, kPolicyStream));

    const auto scores = config.prior == PriorMode::Caption ? caption_scores(world, episode)
                                                           : std::vector<double>(world.num_classes(), 0.0);
    EpisodeState state{config.prior == PriorMode::Caption ? prior_from_scores(scores, config.lambda)
                                                          : uniform_prior(world.num_classes()),
                       DialogHistory(episode.caption)};
    const bool rank_by_scores = config.strategy == Strategy::Hybrid;
    const std::size_t n = world.num_classes();

    EpisodeResult result;
    result.world_seed = world.spec().seed;
    result.target = episode.target;
    result.seed = seed;

    auto record_rank = [&](TurnRecord& rec) {
        rec.rank = rank_by_scores ? rank_of(scores, episode.target) : rank_of(state.belief.probs(), episode.target);
        rec.pmr = pmr(rec.rank, n);
    };

    TurnRecord prior_record;
    record_rank(prior_record);
    result.turns.push_back(prior_record);

    QuestionCandidates question_source(models.proposer, config.sampler, derive_seed(seed, kRandQStream));
    std::vector<AnswerId> fixed_answers;
    if (config.sampler.answer_mode == AnswerMode::FixedRandom) {
        fixed_answers = fixed_random_answers(world.num_answers(),
                                             std::min(config.sampler.fixed_answer_count, world.num_answers()),
                                             derive_seed(seed, kFixedAnswerStream));
    }
    const std::size_t extended_size = std::min<std::size_t>(config.sampler.k_answers, world.num_answers());

    for (std::uint32_t t = 1; t <= config.rounds; ++t) {
        const auto started = Clock::now();
        TurnRecord rec;
        rec.round = t;
        if (result.truncated) {
            rec.rank = result.turns.back().rank;
            rec.pmr = result.turns.back().pmr;
            rec.carried_forward = true;
            result.turns.push_back(rec);
            continue;
        }

        const DialogHistory model_history =
            config.history == HistoryMode::Full ? state.history : state.history.without_turns();
        CandidateSets candidates;
        try {
            switch (config.strategy) {
            case Strategy::AQMPlus:
            case Strategy::Hybrid:
                candidates.questions = candidate_questions(question_source, state.history);
                break;
            case Strategy::Guesser:
                candidates.questions = models.proposer->propose(state.history, 1);
                break;
            case Strategy::RandomQ:
                if (auto q = random_policy(world.num_questions())(state.history, policy_rng)) {
                    candidates.questions = {*q};
                }
                break;
            }
            if (candidates.questions.empty()) throw NoCandidates("question pool exhausted");
        } catch (const NoCandidates&) {
            result.truncated = true;
            rec.rank = result.turns.back().rank;
            rec.pmr = result.turns.back().pmr;
            rec.carried_forward = true;
            result.turns.push_back(rec);
            continue;
        }

        candidates.classes = topk_classes(state.belief.probs(), config.sampler.k_classes);
        for (QuestionId q : candidates.questions) {
            std::vector<AnswerId> answers;
            switch (config.sampler.answer_mode) {
            case AnswerMode::Top1PerClass:
                answers = candidate_answers(*models.approx, q, candidates.classes, model_history);
                break;
            case AnswerMode::Extended:
                answers = extended_answers(*models.approx, q, candidates.classes, extended_size, model_history,
                                           sampler_rng);
                break;
            case AnswerMode::FixedRandom:
                answers = fixed_answers;
                break;
            }
            candidates.answers_per_question.emplace(q, std::move(answers));
        }

        const auto selection = select_question(state.belief, model_history, candidates, *models.approx);
        const QuestionId q = selection.question;
        const auto chosen = std::find_if(selection.reports.begin(), selection.reports.end(),
                                         [q](const IGReport& r) { return r.question == q; });

        const auto truth = answerer.dist(episode.target, q, state.history);
        const auto a = static_cast<AnswerId>(answer_rng.categorical(truth));

        auto outcome = step(state, q, a, *models.approx, config.history);
        state = std::move(outcome.state);

        rec.question = q;
        rec.answer = a;
        rec.num_candidate_classes = candidates.classes.size();
        rec.num_candidate_questions = candidates.questions.size();
        rec.num_candidate_answers = candidates.answers_per_question.at(q).size();
        rec.ig = chosen->value;
        rec.degenerate_evidence = outcome.degenerate_evidence;
        record_rank(rec);
        rec.seconds = std::chrono::duration<double>(Clock::now() - started).count();
        result.turns.push_back(rec);
    }

    result.final_guess = rank_by_scores ? argmax(scores) : argmax(state.belief.probs());
    result.final_belief = state.belief.probs();
    return result;
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t world_index, std::size_t episode_index) {
    return derive_seed(derive_seed(master_seed, world_index), episode_index);
}

std::vector<RoundStats> aggregate(const std::vector<EpisodeResult>& episodes) {
    if (episodes.empty()) return {};
    const std::size_t rounds = episodes.front().turns.size();
    std::vector<RoundStats> curve(rounds);
    const double count = static_cast<double>(episodes.size());
    for (std::size_t r = 0; r < rounds; ++r) {
        double sum = 0.0, rank_sum = 0.0;
        for (const auto& e : episodes) {
            if (e.turns.size() != rounds) throw ValidationError("aggregate: episodes differ in round count");
            sum += e.turns[r].pmr;
            rank_sum += e.turns[r].rank;
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (const auto& e : episodes) {
            const double d = e.turns[r].pmr - mean;
            ss += d * d;
        }
        auto& s = curve[r];
        s.round = static_cast<std::uint32_t>(r);
        s.mean_pmr = mean;
        s.stderr_pmr = episodes.size() > 1 ? std::sqrt(ss / (count - 1.0)) / std::sqrt(count) : 0.0;
        s.mean_rank = rank_sum / count;
        s.episodes = episodes.size();
    }
    return curve;
}

BatchResult run_batch(const std::vector<World>& worlds, const QuestionerConfig& questioner,
                      const PlayersFactory& players_for, const BatchConfig& config) {
    questioner.validate();
    config.caption.validate();
    std::vector<Players> players;
    players.reserve(worlds.size());
    for (std::size_t w = 0; w < worlds.size(); ++w) players.push_back(players_for(worlds[w], w));

    const std::size_t per_world = config.episodes_per_world;
    const std::size_t total = worlds.size() * per_world;
    BatchResult out;
    out.episodes.resize(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                const std::size_t w = i / per_world, e = i % per_world;
                const auto seed = episode_seed(config.master_seed, w, e);
                Rng episode_rng(derive_seed(seed, kEpisodeStream));
                const Episode episode = sample_episode(worlds[w], config.caption, episode_rng);
                out.episodes[i] = run_episode(worlds[w], episode, questioner, players[w].questioner,
                                              *players[w].answerer, seed);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(config.parallelism, total));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    out.curve = aggregate(out.episodes);
    for (const auto& e : out.episodes) {
        for (const auto& t : e.turns) out.degenerate_updates += t.degenerate_evidence ? 1 : 0;
    }
    return out;
}

std::string to_string(Strategy s) {
    switch (s) {
    case Strategy::AQMPlus: return "AQMplus";
    case Strategy::Guesser: return "Guesser";
    case Strategy::RandomQ: return "RandomQ";
    case Strategy::Hybrid: return "Hybrid";
    }
    return "?";
}

std::string to_string(LearningSetting s) {
    switch (s) {
    case LearningSetting::IndA: return "indA";
    case LearningSetting::DepA: return "depA";
    case LearningSetting::TrueA: return "trueA";
    }
    return "?";
}

std::string to_string(PriorMode m) { return m == PriorMode::Caption ? "caption" : "uniform"; }
std::string to_string(HistoryMode m) { return m == HistoryMode::Full ? "full" : "ignore"; }

Strategy parse_strategy(const std::string& s) {
    if (s == "AQMplus") return Strategy::AQMPlus;
    if (s == "Guesser") return Strategy::Guesser;
    if (s == "RandomQ") return Strategy::RandomQ;
    if (s == "Hybrid") return Strategy::Hybrid;
    throw ValidationError("invalid strategy: unknown value '" + s + "'");
}

LearningSetting parse_learning_setting(const std::string& s) {
    if (s == "indA") return LearningSetting::IndA;
    if (s == "depA") return LearningSetting::DepA;
    if (s == "trueA") return LearningSetting::TrueA;
    throw ValidationError("invalid setting: unknown value '" + s + "'");
}

PriorMode parse_prior_mode(const std::string& s) {
    if (s == "caption") return PriorMode::Caption;
    if (s == "uniform") return PriorMode::Uniform;
    throw ValidationError("invalid prior_mode: unknown value '" + s + "'");
}

HistoryMode parse_history_mode(const std::string& s) {
    if (s == "full") return HistoryMode::Full;
    if (s == "ignore") return HistoryMode::Ignore;
    throw ValidationError("invalid history_mode: unknown value '" + s + "'");
}

}  // namespace aqm
