#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aqm/common.hpp"
#include "aqm/infogain.hpp"
#include "aqm/models.hpp"
#include "aqm/posterior.hpp"
#include "aqm/sampler.hpp"
#include "aqm/world.hpp"

namespace aqm {

enum class Strategy { AQMPlus, Guesser, RandomQ, Hybrid };
enum class LearningSetting { IndA, DepA, TrueA };
enum class PriorMode { Caption, Uniform };
enum class HistoryMode { Full, Ignore };

struct QuestionerConfig {
    Strategy strategy = Strategy::AQMPlus;
    SamplerConfig sampler;
    double lambda = 1.0;
    std::uint32_t rounds = 10;
    LearningSetting setting = LearningSetting::TrueA;
    PriorMode prior = PriorMode::Caption;
    HistoryMode history = HistoryMode::Full;

    void validate() const;
    bool operator==(const QuestionerConfig&) const = default;
};

/// The questioner's internal models: aprxAgen and the question proposer.
struct QuestionerModels {
    AnswerModelPtr approx;
    ProposerPtr proposer;
};

struct TurnRecord {
    std::uint32_t round = 0;
    std::optional<QuestionId> question;
    std::optional<AnswerId> answer;
    std::size_t num_candidate_classes = 0;
    std::size_t num_candidate_questions = 0;
    std::size_t num_candidate_answers = 0;
    double ig = 0.0;
    double rank = 0.0;
    double pmr = 0.0;
    bool degenerate_evidence = false;
    // Pool exhausted before this round; rank and pmr repeat the last round.
    bool carried_forward = false;
    double seconds = 0.0;
};

struct EpisodeResult {
    std::uint64_t world_seed = 0;
    ClassId target = 0;
    std::uint64_t seed = 0;
    /// Round 0 (prior only) through round T.
    std::vector<TurnRecord> turns;
    ClassId final_guess = 0;
    bool truncated = false;
    std::vector<double> final_belief;
};

/// Equality of everything except wall-clock timings.
bool same_transcript(const EpisodeResult& a, const EpisodeResult& b);

struct Selection {
    QuestionId question;
    std::vector<IGReport> reports;
};

/// Argmax of top-K information gain over candidates.questions, ties by
/// ascending question id. Throws NoCandidates when there are none.
Selection select_question(const Belief& belief, const DialogHistory& history, const CandidateSets& candidates,
                          const AnswerModel& approx);

struct EpisodeState {
    Belief belief;
    DialogHistory history;
};

struct StepOutcome {
    EpisodeState state;
    bool degenerate_evidence = false;
};

/// Appends (q, a) and applies the Bayes update with aprxAgen's likelihood
/// over every class. Degenerate evidence keeps the previous belief.
StepOutcome step(const EpisodeState& state, QuestionId q, AnswerId a, const AnswerModel& approx,
                 HistoryMode history_mode = HistoryMode::Full);

/// Plays one game: the questioner against `answerer` for the episode's target.
EpisodeResult run_episode(const World& world, const Episode& episode, const QuestionerConfig& config,
                          const QuestionerModels& models, const AnswerModel& answerer, std::uint64_t seed);

/// Models for one world plus the true answerer.
struct Players {
    QuestionerModels questioner;
    AnswerModelPtr answerer;
};

using PlayersFactory = std::function<Players(const World& world, std::size_t world_index)>;

struct RoundStats {
    std::uint32_t round = 0;
    double mean_pmr = 0.0;
    double stderr_pmr = 0.0;
    double mean_rank = 0.0;
    std::size_t episodes = 0;
    bool operator==(const RoundStats&) const = default;
};

struct BatchConfig {
    std::size_t episodes_per_world = 1;
    CaptionParams caption;
    std::uint64_t master_seed = 0;
    std::size_t parallelism = 1;
};

struct BatchResult {
    std::vector<EpisodeResult> episodes;  // world-major, episode-minor
    std::vector<RoundStats> curve;
    std::size_t degenerate_updates = 0;
};

/// Seed of episode `episode_index` in world `world_index`.
std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t world_index, std::size_t episode_index);

/// Runs every episode of every world. Results do not depend on parallelism.
BatchResult run_batch(const std::vector<World>& worlds, const QuestionerConfig& questioner,
                      const PlayersFactory& players, const BatchConfig& config);

/// Per-round mean PMR, its standard error and mean rank.
std::vector<RoundStats> aggregate(const std::vector<EpisodeResult>& episodes);

std::string to_string(Strategy s);
std::string to_string(LearningSetting s);
std::string to_string(PriorMode m);
std::string to_string(HistoryMode m);
Strategy parse_strategy(const std::string& s);
LearningSetting parse_learning_setting(const std::string& s);
PriorMode parse_prior_mode(const std::string& s);
HistoryMode parse_history_mode(const std::string& s);

}  // namespace aqm
