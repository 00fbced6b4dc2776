#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aqm/planner.hpp"
#include "aqm/world.hpp"

namespace aqm {

/// How the indA / depA approximations of the answerer are fitted.
struct ModelParams {
    double alpha = 0.1;
    // indA triple budget; 0 means 50 * N * |Q|.
    std::uint64_t indA_triples = 0;
    // Mixture weight toward uniform applied to the fitted indA model,
    // standing in for the gap between offline data and the live answerer.
    double indA_mix = 0.8;
    // depA rollout dialogs; 0 means the indA triple budget divided by T.
    std::uint64_t depA_dialogs = 0;
    // Rollout questioner for depA: "random" or "guesser".
    std::string depA_policy = "random";
    double depA_mix = 0.0;
    // Repeat-answer consistency mixed into aprxAgen; 0 disables it.
    double consistency_rho = 0.0;
    double caption_weight = kDefaultCaptionWeight;

    bool operator==(const ModelParams&) const = default;
};

struct ExperimentConfig {
    std::optional<std::string> world_file;
    WorldSpec world;
    // Worlds generated with seeds world.seed, world.seed + 1, ...
    std::uint32_t num_worlds = 10;
    CaptionParams caption;
    QuestionerConfig questioner;
    ModelParams models;
    std::uint64_t episodes_per_world = 20;
    std::uint64_t master_seed = 1;
    std::uint64_t parallelism = 1;

    void validate() const;
};

inline constexpr int kExperimentFormatVersion = 1;
inline constexpr int kResultsSchemaVersion = 1;

/// Serializes every field, including defaults (a fully resolved config).
std::string experiment_to_json(const ExperimentConfig& config);
/// Fields absent from `text` keep their value from `base`.
ExperimentConfig experiment_from_json(const std::string& text, const ExperimentConfig& base = {});

std::vector<World> build_worlds(const ExperimentConfig& config);

/// aprxAgen for the configured learning setting, proposer and true answerer.
Players build_players(const World& world, std::size_t world_index, const ExperimentConfig& config);

/// The indA / depA / trueA answer model alone.
AnswerModelPtr build_approx_model(const World& world, std::size_t world_index, LearningSetting setting,
                                  const ModelParams& params, const CaptionParams& caption, std::uint32_t rounds,
                                  std::uint64_t master_seed);

BatchResult run_experiment(const ExperimentConfig& config);
BatchResult run_experiment(const ExperimentConfig& config, const std::vector<World>& worlds);

/// `round,mean_pmr,stderr_pmr,mean_rank,episodes` plus one row per round.
void write_curve_csv(std::ostream& out, const std::vector<RoundStats>& curve);
std::vector<RoundStats> read_curve_csv(std::istream& in);

/// Resolved config, results schema and tool version, as JSON.
std::string results_metadata_json(const ExperimentConfig& config, const BatchResult& result);

inline constexpr const char* kVersionString = "0.1.0";

}  // namespace aqm
