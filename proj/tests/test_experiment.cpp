#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "aqm/experiment.hpp"

namespace aqm {
namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.world.num_classes = 30;
    c.world.num_features = 8;
    c.world.num_questions = 20;
    c.world.num_answers = 3;
    c.world.seed = 4;
    c.num_worlds = 2;
    c.caption.num_revealed = 2;
    c.episodes_per_world = 4;
    c.questioner.rounds = 4;
    return c;
}

TEST(ExperimentJson, RoundTripPreservesEveryField) {
    ExperimentConfig c = tiny_config();
    c.world_file = "worlds/w.json";
    c.questioner.strategy = Strategy::RandomQ;
    c.questioner.sampler.answer_mode = AnswerMode::Extended;
    c.questioner.sampler.question_mode = QuestionMode::Gen1Q;
    c.questioner.lambda = 0.5;
    c.questioner.setting = LearningSetting::DepA;
    c.questioner.prior = PriorMode::Uniform;
    c.models.indA_mix = 0.3;
    c.models.depA_policy = "guesser";
    c.master_seed = 99;
    c.parallelism = 3;
    const auto back = experiment_from_json(experiment_to_json(c));
    EXPECT_EQ(back.world_file, c.world_file);
    EXPECT_EQ(back.world, c.world);
    EXPECT_EQ(back.num_worlds, c.num_worlds);
    EXPECT_EQ(back.caption, c.caption);
    EXPECT_EQ(back.questioner, c.questioner);
    EXPECT_EQ(back.models, c.models);
    EXPECT_EQ(back.episodes_per_world, c.episodes_per_world);
    EXPECT_EQ(back.master_seed, c.master_seed);
    EXPECT_EQ(back.parallelism, c.parallelism);
    EXPECT_EQ(experiment_to_json(back), experiment_to_json(c));
}

TEST(ExperimentJson, AbsentFieldsKeepBase) {
    const ExperimentConfig base = tiny_config();
    const auto c = experiment_from_json(R"({"master_seed": 12, "questioner": {"rounds": 7}})", base);
    EXPECT_EQ(c.master_seed, 12u);
    EXPECT_EQ(c.questioner.rounds, 7u);
    EXPECT_EQ(c.questioner.sampler, base.questioner.sampler);
    EXPECT_EQ(c.world, base.world);
}

TEST(ExperimentJson, UnknownFieldNamesPath) {
    try {
        experiment_from_json(R"({"questioner": {"k_clases": 3}})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("questioner.k_clases"), std::string::npos) << e.what();
    }
}

TEST(ExperimentJson, RejectsNewerVersionAndBadTypes) {
    EXPECT_THROW(experiment_from_json(R"({"version": 99})"), ParseError);
    EXPECT_THROW(experiment_from_json(R"({"master_seed": "one"})"), ParseError);
    EXPECT_THROW(experiment_from_json("{not json"), ParseError);
    EXPECT_THROW(experiment_from_json(R"({"questioner": {"strategy": "Oracle"}})"), ValidationError);
}

TEST(ExperimentConfig, ValidateNamesField) {
    ExperimentConfig c = tiny_config();
    c.caption.num_revealed = 50;
    EXPECT_THROW(c.validate(), ValidationError);
    c = tiny_config();
    c.models.indA_mix = 1.5;
    EXPECT_THROW(c.validate(), ValidationError);
    c = tiny_config();
    c.questioner.sampler.k_classes = 0;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Experiment, WorldSeedsAreConsecutive) {
    const auto worlds = build_worlds(tiny_config());
    ASSERT_EQ(worlds.size(), 2u);
    EXPECT_EQ(worlds[0].spec().seed, 4u);
    EXPECT_EQ(worlds[1].spec().seed, 5u);
}

TEST(Experiment, RunIsDeterministic) {
    const auto c = tiny_config();
    const auto a = run_experiment(c);
    const auto b = run_experiment(c);
    ASSERT_EQ(a.curve.size(), 5u);
    EXPECT_EQ(a.curve, b.curve);
    EXPECT_EQ(a.episodes.size(), 8u);
}

TEST(Experiment, LearnedSettingsRun) {
    auto c = tiny_config();
    c.models.indA_triples = 2000;
    c.models.depA_dialogs = 200;
    for (auto s : {LearningSetting::IndA, LearningSetting::DepA}) {
        c.questioner.setting = s;
        const auto r = run_experiment(c);
        ASSERT_EQ(r.curve.size(), 5u);
        for (const auto& row : r.curve) {
            EXPECT_GE(row.mean_pmr, 0.0);
            EXPECT_LE(row.mean_pmr, 1.0);
        }
    }
}

TEST(CurveCsv, RoundTrip) {
    const std::vector<RoundStats> curve{{0, 0.5, 0.01, 15.5, 8}, {1, 0.75, 0.02, 8.25, 8}};
    std::stringstream ss;
    write_curve_csv(ss, curve);
    EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "round,mean_pmr,stderr_pmr,mean_rank,episodes");
    EXPECT_EQ(read_curve_csv(ss), curve);
}

TEST(CurveCsv, RejectsMalformedInput) {
    std::stringstream bad_header("round,pmr\n0,0.5\n");
    EXPECT_THROW(read_curve_csv(bad_header), ParseError);
    std::stringstream bad_row("round,mean_pmr,stderr_pmr,mean_rank,episodes\n0;0.5\n");
    EXPECT_THROW(read_curve_csv(bad_row), ParseError);
}

TEST(Metadata, RecordsConfigAndSchema) {
    const auto c = tiny_config();
    const auto r = run_experiment(c);
    const auto j = nlohmann::json::parse(results_metadata_json(c, r));
    EXPECT_EQ(j["results_schema"], kResultsSchemaVersion);
    EXPECT_EQ(j["tool_version"], kVersionString);
    EXPECT_EQ(j["episodes"], 8);
    EXPECT_EQ(j["config"]["master_seed"], 1);
}

}  // namespace
}  // namespace aqm
