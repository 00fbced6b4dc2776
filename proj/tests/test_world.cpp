#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>

#include "aqm/world.hpp"
#include "test_util.hpp"

namespace aqm {
namespace {

WorldSpec small_spec(std::uint32_t n, std::uint32_t f, std::uint32_t q, std::uint32_t a, double eps,
                     std::uint64_t seed) {
    WorldSpec s;
    s.num_classes = n;
    s.num_features = f;
    s.num_questions = q;
    s.num_answers = a;
    s.answer_noise = eps;
    s.seed = seed;
    return s;
}

std::string validation_message(const WorldSpec& spec) {
    try {
        spec.validate();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

TEST(GenerateWorld, NoiselessBinaryRowIsDeterministic) {
    auto spec = small_spec(16, 4, 6, 2, 0.0, 3);
    const World w = generate_world(spec);
    for (ClassId c = 0; c < w.num_classes(); ++c) {
        for (QuestionId q = 0; q < w.num_questions(); ++q) {
            const auto row = w.answer_row(c, q);
            if (w.has_feature(c, w.question_feature(q))) {
                EXPECT_EQ(row[kYes], 1.0);
                EXPECT_EQ(row[kNo], 0.0);
            } else {
                EXPECT_EQ(row[kYes], 0.0);
                EXPECT_EQ(row[kNo], 1.0);
            }
        }
    }
}

TEST(GenerateWorld, SameSpecGivesIdenticalWorld) {
    const auto spec = small_spec(50, 8, 20, 5, 0.1, 99);
    EXPECT_EQ(generate_world(spec), generate_world(spec));
    EXPECT_EQ(world_to_json(generate_world(spec)), world_to_json(generate_world(spec)));
}

// tests/oracles/frozen.py, "world N=4 F=2 Q=2 A=2 eps=0.1 seed=7".
TEST(GenerateWorld, MatchesReferenceScriptSmallBinary) {
    const World w = generate_world(small_spec(4, 2, 2, 2, 0.1, 7));
    const int bits[4][2] = {{1, 1}, {1, 1}, {0, 1}, {1, 1}};
    for (ClassId c = 0; c < 4; ++c) {
        for (FeatureId f = 0; f < 2; ++f) EXPECT_EQ(w.has_feature(c, f), bits[c][f] == 1) << c << "," << f;
    }
    EXPECT_EQ(w.question_features(), (std::vector<FeatureId>{0, 1}));
    for (ClassId c = 0; c < 4; ++c) {
        for (QuestionId q = 0; q < 2; ++q) {
            const double yes = bits[c][q] ? 0.9 : 0.1;
            EXPECT_NEAR(w.answer_row(c, q)[0], yes, 1e-15);
            EXPECT_NEAR(w.answer_row(c, q)[1], 1.0 - yes, 1e-15);
        }
    }
}

// tests/oracles/frozen.py, "world N=3 F=2 Q=5 A=3 eps=0.2 seed=13".
TEST(GenerateWorld, MatchesReferenceScriptWithExtraAnswers) {
    const World w = generate_world(small_spec(3, 2, 5, 3, 0.2, 13));
    EXPECT_EQ(w.question_features(), (std::vector<FeatureId>{0, 1, 0, 1, 1}));
    const int bits[3][2] = {{1, 1}, {1, 0}, {0, 1}};
    for (ClassId c = 0; c < 3; ++c) {
        for (FeatureId f = 0; f < 2; ++f) EXPECT_EQ(w.has_feature(c, f), bits[c][f] == 1);
        for (QuestionId q = 0; q < 5; ++q) {
            const bool set = bits[c][w.question_feature(q)] == 1;
            EXPECT_NEAR(w.answer_row(c, q)[0], set ? 0.76 : 0.19, 1e-15);
            EXPECT_NEAR(w.answer_row(c, q)[1], set ? 0.19 : 0.76, 1e-15);
            EXPECT_NEAR(w.answer_row(c, q)[2], 0.05, 1e-15);
        }
    }
}

// tests/oracles/frozen.py, "dense world N=2 F=1 Q=2 A=3 seed=3".
TEST(GenerateWorld, DenseRandomMatchesReferenceScript) {
    auto spec = small_spec(2, 1, 2, 3, 0.1, 3);
    spec.table_mode = TableMode::DenseRandom;
    const World w = generate_world(spec);
    const double expected[2][2][3] = {
        {{0.3149326264688482, 0.17207710649846952, 0.5129902670326824},
         {0.28157913160858145, 0.6252900016590034, 0.0931308667324152}},
        {{0.06442779524624803, 0.48266235288636916, 0.4529098518673829},
         {0.8831468387185774, 0.10938785341209416, 0.00746530786932851}}};
    for (ClassId c = 0; c < 2; ++c) {
        for (QuestionId q = 0; q < 2; ++q) {
            for (AnswerId a = 0; a < 3; ++a) EXPECT_NEAR(w.answer_row(c, q)[a], expected[c][q][a], 1e-15);
        }
    }
}

TEST(GenerateWorld, RowsAreStochasticAcrossModes) {
    for (auto mode : {TableMode::FeatureDerived, TableMode::DenseRandom}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto spec = small_spec(20, 6, 15, 2 + static_cast<std::uint32_t>(seed), 0.05 * seed, seed);
            spec.table_mode = mode;
            const World w = generate_world(spec);
            for (ClassId c = 0; c < w.num_classes(); ++c) {
                for (QuestionId q = 0; q < w.num_questions(); ++q) {
                    const auto row = w.answer_row(c, q);
                    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-9);
                    for (double p : row) EXPECT_GE(p, 0.0);
                }
            }
            for (auto f : w.question_features()) EXPECT_LT(f, w.num_features());
        }
    }
}

TEST(GenerateWorld, FirstQuestionsCoverEveryFeature) {
    const World w = generate_world(small_spec(30, 7, 40, 3, 0.1, 4));
    for (QuestionId q = 0; q < 7; ++q) EXPECT_EQ(w.question_feature(q), q);
}

TEST(GenerateWorld, BinaryCodeLayoutEncodesClassId) {
    auto spec = small_spec(64, 6, 6, 2, 0.0, 1);
    spec.class_layout = ClassLayout::BinaryCode;
    const World w = generate_world(spec);
    for (ClassId c = 0; c < 64; ++c) {
        for (FeatureId f = 0; f < 6; ++f) EXPECT_EQ(w.has_feature(c, f), ((c >> f) & 1u) == 1u);
    }
    spec.num_classes = 65;
    EXPECT_THROW(generate_world(spec), ValidationError);
}

TEST(WorldSpecValidation, NamesOffendingField) {
    auto spec = small_spec(4, 2, 2, 2, 0.1, 1);
    spec.num_answers = 1;
    EXPECT_NE(validation_message(spec).find("num_answers"), std::string::npos);
    spec = small_spec(4, 2, 2, 2, 0.5, 1);
    EXPECT_NE(validation_message(spec).find("answer_noise"), std::string::npos);
    spec = small_spec(0, 2, 2, 2, 0.1, 1);
    EXPECT_NE(validation_message(spec).find("num_classes"), std::string::npos);
    spec = small_spec(4, 0, 2, 2, 0.1, 1);
    EXPECT_NE(validation_message(spec).find("num_features"), std::string::npos);
    spec = small_spec(4, 2, 0, 2, 0.1, 1);
    EXPECT_NE(validation_message(spec).find("num_questions"), std::string::npos);
    spec = small_spec(4, 2, 2, 2, 0.1, 1);
    spec.feature_spread = 1.5;
    EXPECT_NE(validation_message(spec).find("feature_spread"), std::string::npos);
    EXPECT_THROW(generate_world(spec), ValidationError);
}

TEST(World, RejectsNonStochasticRows) {
    WorldSpec spec = small_spec(1, 1, 1, 2, 0.0, 1);
    EXPECT_THROW(World(spec, {1}, {0}, {0.7, 0.7}, default_answer_labels(2), {"feature 0?"}), ValidationError);
    EXPECT_THROW(World(spec, {1}, {0}, {1.2, -0.2}, default_answer_labels(2), {"feature 0?"}), ValidationError);
    EXPECT_THROW(World(spec, {1}, {3}, {1.0, 0.0}, default_answer_labels(2), {"feature 0?"}), ValidationError);
    EXPECT_NO_THROW(World(spec, {1}, {0}, {1.0, 0.0}, default_answer_labels(2), {"feature 0?"}));
}

TEST(SampleEpisode, NoiselessCaptionMatchesTarget) {
    const World w = generate_world(small_spec(40, 10, 10, 2, 0.1, 2));
    Rng rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto e = sample_episode(w, CaptionParams{6, 0.0}, rng);
        ASSERT_EQ(e.caption.size(), 6u);
        for (const auto& b : e.caption) EXPECT_EQ(b.bit, w.has_feature(e.target, b.feature));
    }
}

TEST(SampleEpisode, ZeroRevealedGivesEmptyCaption) {
    const World w = generate_world(small_spec(4, 3, 3, 2, 0.1, 2));
    Rng rng(1);
    EXPECT_TRUE(sample_episode(w, CaptionParams{0, 0.25}, rng).caption.empty());
}

TEST(SampleEpisode, TooManyRevealedIsAnError) {
    const World w = generate_world(small_spec(4, 3, 3, 2, 0.1, 2));
    Rng rng(1);
    EXPECT_THROW(sample_episode(w, CaptionParams{4, 0.25}, rng), ValidationError);
    EXPECT_THROW(sample_episode(w, CaptionParams{2, 0.5}, rng), ValidationError);
}

TEST(SampleEpisode, RevealedFeaturesAreDistinct) {
    const World w = generate_world(small_spec(10, 12, 12, 2, 0.1, 2));
    Rng rng(8);
    for (int i = 0; i < 100; ++i) {
        const auto e = sample_episode(w, CaptionParams{12, 0.3}, rng);
        std::vector<bool> seen(12, false);
        for (const auto& b : e.caption) {
            EXPECT_FALSE(seen[b.feature]);
            seen[b.feature] = true;
        }
        EXPECT_LT(e.target, 10u);
    }
}

// tests/oracles/frozen.py, "episode N=4 F=3 F0=2 eta=0.25".
TEST(SampleEpisode, MatchesReferenceScript) {
    auto spec = small_spec(4, 3, 3, 2, 0.1, 11);
    spec.feature_spread = 0.0;
    const World w = generate_world(spec);
    const int bits[4][3] = {{0, 1, 1}, {0, 0, 0}, {0, 1, 1}, {0, 1, 1}};
    for (ClassId c = 0; c < 4; ++c) {
        for (FeatureId f = 0; f < 3; ++f) EXPECT_EQ(w.has_feature(c, f), bits[c][f] == 1);
    }
    Rng rng(99);
    const auto e = sample_episode(w, CaptionParams{2, 0.25}, rng);
    EXPECT_EQ(e.target, 3u);
    EXPECT_EQ(e.caption, (std::vector<CaptionBit>{{1, false}, {2, true}}));
    for (double s : caption_scores(w, e)) EXPECT_NEAR(s, -1.6739764335716716, 1e-14);
}

TEST(CaptionScores, EmptyCaptionScoresZero) {
    const World w = generate_world(small_spec(5, 3, 3, 2, 0.1, 2));
    Episode e;
    e.caption_params = CaptionParams{0, 0.25};
    for (double s : caption_scores(w, e)) EXPECT_EQ(s, 0.0);
}

TEST(CaptionScores, SingleBitContribution) {
    const World w = test::make_world({{1}, {0}}, {0}, {0.1});
    Episode e;
    e.caption = {{0, true}};
    e.caption_params = CaptionParams{1, 0.25};
    const auto s = caption_scores(w, e);
    EXPECT_DOUBLE_EQ(s[0], std::log(0.75));
    EXPECT_DOUBLE_EQ(s[1], std::log(0.25));
}

// tests/oracles/frozen.py, "caption scores, 4 classes, hand bits".
TEST(CaptionScores, FourClassHandComputation) {
    const World w = test::make_world({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1}, {0.1, 0.1});
    Episode e;
    e.caption = {{0, true}, {1, false}};
    e.caption_params = CaptionParams{2, 0.25};
    const auto s = caption_scores(w, e);
    const double expected[] = {-1.6739764335716716, -2.772588722239781, -0.5753641449035618, -1.6739764335716716};
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(s[c], expected[c], 1e-14);
}

TEST(CaptionScores, InvariantUnderCaptionPermutation) {
    const World w = generate_world(small_spec(30, 8, 8, 2, 0.1, 6));
    Rng rng(2);
    const auto e = sample_episode(w, CaptionParams{6, 0.2}, rng);
    Episode reversed = e;
    std::reverse(reversed.caption.begin(), reversed.caption.end());
    const auto a = caption_scores(w, e), b = caption_scores(w, reversed);
    for (std::size_t c = 0; c < a.size(); ++c) EXPECT_NEAR(a[c], b[c], 1e-12);
}

TEST(CaptionScores, NoiselessMismatchUsesFloor) {
    const World w = test::make_world({{1}, {0}}, {0}, {0.1});
    Episode e;
    e.caption = {{0, true}};
    e.caption_params = CaptionParams{1, 0.0};
    const auto s = caption_scores(w, e);
    EXPECT_EQ(s[0], 0.0);
    EXPECT_DOUBLE_EQ(s[1], std::log(kCaptionFloor));
}

TEST(WorldFile, RoundTripIsExact) {
    auto spec = small_spec(12, 5, 9, 4, 0.15, 21);
    spec.extra_answer_mass = 0.08;
    const World w = generate_world(spec);
    const auto text = world_to_json(w);
    EXPECT_EQ(world_from_json(text), w);
    EXPECT_EQ(world_to_json(world_from_json(text)), text);
}

TEST(WorldFile, SaveAndLoad) {
    const auto path = std::filesystem::temp_directory_path() / "aqm_world_roundtrip.json";
    const World w = generate_world(small_spec(6, 3, 4, 3, 0.1, 8));
    save_world(w, path);
    EXPECT_EQ(load_world(path), w);
    std::filesystem::remove(path);
}

TEST(WorldFile, RejectsNewerVersion) {
    auto text = world_to_json(generate_world(small_spec(2, 1, 1, 2, 0.1, 1)));
    const auto pos = text.find("\"version\": 1");
    ASSERT_NE(pos, std::string::npos);
    text.replace(pos, 12, "\"version\": 9");
    try {
        world_from_json(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("version 9"), std::string::npos);
    }
}

TEST(WorldFile, NamesMissingField) {
    try {
        world_from_json(R"({"format": "aqm-world", "version": 1})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("spec"), std::string::npos);
    }
    EXPECT_THROW(world_from_json("not json"), ParseError);
}

TEST(WorldFile, LoadErrorNamesPath) {
    try {
        load_world("/nonexistent/world.json");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/world.json"), std::string::npos);
    }
}

TEST(WorldFile, ProbabilitiesKeepTwelveDigits) {
    auto spec = small_spec(3, 2, 2, 3, 0.1, 5);
    spec.table_mode = TableMode::DenseRandom;
    const World w = generate_world(spec);
    const World back = world_from_json(world_to_json(w));
    for (std::size_t i = 0; i < w.answer_table().size(); ++i) {
        EXPECT_NEAR(back.answer_table()[i], w.answer_table()[i], 1e-12);
    }
}

}  // namespace
}  // namespace aqm
