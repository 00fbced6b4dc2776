#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aqm/common.hpp"
#include "aqm/rng.hpp"

namespace aqm {

enum class TableMode { FeatureDerived, DenseRandom };

/// How class feature vectors are laid out.
/// BinaryCode assigns class c the low F bits of c (requires N <= 2^F).
enum class ClassLayout { Random, BinaryCode };

inline constexpr AnswerId kYes = 0;
inline constexpr AnswerId kNo = 1;

struct WorldSpec {
    std::uint32_t num_classes = 500;
    std::uint32_t num_features = 32;
    std::uint32_t num_questions = 200;
    std::uint32_t num_answers = 5;
    double answer_noise = 0.1;
    TableMode table_mode = TableMode::FeatureDerived;
    ClassLayout class_layout = ClassLayout::Random;
    std::uint64_t seed = 1;
    // Mass given to the non-yes/no answers when num_answers > 2.
    double extra_answer_mass = 0.05;
    // Per-feature prevalence is 0.5 + spread * (u_f - 0.5), u_f uniform in
    // [0, 1). 0 gives fair coins for every feature.
    double feature_spread = 1.0;

    /// Throws ValidationError naming the offending field.
    void validate() const;

    bool operator==(const WorldSpec&) const = default;
};

/// Synthetic identification universe with an exact answer table.
///
/// Classes carry binary feature vectors, each question probes one feature,
/// and answer_row(c, q) is the true answerer's distribution over the answer
/// vocabulary. Immutable once built.
class World {
public:
    /// Assembles and validates a world from explicit parts. `class_features`
    /// is row-major N x F (0/1), `answer_table` is row-major N x Q x A.
    World(WorldSpec spec, std::vector<std::uint8_t> class_features,
          std::vector<FeatureId> question_feature, std::vector<double> answer_table,
          std::vector<std::string> answer_labels, std::vector<std::string> question_labels);

    const WorldSpec& spec() const { return spec_; }
    std::uint32_t num_classes() const { return spec_.num_classes; }
    std::uint32_t num_features() const { return spec_.num_features; }
    std::uint32_t num_questions() const { return spec_.num_questions; }
    std::uint32_t num_answers() const { return spec_.num_answers; }

    bool has_feature(ClassId c, FeatureId f) const {
        return class_features_[std::size_t{c} * spec_.num_features + f] != 0;
    }
    FeatureId question_feature(QuestionId q) const { return question_feature_[q]; }
    std::span<const double> answer_row(ClassId c, QuestionId q) const {
        return {answer_table_.data() + (std::size_t{c} * spec_.num_questions + q) * spec_.num_answers,
                spec_.num_answers};
    }

    const std::vector<std::uint8_t>& class_features() const { return class_features_; }
    const std::vector<FeatureId>& question_features() const { return question_feature_; }
    const std::vector<double>& answer_table() const { return answer_table_; }
    const std::vector<std::string>& answer_labels() const { return answer_labels_; }
    const std::vector<std::string>& question_labels() const { return question_labels_; }

    bool operator==(const World&) const = default;

private:
    WorldSpec spec_;
    std::vector<std::uint8_t> class_features_;
    std::vector<FeatureId> question_feature_;
    std::vector<double> answer_table_;
    std::vector<std::string> answer_labels_;
    std::vector<std::string> question_labels_;
};

World generate_world(const WorldSpec& spec);

/// Default labels: "yes", "no", "other2", ...
std::vector<std::string> default_answer_labels(std::uint32_t num_answers);
/// "feature <f>?" per question.
std::vector<std::string> default_question_labels(const std::vector<FeatureId>& question_feature);

struct CaptionParams {
    std::uint32_t num_revealed = 8;
    double flip_prob = 0.25;

    void validate() const;
    bool operator==(const CaptionParams&) const = default;
};

struct CaptionBit {
    FeatureId feature;
    bool bit;
    bool operator==(const CaptionBit&) const = default;
};

/// A game instance: the hidden target plus the noisy caption evidence h0.
struct Episode {
    ClassId target = 0;
    std::vector<CaptionBit> caption;
    CaptionParams caption_params;

    bool operator==(const Episode&) const = default;

    bool mentions(FeatureId f) const;
    void validate_for(const World& world) const;
};

/// Draws target uniformly, then F0 distinct features of the target, each bit
/// flipped with probability flip_prob. Throws ValidationError if F0 > F.
Episode sample_episode(const World& world, const CaptionParams& params, Rng& rng);

/// Caption floor: with flip_prob = 0 a mismatch scores ln(kCaptionFloor).
inline constexpr double kCaptionFloor = 1e-6;

/// Log-likelihood of the caption under each class.
std::vector<double> caption_scores(const World& world, const Episode& episode);

// Serialization (versioned JSON document).
inline constexpr int kWorldFileVersion = 1;

std::string world_to_json(const World& world);
World world_from_json(const std::string& text);
void save_world(const World& world, const std::filesystem::path& path);
World load_world(const std::filesystem::path& path);

std::string to_string(TableMode mode);
std::string to_string(ClassLayout layout);
TableMode parse_table_mode(const std::string& s);
ClassLayout parse_class_layout(const std::string& s);

}  // namespace aqm
