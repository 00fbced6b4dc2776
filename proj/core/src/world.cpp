#include "aqm/world.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aqm {

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
    throw ValidationError("invalid " + field + ": " + why);
}

}  // namespace

void WorldSpec::validate() const {
    if (num_classes < 1) invalid("num_classes", "must be >= 1");
    if (num_features < 1) invalid("num_features", "must be >= 1");
    if (num_questions < 1) invalid("num_questions", "must be >= 1");
    if (num_answers < 2) invalid("num_answers", "must be >= 2");
    if (!(answer_noise >= 0.0 && answer_noise < 0.5)) invalid("answer_noise", "must be in [0, 0.5)");
    if (!(extra_answer_mass >= 0.0 && extra_answer_mass < 1.0)) {
        invalid("extra_answer_mass", "must be in [0, 1)");
    }
    if (!(feature_spread >= 0.0 && feature_spread <= 1.0)) invalid("feature_spread", "must be in [0, 1]");
    if (class_layout == ClassLayout::BinaryCode) {
        if (num_features < 32 && num_classes > (std::uint64_t{1} << num_features)) {
            invalid("num_classes", "binary-code layout needs num_classes <= 2^num_features");
        }
    }
}

World::World(WorldSpec spec, std::vector<std::uint8_t> class_features,
             std::vector<FeatureId> question_feature, std::vector<double> answer_table,
             std::vector<std::string> answer_labels, std::vector<std::string> question_labels)
    : spec_(std::move(spec)),
      class_features_(std::move(class_features)),
      question_feature_(std::move(question_feature)),
      answer_table_(std::move(answer_table)),
      answer_labels_(std::move(answer_labels)),
      question_labels_(std::move(question_labels)) {
    spec_.validate();
    const std::size_t n = spec_.num_classes, f = spec_.num_features, q = spec_.num_questions,
                      a = spec_.num_answers;
    if (class_features_.size() != n * f) invalid("class_features", "expected N*F entries");
    for (auto bit : class_features_) {
        if (bit > 1) invalid("class_features", "entries must be 0 or 1");
    }
    if (question_feature_.size() != q) invalid("question_feature", "expected one entry per question");
    for (auto feature : question_feature_) {
        if (feature >= f) invalid("question_feature", "feature index out of range");
    }
    if (answer_table_.size() != n * q * a) invalid("answer_table", "expected N*Q*A entries");
    for (std::size_t row = 0; row < n * q; ++row) {
        double sum = 0.0;
        for (std::size_t k = 0; k < a; ++k) {
            const double p = answer_table_[row * a + k];
            if (!(p >= 0.0 && p <= 1.0)) invalid("answer_table", "entries must be in [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            std::ostringstream os;
            os << "row (class " << row / q << ", question " << row % q << ") sums to " << sum;
            invalid("answer_table", os.str());
        }
    }
    if (answer_labels_.size() != a) invalid("answer_labels", "expected one label per answer");
    if (question_labels_.size() != q) invalid("question_labels", "expected one label per question");
}

std::vector<std::string> default_answer_labels(std::uint32_t num_answers) {
    std::vector<std::string> labels;
    labels.reserve(num_answers);
    for (std::uint32_t k = 0; k < num_answers; ++k) {
        if (k == kYes) {
            labels.emplace_back("yes");
        } else if (k == kNo) {
            labels.emplace_back("no");
        } else {
            labels.push_back("other" + std::to_string(k));
        }
    }
    return labels;
}

std::vector<std::string> default_question_labels(const std::vector<FeatureId>& question_feature) {
    std::vector<std::string> labels;
    labels.reserve(question_feature.size());
    for (auto f : question_feature) {
        labels.push_back("feature " + std::to_string(f) + "?");
    }
    return labels;
}

World generate_world(const WorldSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::uint32_t n = spec.num_classes, f = spec.num_features, q = spec.num_questions,
                        a = spec.num_answers;

    std::vector<double> prevalence(f, 0.5);
    if (spec.class_layout == ClassLayout::Random) {
        for (auto& p : prevalence) p = 0.5 + spec.feature_spread * (rng.uniform() - 0.5);
    }

    std::vector<std::uint8_t> features(std::size_t{n} * f);
    for (std::uint32_t c = 0; c < n; ++c) {
        for (std::uint32_t j = 0; j < f; ++j) {
            bool bit = false;
            if (spec.class_layout == ClassLayout::BinaryCode) {
                bit = j < 64 && ((std::uint64_t{c} >> j) & 1u);
            } else {
                bit = rng.bernoulli(prevalence[j]);
            }
            features[std::size_t{c} * f + j] = bit ? 1 : 0;
        }
    }

    // The first F questions each probe feature q. The rest probe features
    // drawn with weight (p_f - 0.5)^2, so the tail of the vocabulary mostly
    // asks about lopsided features; uniform when every prevalence is 0.5.
    std::vector<double> weights(f);
    double total_weight = 0.0;
    for (std::uint32_t j = 0; j < f; ++j) {
        weights[j] = (prevalence[j] - 0.5) * (prevalence[j] - 0.5);
        total_weight += weights[j];
    }
    std::vector<FeatureId> question_feature(q);
    for (std::uint32_t k = 0; k < q; ++k) {
        if (k < f) {
            question_feature[k] = k;
        } else {
            question_feature[k] = static_cast<FeatureId>(total_weight > 0.0 ? rng.categorical(weights) : rng.below(f));
        }
    }

    std::vector<double> table(std::size_t{n} * q * a);
    for (std::uint32_t c = 0; c < n; ++c) {
        for (std::uint32_t k = 0; k < q; ++k) {
            double* row = table.data() + (std::size_t{c} * q + k) * a;
            if (spec.table_mode == TableMode::DenseRandom) {
                // Symmetric Dirichlet(1): normalized unit exponentials.
                double sum = 0.0;
                for (std::uint32_t m = 0; m < a; ++m) {
                    row[m] = -std::log1p(-rng.uniform());
                    sum += row[m];
                }
                for (std::uint32_t m = 0; m < a; ++m) row[m] /= sum;
                continue;
            }
            const bool set = features[std::size_t{c} * f + question_feature[k]] != 0;
            const double yes = set ? 1.0 - spec.answer_noise : spec.answer_noise;
            const double binary_mass = a > 2 ? 1.0 - spec.extra_answer_mass : 1.0;
            row[kYes] = yes * binary_mass;
            row[kNo] = (1.0 - yes) * binary_mass;
            for (std::uint32_t m = 2; m < a; ++m) {
                row[m] = spec.extra_answer_mass / static_cast<double>(a - 2);
            }
            double sum = 0.0;
            for (std::uint32_t m = 0; m < a; ++m) sum += row[m];
            for (std::uint32_t m = 0; m < a; ++m) row[m] /= sum;
        }
    }

    auto question_labels = default_question_labels(question_feature);
    return World(spec, std::move(features), std::move(question_feature), std::move(table),
                 default_answer_labels(a), std::move(question_labels));
}

void CaptionParams::validate() const {
    if (!(flip_prob >= 0.0 && flip_prob < 0.5)) invalid("caption.flip_prob", "must be in [0, 0.5)");
}

bool Episode::mentions(FeatureId f) const {
    return std::any_of(caption.begin(), caption.end(),
                       [f](const CaptionBit& b) { return b.feature == f; });
}

void Episode::validate_for(const World& world) const {
    caption_params.validate();
    if (target >= world.num_classes()) invalid("episode.target", "not a class id");
    std::vector<bool> seen(world.num_features(), false);
    for (const auto& b : caption) {
        if (b.feature >= world.num_features()) invalid("episode.caption", "feature out of range");
        if (seen[b.feature]) invalid("episode.caption", "duplicate revealed feature");
        seen[b.feature] = true;
    }
}

Episode sample_episode(const World& world, const CaptionParams& params, Rng& rng) {
    params.validate();
    if (params.num_revealed > world.num_features()) {
        invalid("caption.num_revealed", "exceeds num_features");
    }
    Episode episode;
    episode.caption_params = params;
    episode.target = static_cast<ClassId>(rng.below(world.num_classes()));
    const auto revealed = rng.sample_without_replacement(world.num_features(), params.num_revealed);
    episode.caption.reserve(revealed.size());
    for (auto f : revealed) {
        const bool flipped = rng.bernoulli(params.flip_prob);
        episode.caption.push_back({f, world.has_feature(episode.target, f) != flipped});
    }
    return episode;
}

std::vector<double> caption_scores(const World& world, const Episode& episode) {
    episode.validate_for(world);
    const double eta = episode.caption_params.flip_prob;
    const double match = std::log(1.0 - eta);
    const double mismatch = std::log(eta > 0.0 ? eta : kCaptionFloor);
    std::vector<double> scores(world.num_classes(), 0.0);
    for (ClassId c = 0; c < world.num_classes(); ++c) {
        for (const auto& b : episode.caption) {
            scores[c] += world.has_feature(c, b.feature) == b.bit ? match : mismatch;
        }
    }
    return scores;
}

std::string to_string(TableMode mode) {
    return mode == TableMode::FeatureDerived ? "feature-derived" : "dense-random";
}

std::string to_string(ClassLayout layout) {
    return layout == ClassLayout::Random ? "random" : "binary-code";
}

TableMode parse_table_mode(const std::string& s) {
    if (s == "feature-derived") return TableMode::FeatureDerived;
    if (s == "dense-random") return TableMode::DenseRandom;
    invalid("table_mode", "unknown value '" + s + "'");
}

ClassLayout parse_class_layout(const std::string& s) {
    if (s == "random") return ClassLayout::Random;
    if (s == "binary-code") return ClassLayout::BinaryCode;
    invalid("class_layout", "unknown value '" + s + "'");
}

}  // namespace aqm
