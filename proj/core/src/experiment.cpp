#include "aqm/experiment.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace aqm {

using json = nlohmann::ordered_json;

void ExperimentConfig::validate() const {
    if (!world_file) world.validate();
    if (num_worlds < 1) throw ValidationError("invalid num_worlds: must be >= 1");
    caption.validate();
    if (!world_file && caption.num_revealed > world.num_features) {
        throw ValidationError("invalid caption.num_revealed: exceeds world.num_features");
    }
    questioner.validate();
    if (!(models.alpha >= 0.0) || !std::isfinite(models.alpha)) throw ValidationError("invalid models.alpha: must be >= 0");
    if (!(models.indA_mix >= 0.0 && models.indA_mix <= 1.0)) throw ValidationError("invalid models.indA_mix: must be in [0, 1]");
    if (!(models.depA_mix >= 0.0 && models.depA_mix <= 1.0)) throw ValidationError("invalid models.depA_mix: must be in [0, 1]");
    if (!(models.consistency_rho >= 0.0 && models.consistency_rho <= 1.0)) {
        throw ValidationError("invalid models.consistency_rho: must be in [0, 1]");
    }
    if (!std::isfinite(models.caption_weight)) throw ValidationError("invalid models.caption_weight: must be finite");
    if (models.depA_policy != "random" && models.depA_policy != "guesser") {
        throw ValidationError("invalid models.depA_policy: expected 'random' or 'guesser'");
    }
    if (episodes_per_world < 1) throw ValidationError("invalid episodes_per_world: must be >= 1");
    if (parallelism < 1) throw ValidationError("invalid parallelism: must be >= 1");
}

namespace {

json spec_json(const WorldSpec& s) {
    return json{{"num_classes", s.num_classes},     {"num_features", s.num_features},
                {"num_questions", s.num_questions}, {"num_answers", s.num_answers},
                {"answer_noise", s.answer_noise},   {"table_mode", to_string(s.table_mode)},
                {"class_layout", to_string(s.class_layout)}, {"seed", s.seed},
                {"extra_answer_mass", s.extra_answer_mass}, {"feature_spread", s.feature_spread}};
}

// Reads obj[key] into out when present, with a path-qualified error.
template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    try {
        out = it->template get<T>();
    } catch (const json::exception& e) {
        throw ParseError("config field '" + path + key + "': " + e.what());
    }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
    if (!obj.is_object()) throw ParseError("config field '" + path + "': expected an object");
    std::set<std::string> names(known.begin(), known.end());
    for (const auto& [key, value] : obj.items()) {
        if (!names.count(key)) throw ParseError("config field '" + path + key + "': unknown field");
    }
}

template <typename Enum, typename Parse>
void read_enum(const json& obj, const char* key, Enum& out, const std::string& path, Parse parse) {
    const auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_string()) throw ParseError("config field '" + path + key + "': expected a string");
    out = parse(it->template get<std::string>());
}

void read_spec(const json& obj, WorldSpec& s, const std::string& path) {
    reject_unknown(obj, {"num_classes", "num_features", "num_questions", "num_answers", "answer_noise",
                         "table_mode", "class_layout", "seed", "extra_answer_mass", "feature_spread"}, path);
    read(obj, "num_classes", s.num_classes, path);
    read(obj, "num_features", s.num_features, path);
    read(obj, "num_questions", s.num_questions, path);
    read(obj, "num_answers", s.num_answers, path);
    read(obj, "answer_noise", s.answer_noise, path);
    read_enum(obj, "table_mode", s.table_mode, path, parse_table_mode);
    read_enum(obj, "class_layout", s.class_layout, path, parse_class_layout);
    read(obj, "seed", s.seed, path);
    read(obj, "extra_answer_mass", s.extra_answer_mass, path);
    read(obj, "feature_spread", s.feature_spread, path);
}

}  // namespace

std::string experiment_to_json(const ExperimentConfig& c) {
    const auto& q = c.questioner;
    json j;
    j["format"] = "aqm-experiment";
    j["version"] = kExperimentFormatVersion;
    j["world_file"] = c.world_file ? json(*c.world_file) : json(nullptr);
    j["world"] = spec_json(c.world);
    j["num_worlds"] = c.num_worlds;
    j["caption"] = {{"num_revealed", c.caption.num_revealed}, {"flip_prob", c.caption.flip_prob}};
    j["questioner"] = {
        {"strategy", to_string(q.strategy)},
        {"k_classes", q.sampler.k_classes},
        {"k_questions", q.sampler.k_questions},
        {"k_answers", q.sampler.k_answers},
        {"question_mode", to_string(q.sampler.question_mode)},
        {"answer_mode", to_string(q.sampler.answer_mode)},
        {"fixed_answer_count", q.sampler.fixed_answer_count},
        {"lambda", q.lambda},
        {"rounds", q.rounds},
        {"setting", to_string(q.setting)},
        {"prior_mode", to_string(q.prior)},
        {"history_mode", to_string(q.history)},
    };
    j["models"] = {
        {"alpha", c.models.alpha},
        {"indA_triples", c.models.indA_triples},
        {"indA_mix", c.models.indA_mix},
        {"depA_dialogs", c.models.depA_dialogs},
        {"depA_policy", c.models.depA_policy},
        {"depA_mix", c.models.depA_mix},
        {"consistency_rho", c.models.consistency_rho},
        {"caption_weight", c.models.caption_weight},
    };
    j["episodes_per_world"] = c.episodes_per_world;
    j["master_seed"] = c.master_seed;
    j["parallelism"] = c.parallelism;
    return j.dump(2);
}

ExperimentConfig experiment_from_json(const std::string& text, const ExperimentConfig& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    ExperimentConfig c = base;
    reject_unknown(j, {"format", "version", "world_file", "world", "num_worlds", "caption", "questioner", "models",
                       "episodes_per_world", "master_seed", "parallelism", "output"}, "");
    if (j.contains("version")) {
        const auto version = j["version"];
        if (!version.is_number_integer()) throw ParseError("config field 'version': expected an integer");
        if (version.get<int>() > kExperimentFormatVersion) {
            throw ParseError("config version " + version.dump() + " is newer than supported version " +
                             std::to_string(kExperimentFormatVersion));
        }
    }
    if (j.contains("world_file")) {
        if (j["world_file"].is_null()) {
            c.world_file.reset();
        } else {
            std::string path;
            read(j, "world_file", path, "");
            c.world_file = path;
        }
    }
    if (j.contains("world")) read_spec(j["world"], c.world, "world.");
    read(j, "num_worlds", c.num_worlds, "");
    if (j.contains("caption")) {
        const auto& cap = j["caption"];
        reject_unknown(cap, {"num_revealed", "flip_prob"}, "caption.");
        read(cap, "num_revealed", c.caption.num_revealed, "caption.");
        read(cap, "flip_prob", c.caption.flip_prob, "caption.");
    }
    if (j.contains("questioner")) {
        const auto& qj = j["questioner"];
        const std::string p = "questioner.";
        reject_unknown(qj, {"strategy", "k_classes", "k_questions", "k_answers", "question_mode", "answer_mode",
                            "fixed_answer_count", "lambda", "rounds", "setting", "prior_mode", "history_mode"}, p);
        auto& q = c.questioner;
        read_enum(qj, "strategy", q.strategy, p, parse_strategy);
        read(qj, "k_classes", q.sampler.k_classes, p);
        read(qj, "k_questions", q.sampler.k_questions, p);
        read(qj, "k_answers", q.sampler.k_answers, p);
        read_enum(qj, "question_mode", q.sampler.question_mode, p, parse_question_mode);
        read_enum(qj, "answer_mode", q.sampler.answer_mode, p, parse_answer_mode);
        read(qj, "fixed_answer_count", q.sampler.fixed_answer_count, p);
        read(qj, "lambda", q.lambda, p);
        read(qj, "rounds", q.rounds, p);
        read_enum(qj, "setting", q.setting, p, parse_learning_setting);
        read_enum(qj, "prior_mode", q.prior, p, parse_prior_mode);
        read_enum(qj, "history_mode", q.history, p, parse_history_mode);
    }
    if (j.contains("models")) {
        const auto& mj = j["models"];
        const std::string p = "models.";
        reject_unknown(mj, {"alpha", "indA_triples", "indA_mix", "depA_dialogs", "depA_policy", "depA_mix",
                            "consistency_rho", "caption_weight"}, p);
        read(mj, "alpha", c.models.alpha, p);
        read(mj, "indA_triples", c.models.indA_triples, p);
        read(mj, "indA_mix", c.models.indA_mix, p);
        read(mj, "depA_dialogs", c.models.depA_dialogs, p);
        read(mj, "depA_policy", c.models.depA_policy, p);
        read(mj, "depA_mix", c.models.depA_mix, p);
        read(mj, "consistency_rho", c.models.consistency_rho, p);
        read(mj, "caption_weight", c.models.caption_weight, p);
    }
    read(j, "episodes_per_world", c.episodes_per_world, "");
    read(j, "master_seed", c.master_seed, "");
    read(j, "parallelism", c.parallelism, "");
    return c;
}

std::vector<World> build_worlds(const ExperimentConfig& config) {
    std::vector<World> worlds;
    if (config.world_file) {
        worlds.push_back(load_world(*config.world_file));
        return worlds;
    }
    worlds.reserve(config.num_worlds);
    for (std::uint32_t i = 0; i < config.num_worlds; ++i) {
        WorldSpec spec = config.world;
        spec.seed = config.world.seed + i;
        worlds.push_back(generate_world(spec));
    }
    return worlds;
}

namespace {

enum ModelStream : std::uint64_t { kIndAStream = 0x1a, kDepAStream = 0xda };

std::uint64_t model_seed(std::uint64_t master_seed, std::size_t world_index, std::uint64_t stream) {
    return derive_seed(derive_seed(master_seed ^ 0x5bd1e9955bd1e995ULL, world_index), stream);
}

}  // namespace

namespace {

std::uint64_t indA_budget(const World& world, const ModelParams& params) {
    return params.indA_triples != 0 ? params.indA_triples : 50ULL * world.num_classes() * world.num_questions();
}

}  // namespace

AnswerModelPtr build_approx_model(const World& world, std::size_t world_index, LearningSetting setting,
                                  const ModelParams& params, const CaptionParams& caption, std::uint32_t rounds,
                                  std::uint64_t master_seed) {
    AnswerModelPtr model;
    switch (setting) {
    case LearningSetting::TrueA:
        model = tabular_answer_model(world);
        break;
    case LearningSetting::IndA: {
        const std::uint64_t triples = indA_budget(world, params);
        model = fit_independent(world, triples, params.alpha, model_seed(master_seed, world_index, kIndAStream));
        if (params.indA_mix > 0.0) model = noisy_model(model, params.indA_mix);
        break;
    }
    case LearningSetting::DepA: {
        const auto policy = params.depA_policy == "guesser"
                                ? proposer_policy(heuristic_proposer(world, params.caption_weight))
                                : random_policy(world.num_questions());
        const std::uint64_t dialogs =
            params.depA_dialogs != 0 ? params.depA_dialogs : (indA_budget(world, params) + rounds - 1) / rounds;
        model = fit_from_rollouts(world, policy, RolloutParams{dialogs, rounds, caption}, params.alpha,
                                  model_seed(master_seed, world_index, kDepAStream));
        if (params.depA_mix > 0.0) model = noisy_model(model, params.depA_mix);
        break;
    }
    }
    if (params.consistency_rho > 0.0) model = consistency_wrapper(model, params.consistency_rho);
    return model;
}

Players build_players(const World& world, std::size_t world_index, const ExperimentConfig& config) {
    Players players;
    players.answerer = tabular_answer_model(world);
    players.questioner.proposer = heuristic_proposer(world, config.models.caption_weight);
    players.questioner.approx =
        config.questioner.setting == LearningSetting::TrueA && config.models.consistency_rho == 0.0
            ? players.answerer
            : build_approx_model(world, world_index, config.questioner.setting, config.models, config.caption,
                                 config.questioner.rounds, config.master_seed);
    return players;
}

BatchResult run_experiment(const ExperimentConfig& config, const std::vector<World>& worlds) {
    config.validate();
    for (const auto& w : worlds) {
        if (config.caption.num_revealed > w.num_features()) {
            throw ValidationError("invalid caption.num_revealed: exceeds world num_features");
        }
    }
    BatchConfig batch;
    batch.episodes_per_world = config.episodes_per_world;
    batch.caption = config.caption;
    batch.master_seed = config.master_seed;
    batch.parallelism = config.parallelism;
    return run_batch(
        worlds, config.questioner,
        [&](const World& w, std::size_t i) { return build_players(w, i, config); }, batch);
}

BatchResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    return run_experiment(config, build_worlds(config));
}

void write_curve_csv(std::ostream& out, const std::vector<RoundStats>& curve) {
    out << "round,mean_pmr,stderr_pmr,mean_rank,episodes\n";
    std::ostringstream row;
    row << std::fixed << std::setprecision(10);
    for (const auto& s : curve) {
        row.str("");
        row << s.round << ',' << s.mean_pmr << ',' << s.stderr_pmr << ',' << s.mean_rank << ',' << s.episodes << '\n';
        out << row.str();
    }
}

std::vector<RoundStats> read_curve_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "round,mean_pmr,stderr_pmr,mean_rank,episodes") {
        throw ParseError("results CSV: missing or unexpected header");
    }
    std::vector<RoundStats> curve;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        RoundStats s;
        char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
        if (!(fields >> s.round >> c1 >> s.mean_pmr >> c2 >> s.stderr_pmr >> c3 >> s.mean_rank >> c4 >> s.episodes) ||
            c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
            throw ParseError("results CSV line " + std::to_string(line_no) + ": malformed row");
        }
        curve.push_back(s);
    }
    return curve;
}

std::string results_metadata_json(const ExperimentConfig& config, const BatchResult& result) {
    json j;
    j["format"] = "aqm-results-metadata";
    j["results_schema"] = kResultsSchemaVersion;
    j["tool_version"] = kVersionString;
    j["master_seed"] = config.master_seed;
    j["episodes"] = result.episodes.size();
    j["degenerate_updates"] = result.degenerate_updates;
    j["config"] = json::parse(experiment_to_json(config));
    return j.dump(2);
}

}  // namespace aqm
