#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "aqm/experiment.hpp"

namespace aqm::cli {

namespace fs = std::filesystem;

namespace {

fs::path output_dir() {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') return dir;
    return ".";
}

fs::path resolve_output(const std::string& flag, const char* default_name) {
    return flag.empty() ? output_dir() / default_name : fs::path(flag);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path.string() + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

/// Flags that override fields of an ExperimentConfig.
struct RunFlags {
    std::string config_path;
    std::optional<std::string> world_file;
    std::optional<std::uint32_t> classes, features, questions, answers, num_worlds;
    std::optional<double> noise, feature_spread;
    std::optional<std::string> table_mode, layout;
    std::optional<std::uint64_t> world_seed;
    std::optional<std::uint32_t> revealed;
    std::optional<double> flip;
    std::optional<std::string> strategy, question_mode, answer_mode, setting, prior, history, depA_policy;
    std::optional<std::uint32_t> k, k_classes, k_questions, k_answers, fixed_answers, rounds;
    std::optional<double> lambda, alpha, indA_mix, depA_mix, consistency, caption_weight;
    std::optional<std::uint64_t> indA_triples, depA_dialogs, episodes, seed, parallelism;

    void attach(CLI::App& app) {
        app.add_option("--config", config_path, "JSON experiment config (flags override its fields)");
        app.add_option("--world-file", world_file, "Play on a saved world instead of generated ones");
        app.add_option("--classes", classes, "Number of classes N");
        app.add_option("--features", features, "Number of binary features F");
        app.add_option("--questions", questions, "Question vocabulary size");
        app.add_option("--answers", answers, "Answer vocabulary size");
        app.add_option("--noise", noise, "Answer noise epsilon");
        app.add_option("--table-mode", table_mode, "feature-derived | dense-random");
        app.add_option("--layout", layout, "Class layout: random | binary-code");
        app.add_option("--feature-spread", feature_spread, "Spread of per-feature prevalence around 0.5");
        app.add_option("--world-seed", world_seed, "Seed of the first generated world");
        app.add_option("--num-worlds", num_worlds, "Number of generated worlds");
        app.add_option("--revealed", revealed, "Caption features revealed per episode");
        app.add_option("--flip", flip, "Caption bit flip probability");
        app.add_option("--strategy", strategy, "AQMplus | Guesser | RandomQ | Hybrid");
        app.add_option("--k", k, "Sets k-classes, k-questions and k-answers together");
        app.add_option("--k-classes", k_classes, "Candidate class subset size");
        app.add_option("--k-questions", k_questions, "Candidate question subset size");
        app.add_option("--k-answers", k_answers, "Candidate answer target size (extended mode)");
        app.add_option("--question-mode", question_mode, "per-turn | gen1Q | randQ");
        app.add_option("--answer-mode", answer_mode, "top1-per-class | extended | fixed-random");
        app.add_option("--fixed-answers", fixed_answers, "Answer set size in fixed-random mode");
        app.add_option("--lambda", lambda, "Prior balance lambda");
        app.add_option("--rounds", rounds, "Rounds T");
        app.add_option("--setting", setting, "indA | depA | trueA");
        app.add_option("--prior", prior, "caption | uniform");
        app.add_option("--history", history, "full | ignore");
        app.add_option("--alpha", alpha, "Count smoothing alpha");
        app.add_option("--indA-triples", indA_triples, "indA offline triples (0: 50*N*|Q|)");
        app.add_option("--indA-mix", indA_mix, "Uniform mixture applied to the indA model");
        app.add_option("--depA-dialogs", depA_dialogs, "depA rollout dialogs (0: indA triple budget / rounds)");
        app.add_option("--depA-policy", depA_policy, "depA rollout questioner: random | guesser");
        app.add_option("--depA-mix", depA_mix, "Uniform mixture applied to the depA model");
        app.add_option("--consistency", consistency, "Repeat-answer consistency rho");
        app.add_option("--caption-weight", caption_weight, "Proposer caption weight");
        app.add_option("--episodes", episodes, "Episodes per world");
        app.add_option("--seed", seed, "Master seed");
        app.add_option("--parallelism", parallelism, "Worker threads");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c;
        if (!config_path.empty()) c = experiment_from_json(read_text(config_path));
        if (world_file) c.world_file = *world_file;
        if (classes) c.world.num_classes = *classes;
        if (features) c.world.num_features = *features;
        if (questions) c.world.num_questions = *questions;
        if (answers) c.world.num_answers = *answers;
        if (noise) c.world.answer_noise = *noise;
        if (table_mode) c.world.table_mode = parse_table_mode(*table_mode);
        if (layout) c.world.class_layout = parse_class_layout(*layout);
        if (feature_spread) c.world.feature_spread = *feature_spread;
        if (world_seed) c.world.seed = *world_seed;
        if (num_worlds) c.num_worlds = *num_worlds;
        if (revealed) c.caption.num_revealed = *revealed;
        if (flip) c.caption.flip_prob = *flip;
        auto& q = c.questioner;
        if (strategy) q.strategy = parse_strategy(*strategy);
        if (k) q.sampler.k_classes = q.sampler.k_questions = q.sampler.k_answers = *k;
        if (k_classes) q.sampler.k_classes = *k_classes;
        if (k_questions) q.sampler.k_questions = *k_questions;
        if (k_answers) q.sampler.k_answers = *k_answers;
        if (question_mode) q.sampler.question_mode = parse_question_mode(*question_mode);
        if (answer_mode) q.sampler.answer_mode = parse_answer_mode(*answer_mode);
        if (fixed_answers) q.sampler.fixed_answer_count = *fixed_answers;
        if (lambda) q.lambda = *lambda;
        if (rounds) q.rounds = *rounds;
        if (setting) q.setting = parse_learning_setting(*setting);
        if (prior) q.prior = parse_prior_mode(*prior);
        if (history) q.history = parse_history_mode(*history);
        if (alpha) c.models.alpha = *alpha;
        if (indA_triples) c.models.indA_triples = *indA_triples;
        if (indA_mix) c.models.indA_mix = *indA_mix;
        if (depA_dialogs) c.models.depA_dialogs = *depA_dialogs;
        if (depA_policy) c.models.depA_policy = *depA_policy;
        if (depA_mix) c.models.depA_mix = *depA_mix;
        if (consistency) c.models.consistency_rho = *consistency;
        if (caption_weight) c.models.caption_weight = *caption_weight;
        if (episodes) c.episodes_per_world = *episodes;
        if (seed) c.master_seed = *seed;
        if (parallelism) c.parallelism = *parallelism;
        c.validate();
        return c;
    }
};

fs::path metadata_path(const fs::path& csv) { return fs::path(csv.string() + ".meta.json"); }

BatchResult run_and_write(const ExperimentConfig& config, const fs::path& csv_path, std::ostream& err) {
    const auto result = run_experiment(config);
    std::ostringstream csv;
    write_curve_csv(csv, result.curve);
    write_text(csv_path, csv.str());
    write_text(metadata_path(csv_path), results_metadata_json(config, result) + "\n");
    if (result.degenerate_updates > 0) {
        fmt::print(err, "warning: {} updates had degenerate evidence; belief kept unchanged\n",
                   result.degenerate_updates);
    }
    return result;
}

int cmd_gen_world(const WorldSpec& spec, const std::string& out_flag, std::ostream& out) {
    const World world = generate_world(spec);
    const auto path = resolve_output(out_flag, "world.json");
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_world(world, path);
    fmt::print(out, "wrote {}: N={} F={} |Q|={} |A|={} eps={} ({})\n", path.string(), spec.num_classes,
               spec.num_features, spec.num_questions, spec.num_answers, spec.answer_noise,
               to_string(spec.table_mode));
    return 0;
}

int cmd_run(const RunFlags& flags, const std::string& out_flag, std::ostream& out, std::ostream& err) {
    const auto config = flags.resolve();
    const auto path = resolve_output(out_flag, "results.csv");
    const auto result = run_and_write(config, path, err);
    const auto& last = result.curve.back();
    fmt::print(out, "wrote {} ({} episodes): round 0 PMR {:.4f}, round {} PMR {:.4f}\n", path.string(),
               result.episodes.size(), result.curve.front().mean_pmr, last.round, last.mean_pmr);
    return 0;
}

std::vector<std::string> split_values(const std::string& text) {
    std::vector<std::string> values;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) values.push_back(item);
    }
    return values;
}

template <typename T>
T parse_number(const std::string& text, const std::string& axis) {
    std::istringstream s(text);
    T value{};
    if (!(s >> value) || !s.eof()) throw ValidationError("invalid sweep value '" + text + "' for axis " + axis);
    return value;
}

int cmd_sweep(const RunFlags& flags, const std::string& axis, const std::string& values_text,
              const std::string& out_flag, std::ostream& out, std::ostream& err) {
    const auto values = split_values(values_text);
    if (values.empty()) throw ValidationError("invalid values: sweep needs at least one value");
    if (axis != "k" && axis != "lambda" && axis != "noise" && axis != "setting") {
        throw ValidationError("invalid axis '" + axis + "': expected k, lambda, noise or setting");
    }
    const auto base = flags.resolve();
    std::vector<ExperimentConfig> configs;
    for (const auto& v : values) {
        ExperimentConfig c = base;
        if (axis == "k") {
            const auto k = parse_number<std::uint32_t>(v, axis);
            c.questioner.sampler.k_classes = c.questioner.sampler.k_questions = c.questioner.sampler.k_answers = k;
        } else if (axis == "lambda") {
            c.questioner.lambda = parse_number<double>(v, axis);
        } else if (axis == "noise") {
            c.world.answer_noise = parse_number<double>(v, axis);
        } else {
            c.questioner.setting = parse_learning_setting(v);
        }
        c.validate();
        configs.push_back(std::move(c));
    }

    const fs::path dir = out_flag.empty() ? output_dir() / ("sweep_" + axis) : fs::path(out_flag);
    fs::create_directories(dir);
    std::ostringstream summary;
    summary << "value,final_mean_pmr,final_stderr_pmr,episodes\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto csv = dir / (axis + "_" + values[i] + ".csv");
        const auto result = run_and_write(configs[i], csv, err);
        const auto& last = result.curve.back();
        summary << fmt::format("{},{:.10f},{:.10f},{}\n", values[i], last.mean_pmr, last.stderr_pmr, last.episodes);
        fmt::print(out, "{}={}: final PMR {:.4f} +/- {:.4f}\n", axis, values[i], last.mean_pmr, last.stderr_pmr);
    }
    write_text(dir / "summary.csv", summary.str());
    fmt::print(out, "wrote {}\n", (dir / "summary.csv").string());
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::vector<std::string>& names_flag,
               const std::string& out_flag, std::ostream& out, std::ostream& err) {
    std::vector<std::string> names;
    std::vector<std::vector<RoundStats>> curves;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const fs::path path(inputs[i]);
        std::ifstream in(path);
        if (!in) {
            fmt::print(err, "error: cannot open results file '{}'\n", path.string());
            return 2;
        }
        curves.push_back(read_curve_csv(in));
        names.push_back(i < names_flag.size() ? names_flag[i] : path.stem().string());
    }
    std::size_t rows = curves.front().size();
    for (const auto& c : curves) rows = std::min(rows, c.size());
    for (std::size_t i = 0; i < curves.size(); ++i) {
        if (curves[i].size() != rows) {
            fmt::print(err, "warning: {} has {} rounds; aligning all runs on the shortest ({} rows)\n", names[i],
                       curves[i].size(), rows);
        }
    }

    std::ostringstream wide;
    wide << "round";
    for (const auto& n : names) wide << ',' << n << "_mean_pmr";
    wide << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        wide << curves.front()[r].round;
        for (const auto& c : curves) wide << fmt::format(",{:.10f}", c[r].mean_pmr);
        wide << '\n';
    }
    const auto path = resolve_output(out_flag, "report.csv");
    write_text(path, wide.str());

    auto cell = [&](const std::vector<RoundStats>& c, std::size_t r) {
        return r < rows ? fmt::format("{:.4f}", c[r].mean_pmr) : std::string("-");
    };
    std::size_t width = 8;
    for (const auto& n : names) width = std::max(width, n.size());
    fmt::print(out, "{:<{}}  {:>8}  {:>8}  {:>8}\n", "run", width, "round0", "round5", "round10");
    for (std::size_t i = 0; i < curves.size(); ++i) {
        fmt::print(out, "{:<{}}  {:>8}  {:>8}  {:>8}\n", names[i], width, cell(curves[i], 0), cell(curves[i], 5),
                   cell(curves[i], 10));
    }
    fmt::print(out, "wrote {}\n", path.string());
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information-gain question selection for twenty-questions style games", "aqm"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen-world", "Generate a synthetic world file");
    WorldSpec spec;
    std::string table_mode = "feature-derived", layout = "random", gen_out;
    gen->add_option("--classes", spec.num_classes, "Number of classes N")->required();
    gen->add_option("--features", spec.num_features, "Number of binary features F")->required();
    gen->add_option("--questions", spec.num_questions, "Question vocabulary size")->required();
    gen->add_option("--answers", spec.num_answers, "Answer vocabulary size")->required();
    gen->add_option("--noise", spec.answer_noise, "Answer noise epsilon")->required();
    gen->add_option("--seed", spec.seed, "Generation seed")->required();
    gen->add_option("--table-mode", table_mode, "feature-derived | dense-random");
    gen->add_option("--layout", layout, "random | binary-code");
    gen->add_option("--extra-mass", spec.extra_answer_mass, "Mass on non-yes/no answers");
    gen->add_option("--feature-spread", spec.feature_spread, "Spread of per-feature prevalence around 0.5");
    gen->add_option("--out", gen_out, "Output path (default: $AQM_OUTPUT_DIR/world.json)");

    auto* run_cmd = app.add_subcommand("run", "Run a batch of episodes and write a results CSV");
    RunFlags run_flags;
    std::string run_out;
    run_flags.attach(*run_cmd);
    run_cmd->add_option("--out", run_out, "Results CSV path (default: $AQM_OUTPUT_DIR/results.csv)");

    auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of an axis");
    RunFlags sweep_flags;
    std::string axis, values, sweep_out;
    sweep_flags.attach(*sweep);
    sweep->add_option("--axis", axis, "k | lambda | noise | setting")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--out-dir", sweep_out, "Output directory (default: $AQM_OUTPUT_DIR/sweep_<axis>)");

    auto* play_cmd = app.add_subcommand("play", "Play interactively: you answer, the program asks");
    std::string play_world;
    PlayOptions play_options;
    play_cmd->add_option("--world", play_world, "World file")->required();
    play_cmd->add_option("--rounds", play_options.rounds, "Maximum rounds");
    play_cmd->add_option("--k", play_options.k, "Candidate subset size");
    play_cmd->add_option("--threshold", play_options.threshold, "Stop once the top class reaches this probability");
    play_cmd->add_option("--transcript", play_options.transcript_path, "Also write the transcript to this file");

    auto* report = app.add_subcommand("report", "Align results files on the round axis");
    std::vector<std::string> report_inputs, report_names;
    std::string report_out;
    report->add_option("inputs", report_inputs, "Results CSV files")->required();
    report->add_option("--names", report_names, "Run names (default: file stems)")->delimiter(',');
    report->add_option("--out", report_out, "Wide CSV path (default: $AQM_OUTPUT_DIR/report.csv)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*gen) {
            spec.table_mode = parse_table_mode(table_mode);
            spec.class_layout = parse_class_layout(layout);
            return cmd_gen_world(spec, gen_out, out);
        }
        if (*run_cmd) return cmd_run(run_flags, run_out, out, err);
        if (*sweep) return cmd_sweep(sweep_flags, axis, values, sweep_out, out, err);
        if (*play_cmd) return play(load_world(play_world), play_options, in, out);
        if (*report) return cmd_report(report_inputs, report_names, report_out, out, err);
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}

}  // namespace aqm::cli
