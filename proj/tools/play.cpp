#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "aqm/planner.hpp"
#include "cli.hpp"

namespace aqm::cli {

namespace {

std::string trim_lower(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    s = s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

std::optional<AnswerId> parse_answer(const std::string& token, const std::vector<std::string>& labels) {
    for (std::size_t a = 0; a < labels.size(); ++a) {
        if (token == trim_lower(labels[a])) return static_cast<AnswerId>(a);
    }
    if (!token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char ch) { return std::isdigit(ch); })) {
        if (token.size() <= 9) {
            const auto index = std::stoul(token);
            if (index < labels.size()) return static_cast<AnswerId>(index);
        }
    }
    return std::nullopt;
}

void print_top(std::ostream& out, const Belief& belief) {
    const auto top = topk_classes(belief, 5);
    out << "top classes:";
    for (const auto c : top) fmt::print(out, "  #{} {:.4f}", c, belief[c]);
    out << '\n';
}

}  // namespace

int play(const World& world, const PlayOptions& options, std::istream& in, std::ostream& out) {
    if (options.rounds == 0 || options.k == 0) throw ValidationError("rounds and k must be positive");
    if (!(options.threshold > 0.0 && options.threshold <= 1.0)) {
        throw ValidationError("threshold must lie in (0, 1]");
    }
    const auto model = tabular_answer_model(world);
    const auto proposer = heuristic_proposer(world, 0.0);
    const auto& labels = world.answer_labels();

    EpisodeState state{uniform_prior(world.num_classes()), DialogHistory{}};
    std::string transcript;
    std::string answer_list;
    for (std::size_t a = 0; a < labels.size(); ++a) {
        answer_list += fmt::format("{}{}={}", a == 0 ? "" : ", ", a, labels[a]);
    }

    const auto finish = [&](const char* reason) {
        const ClassId guess = argmax(state.belief);
        fmt::print(out, "{}\nguess: class #{} (p = {:.4f})\ntranscript:\n{}", reason, guess, state.belief[guess],
                   transcript.empty() ? "  (no turns)\n" : transcript);
        if (!options.transcript_path.empty()) {
            std::ofstream file(options.transcript_path, std::ios::trunc);
            if (!file) throw std::runtime_error("cannot write '" + options.transcript_path + "'");
            file << transcript;
        }
        return 0;
    };

    for (std::uint32_t round = 1; round <= options.rounds; ++round) {
        print_top(out, state.belief);
        if (state.belief[argmax(state.belief)] >= options.threshold) return finish("confident");

        CandidateSets candidates;
        candidates.classes = topk_classes(state.belief, options.k);
        candidates.questions = proposer->propose(state.history, options.k);
        if (candidates.questions.empty()) return finish("no questions left");
        for (const auto q : candidates.questions) {
            candidates.answers_per_question[q] = candidate_answers(*model, q, candidates.classes, state.history);
        }
        const auto selection = select_question(state.belief, state.history, candidates, *model);
        const QuestionId q = selection.question;

        std::optional<AnswerId> answer;
        while (!answer) {
            fmt::print(out, "Q{}: {} [{}] > ", round, world.question_labels()[q], answer_list);
            out.flush();
            std::string line;
            if (!std::getline(in, line)) return finish("\nend of input");
            const auto token = trim_lower(line);
            if (token == "quit" || token == "q") return finish("quit");
            answer = parse_answer(token, labels);
            if (!answer) fmt::print(out, "unrecognized answer '{}'\n", line);
        }

        const auto outcome = step(state, q, *answer, *model);
        if (outcome.degenerate_evidence) {
            out << "no class is consistent with that answer; belief left unchanged\n";
        }
        state = outcome.state;
        transcript += fmt::format("  {}. {} -> {}\n", round, world.question_labels()[q], labels[*answer]);
    }
    print_top(out, state.belief);
    return finish("done");
}

}  // namespace aqm::cli
