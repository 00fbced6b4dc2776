#include <benchmark/benchmark.h>

#include "aqm/experiment.hpp"

namespace {

using namespace aqm;

const World& default_world() {
    static const World world = generate_world(WorldSpec{});
    return world;
}

Belief skewed_belief(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> w(n);
    for (auto& x : w) x = std::exp(8.0 * rng.uniform());
    return Belief::normalized(std::move(w));
}

void BM_BayesUpdate(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Belief b = skewed_belief(n, 1);
    Rng rng(2);
    std::vector<double> lik(n);
    for (auto& x : lik) x = 0.05 + 0.9 * rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(bayes_update(b, lik));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_BayesUpdate)->Arg(500)->Arg(9628);

// One ig_topk evaluation with K classes and the top-1-per-class answers.
void BM_IGTopK(benchmark::State& state) {
    const World& w = default_world();
    const auto model = tabular_answer_model(w);
    const Belief b = skewed_belief(w.num_classes(), 3);
    const auto classes = topk_classes(b.probs(), static_cast<std::size_t>(state.range(0)));
    const auto answers = candidate_answers(*model, 7, classes, DialogHistory{});
    for (auto _ : state) benchmark::DoNotOptimize(ig_topk(b.probs(), classes, answers, *model, 7, DialogHistory{}));
}
BENCHMARK(BM_IGTopK)->Arg(1)->Arg(5)->Arg(20)->Arg(40);

// Full ig over every class and answer, for comparison with the top-K cost.
void BM_ExactIG(benchmark::State& state) {
    const World& w = default_world();
    const auto model = tabular_answer_model(w);
    const Belief b = skewed_belief(w.num_classes(), 3);
    std::vector<std::vector<double>> rows;
    for (ClassId c = 0; c < w.num_classes(); ++c) rows.push_back(model->dist(c, 7, DialogHistory{}));
    for (auto _ : state) benchmark::DoNotOptimize(exact_ig(b.probs(), rows));
}
BENCHMARK(BM_ExactIG);

// A whole turn's question choice: K candidate questions, K classes.
void BM_SelectQuestion(benchmark::State& state) {
    const World& w = default_world();
    const auto model = tabular_answer_model(w);
    const auto proposer = heuristic_proposer(w);
    const auto k = static_cast<std::size_t>(state.range(0));
    const Belief b = skewed_belief(w.num_classes(), 4);
    CandidateSets cs;
    cs.classes = topk_classes(b.probs(), k);
    cs.questions = proposer->propose(DialogHistory{}, k);
    for (QuestionId q : cs.questions) {
        cs.answers_per_question[q] = candidate_answers(*model, q, cs.classes, DialogHistory{});
    }
    for (auto _ : state) benchmark::DoNotOptimize(select_question(b, DialogHistory{}, cs, *model));
}
BENCHMARK(BM_SelectQuestion)->Arg(5)->Arg(20)->Arg(40);

void BM_Episode(benchmark::State& state) {
    const World& w = default_world();
    const auto truth = tabular_answer_model(w);
    const QuestionerModels models{truth, heuristic_proposer(w)};
    QuestionerConfig cfg;
    cfg.strategy = static_cast<Strategy>(state.range(0));
    Rng rng(5);
    const Episode e = sample_episode(w, CaptionParams{}, rng);
    for (auto _ : state) benchmark::DoNotOptimize(run_episode(w, e, cfg, models, *truth, 9));
    state.SetLabel(to_string(cfg.strategy));
}
BENCHMARK(BM_Episode)->Arg(static_cast<int>(Strategy::AQMPlus))->Arg(static_cast<int>(Strategy::Guesser))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
