#include "aqm/infogain.hpp"

#include <cmath>
#include <numeric>

namespace aqm {

namespace {

struct MutualInformation {
    double value = 0.0;
    bool skipped = false;
};

// weights must be normalized; each row a distribution of equal length.
MutualInformation mutual_information(std::span<const double> weights,
                                     const std::vector<std::vector<double>>& rows) {
    const std::size_t na = rows.empty() ? 0 : rows.front().size();
    std::vector<double> marginal(na, 0.0);
    for (std::size_t c = 0; c < rows.size(); ++c) {
        for (std::size_t a = 0; a < na; ++a) marginal[a] += weights[c] * rows[c][a];
    }
    MutualInformation mi;
    for (std::size_t c = 0; c < rows.size(); ++c) {
        if (weights[c] == 0.0) continue;
        for (std::size_t a = 0; a < na; ++a) {
            const double p = rows[c][a];
            if (p == 0.0 || marginal[a] == 0.0) {
                mi.skipped = true;
                continue;
            }
            mi.value += weights[c] * p * std::log(p / marginal[a]);
        }
    }
    return mi;
}

}  // namespace

double exact_ig(std::span<const double> belief, const std::vector<std::vector<double>>& rows) {
    if (rows.size() != belief.size()) throw ValidationError("exact_ig: one answer row per class required");
    if (rows.empty()) throw ValidationError("exact_ig: no classes");
    const std::size_t na = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != na) throw ValidationError("exact_ig: answer rows differ in length");
    }
    const double total = std::accumulate(belief.begin(), belief.end(), 0.0);
    if (!(total > 0.0)) throw ValidationError("exact_ig: belief has no mass");
    std::vector<double> weights(belief.begin(), belief.end());
    for (double& w : weights) w /= total;
    return mutual_information(weights, rows).value;
}

std::vector<double> reg_posterior(std::span<const double> belief, std::span<const ClassId> classes) {
    std::vector<double> out;
    out.reserve(classes.size());
    double mass = 0.0;
    for (ClassId c : classes) {
        if (c >= belief.size()) throw ValidationError("reg_posterior: class id out of range");
        out.push_back(belief[c]);
        mass += belief[c];
    }
    if (!(mass > 0.0)) throw ValidationError("reg_posterior: candidate classes carry no belief mass");
    for (double& p : out) p /= mass;
    return out;
}

RegularizedRow reg_answer(std::span<const double> dist, std::span<const AnswerId> answers) {
    if (answers.empty()) throw ValidationError("reg_answer: empty answer subset");
    RegularizedRow row;
    row.probs.reserve(answers.size());
    double mass = 0.0;
    for (AnswerId a : answers) {
        if (a >= dist.size()) throw ValidationError("reg_answer: answer id out of range");
        row.probs.push_back(dist[a]);
        mass += dist[a];
    }
    if (mass > 0.0) {
        for (double& p : row.probs) p /= mass;
    } else {
        row.probs.assign(answers.size(), 1.0 / static_cast<double>(answers.size()));
        row.uniform_fallback = true;
    }
    return row;
}

std::vector<double> marginal_answer(std::span<const double> reg_belief,
                                    const std::vector<std::vector<double>>& reg_rows) {
    if (reg_rows.size() != reg_belief.size()) throw ValidationError("marginal_answer: one row per class required");
    if (reg_rows.empty()) return {};
    std::vector<double> out(reg_rows.front().size(), 0.0);
    for (std::size_t c = 0; c < reg_rows.size(); ++c) {
        if (reg_rows[c].size() != out.size()) throw ValidationError("marginal_answer: rows differ in length");
        for (std::size_t a = 0; a < out.size(); ++a) out[a] += reg_belief[c] * reg_rows[c][a];
    }
    return out;
}

IGReport ig_topk(std::span<const double> belief, std::span<const ClassId> classes,
                 std::span<const AnswerId> answers, const std::vector<std::vector<double>>& rows,
                 QuestionId question) {
    if (classes.empty()) throw ValidationError("ig_topk: empty class subset");
    if (answers.empty()) throw ValidationError("ig_topk: empty answer subset");
    if (rows.size() != classes.size()) throw ValidationError("ig_topk: one answer row per candidate class required");

    IGReport report;
    report.question = question;
    report.num_classes = classes.size();
    report.num_answers = answers.size();

    const auto weights = reg_posterior(belief, classes);
    std::vector<std::vector<double>> reg_rows;
    reg_rows.reserve(rows.size());
    for (const auto& r : rows) {
        auto reg = reg_answer(r, answers);
        report.uniform_fallback = report.uniform_fallback || reg.uniform_fallback;
        reg_rows.push_back(std::move(reg.probs));
    }
    const auto mi = mutual_information(weights, reg_rows);
    report.value = mi.value;
    report.skipped_zero_terms = mi.skipped;
    return report;
}

IGReport ig_topk(std::span<const double> belief, std::span<const ClassId> classes,
                 std::span<const AnswerId> answers, const AnswerModel& model, QuestionId q,
                 const DialogHistory& history) {
    std::vector<std::vector<double>> rows;
    rows.reserve(classes.size());
    for (ClassId c : classes) rows.push_back(model.dist(c, q, history));
    return ig_topk(belief, classes, answers, rows, q);
}

}  // namespace aqm
