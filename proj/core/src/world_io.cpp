#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aqm/models.hpp"
#include "aqm/world.hpp"

namespace aqm {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw ParseError("field '" + field + "': " + why);
}

const json& member(const json& obj, const char* key, const std::string& path = "") {
    if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path + key, "missing");
    return *it;
}

template <typename T>
T as(const json& value, const std::string& field) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        fail(field, e.what());
    }
}

json parse_document(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

void check_header(const json& j, const char* format, int supported) {
    const auto name = as<std::string>(member(j, "format"), "format");
    if (name != format) fail("format", "expected '" + std::string(format) + "', found '" + name + "'");
    const auto version = as<int>(member(j, "version"), "version");
    if (version > supported) {
        throw ParseError("unsupported " + std::string(format) + " version " + std::to_string(version) +
                         " (this build reads up to version " + std::to_string(supported) + ")");
    }
    if (version < 1) fail("version", "must be >= 1");
}

json table_json(std::span<const double> table, std::uint32_t n, std::uint32_t q, std::uint32_t a) {
    json classes = json::array();
    for (std::uint32_t c = 0; c < n; ++c) {
        json questions = json::array();
        for (std::uint32_t k = 0; k < q; ++k) {
            json row = json::array();
            for (std::uint32_t m = 0; m < a; ++m) row.push_back(table[(std::size_t{c} * q + k) * a + m]);
            questions.push_back(std::move(row));
        }
        classes.push_back(std::move(questions));
    }
    return classes;
}

std::vector<double> read_table(const json& j, std::uint32_t n, std::uint32_t q, std::uint32_t a,
                               const std::string& field) {
    if (!j.is_array() || j.size() != n) fail(field, "expected " + std::to_string(n) + " class entries");
    std::vector<double> table;
    table.reserve(std::size_t{n} * q * a);
    for (std::uint32_t c = 0; c < n; ++c) {
        const auto cf = field + "[" + std::to_string(c) + "]";
        if (!j[c].is_array() || j[c].size() != q) fail(cf, "expected " + std::to_string(q) + " question entries");
        for (std::uint32_t k = 0; k < q; ++k) {
            const auto qf = cf + "[" + std::to_string(k) + "]";
            const auto& row = j[c][k];
            if (!row.is_array() || row.size() != a) fail(qf, "expected " + std::to_string(a) + " probabilities");
            for (std::uint32_t m = 0; m < a; ++m) table.push_back(as<double>(row[m], qf));
        }
    }
    return table;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string world_to_json(const World& world) {
    const auto& s = world.spec();
    json j;
    j["format"] = "aqm-world";
    j["version"] = kWorldFileVersion;
    j["spec"] = {{"num_classes", s.num_classes},     {"num_features", s.num_features},
                 {"num_questions", s.num_questions}, {"num_answers", s.num_answers},
                 {"answer_noise", s.answer_noise},   {"table_mode", to_string(s.table_mode)},
                 {"class_layout", to_string(s.class_layout)}, {"seed", s.seed},
                 {"extra_answer_mass", s.extra_answer_mass}, {"feature_spread", s.feature_spread}};
    json bits = json::array();
    for (ClassId c = 0; c < s.num_classes; ++c) {
        std::string row(s.num_features, '0');
        for (FeatureId f = 0; f < s.num_features; ++f) {
            if (world.has_feature(c, f)) row[f] = '1';
        }
        bits.push_back(row);
    }
    j["class_features"] = std::move(bits);
    j["question_feature"] = world.question_features();
    j["answer_table"] = table_json(world.answer_table(), s.num_classes, s.num_questions, s.num_answers);
    j["labels"] = {{"answers", world.answer_labels()}, {"questions", world.question_labels()}};
    return j.dump(1) + "\n";
}

World world_from_json(const std::string& text) {
    const json j = parse_document(text, "world file");
    check_header(j, "aqm-world", kWorldFileVersion);

    const auto& sj = member(j, "spec");
    WorldSpec s;
    s.num_classes = as<std::uint32_t>(member(sj, "num_classes", "spec."), "spec.num_classes");
    s.num_features = as<std::uint32_t>(member(sj, "num_features", "spec."), "spec.num_features");
    s.num_questions = as<std::uint32_t>(member(sj, "num_questions", "spec."), "spec.num_questions");
    s.num_answers = as<std::uint32_t>(member(sj, "num_answers", "spec."), "spec.num_answers");
    s.answer_noise = as<double>(member(sj, "answer_noise", "spec."), "spec.answer_noise");
    s.seed = as<std::uint64_t>(member(sj, "seed", "spec."), "spec.seed");
    s.extra_answer_mass = as<double>(member(sj, "extra_answer_mass", "spec."), "spec.extra_answer_mass");
    s.feature_spread = as<double>(member(sj, "feature_spread", "spec."), "spec.feature_spread");
    try {
        s.table_mode = parse_table_mode(as<std::string>(member(sj, "table_mode", "spec."), "spec.table_mode"));
        s.class_layout = parse_class_layout(as<std::string>(member(sj, "class_layout", "spec."), "spec.class_layout"));
        s.validate();
    } catch (const ValidationError& e) {
        fail("spec", e.what());
    }

    const auto& bits = member(j, "class_features");
    if (!bits.is_array() || bits.size() != s.num_classes) fail("class_features", "expected one bitstring per class");
    std::vector<std::uint8_t> features;
    features.reserve(std::size_t{s.num_classes} * s.num_features);
    for (std::size_t c = 0; c < bits.size(); ++c) {
        const auto field = "class_features[" + std::to_string(c) + "]";
        const auto row = as<std::string>(bits[c], field);
        if (row.size() != s.num_features) fail(field, "expected " + std::to_string(s.num_features) + " bits");
        for (char ch : row) {
            if (ch != '0' && ch != '1') fail(field, "bitstring may only contain 0 and 1");
            features.push_back(ch == '1' ? 1 : 0);
        }
    }
    auto question_feature = as<std::vector<FeatureId>>(member(j, "question_feature"), "question_feature");
    auto table = read_table(member(j, "answer_table"), s.num_classes, s.num_questions, s.num_answers, "answer_table");
    const auto& labels = member(j, "labels");
    auto answer_labels = as<std::vector<std::string>>(member(labels, "answers", "labels."), "labels.answers");
    auto question_labels = as<std::vector<std::string>>(member(labels, "questions", "labels."), "labels.questions");
    try {
        return World(s, std::move(features), std::move(question_feature), std::move(table), std::move(answer_labels),
                     std::move(question_labels));
    } catch (const ValidationError& e) {
        throw ParseError(std::string("world file: ") + e.what());
    }
}

void save_world(const World& world, const std::filesystem::path& path) { write_file(path, world_to_json(world)); }

World load_world(const std::filesystem::path& path) {
    try {
        return world_from_json(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::string answer_model_to_json(const TableAnswerModel& model) {
    json j;
    j["format"] = "aqm-answer-model";
    j["version"] = kModelFileVersion;
    const auto& p = model.provenance();
    j["provenance"] = {{"setting", p.setting}, {"alpha", p.alpha}, {"triple_count", p.triple_count}, {"seed", p.seed}};
    j["shape"] = {model.num_classes(), model.num_questions(), model.num_answers()};
    j["answer_table"] = table_json(model.table(), model.num_classes(), model.num_questions(), model.num_answers());
    return j.dump(1) + "\n";
}

TableAnswerModel answer_model_from_json(const std::string& text) {
    const json j = parse_document(text, "model file");
    check_header(j, "aqm-answer-model", kModelFileVersion);
    const auto& pj = member(j, "provenance");
    ModelProvenance p;
    p.setting = as<std::string>(member(pj, "setting", "provenance."), "provenance.setting");
    p.alpha = as<double>(member(pj, "alpha", "provenance."), "provenance.alpha");
    p.triple_count = as<std::uint64_t>(member(pj, "triple_count", "provenance."), "provenance.triple_count");
    p.seed = as<std::uint64_t>(member(pj, "seed", "provenance."), "provenance.seed");
    const auto shape = as<std::vector<std::uint32_t>>(member(j, "shape"), "shape");
    if (shape.size() != 3) fail("shape", "expected [classes, questions, answers]");
    auto table = read_table(member(j, "answer_table"), shape[0], shape[1], shape[2], "answer_table");
    for (std::size_t cell = 0; cell < table.size() / shape[2]; ++cell) {
        double sum = 0.0;
        for (std::size_t a = 0; a < shape[2]; ++a) {
            const double x = table[cell * shape[2] + a];
            if (!(x >= 0.0 && x <= 1.0)) fail("answer_table", "entries must be in [0, 1]");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) fail("answer_table", "row " + std::to_string(cell) + " does not sum to 1");
    }
    return TableAnswerModel(shape[0], shape[1], shape[2], std::move(table), std::move(p));
}

void save_answer_model(const TableAnswerModel& model, const std::filesystem::path& path) {
    write_file(path, answer_model_to_json(model));
}

TableAnswerModel load_answer_model(const std::filesystem::path& path) {
    try {
        return answer_model_from_json(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace aqm
