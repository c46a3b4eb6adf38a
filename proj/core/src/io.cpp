#include "qadist/io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qadist {

using nlohmann::json;

const Question* Dataset::question(std::string_view id) const {
    for (const auto& q : questions) {
        if (q.id == id) return &q;
    }
    return nullptr;
}

const AnswerSet* Dataset::gold_for(std::string_view id) const {
    for (const auto& set : gold) {
        if (set.question_id == id) return &set;
    }
    return nullptr;
}

namespace {

json parse_line(const std::string& path, size_t line_number, const std::string& line) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + e.what());
    }
}

}  // namespace

Dataset load_dataset_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);

    Dataset dataset;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const json doc = parse_line(path, line_number, line);

        Question q;
        q.id = doc.at("id").get<std::string>();
        q.context = doc.value("context", "");
        const std::string slot_name = doc.value("slot", "Other");
        const auto slot = slot_from_string(slot_name);
        if (!slot) {
            throw std::runtime_error(path + ":" + std::to_string(line_number) +
                                     ": unknown slot '" + slot_name + "'");
        }
        q.slot = *slot;

        AnswerSet gold;
        gold.question_id = q.id;
        gold.role = Role::Gold;
        for (const auto& answer : doc.at("answers")) {
            gold.answers.push_back(answer.get<std::string>());
        }

        dataset.questions.push_back(std::move(q));
        dataset.gold.push_back(std::move(gold));
    }
    return dataset;
}

void save_dataset_jsonl(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    for (const auto& q : dataset.questions) {
        const auto* gold = dataset.gold_for(q.id);
        json doc;
        doc["id"] = q.id;
        doc["context"] = q.context;
        doc["slot"] = to_string(q.slot);
        doc["answers"] = gold ? json(gold->answers) : json::array();
        out << doc.dump() << "\n";
    }
}

std::vector<AnswerSet> load_predictions_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open predictions: " + path);

    std::vector<AnswerSet> predictions;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const json doc = parse_line(path, line_number, line);
        AnswerSet set;
        set.question_id = doc.at("id").get<std::string>();
        set.role = Role::Predicted;
        for (const auto& answer : doc.at("answers")) {
            set.answers.push_back(answer.get<std::string>());
        }
        predictions.push_back(std::move(set));
    }
    return predictions;
}

void save_predictions_jsonl(const std::vector<AnswerSet>& predictions, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write predictions: " + path);
    for (const auto& set : predictions) {
        json doc;
        doc["id"] = set.question_id;
        doc["answers"] = set.answers;
        out << doc.dump() << "\n";
    }
}

namespace {

Clustering clustering_from_json(const json& doc, const std::string& path, const Dataset& dataset) {
    Clustering clustering;
    clustering.question_id = doc.at("question_id").get<std::string>();
    const auto* gold = dataset.gold_for(clustering.question_id);
    if (!gold) {
        throw std::runtime_error(path + ": clustering for unknown question '" +
                                 clustering.question_id + "'");
    }
    for (const auto& entry : doc.at("clusters")) {
        Cluster cluster;
        cluster.label = entry.at("label").get<std::string>();
        for (const auto& index : entry.at("indices")) cluster.members.push_back(index.get<int>());
        std::string lowered = cluster.label;
        for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lowered == "wrong") {
            if (clustering.wrong_label) {
                throw std::runtime_error(path + ": more than one wrong-flagged cluster for '" +
                                         clustering.question_id + "'");
            }
            clustering.wrong_label = cluster.label;
        }
        clustering.clusters.push_back(std::move(cluster));
    }
    const auto diags = validate_clustering(clustering, static_cast<int>(gold->answers.size()));
    if (!diags.empty()) {
        throw std::runtime_error(path + " (" + clustering.question_id + "): " +
                                 diags.front().message);
    }
    canonicalize(clustering);
    return clustering;
}

}  // namespace

std::map<std::string, Clustering> load_human_clusterings(const std::string& path,
                                                         const Dataset& dataset) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open clusterings: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }

    std::map<std::string, Clustering> clusterings;
    const auto add = [&](const json& entry) {
        Clustering clustering = clustering_from_json(entry, path, dataset);
        const auto id = clustering.question_id;
        if (!clusterings.emplace(id, std::move(clustering)).second) {
            throw std::runtime_error(path + ": duplicate clustering for '" + id + "'");
        }
    };
    if (doc.is_array()) {
        for (const auto& entry : doc) add(entry);
    } else {
        add(doc);
    }
    return clusterings;
}

void save_clusterings_json(const std::vector<Clustering>& clusterings, const std::string& path) {
    json out = json::array();
    for (const auto& clustering : clusterings) {
        json entry;
        entry["question_id"] = clustering.question_id;
        json clusters = json::array();
        for (const auto& cluster : clustering.clusters) {
            json c;
            c["label"] = cluster.label;
            c["indices"] = cluster.members;
            clusters.push_back(std::move(c));
        }
        entry["clusters"] = std::move(clusters);
        out.push_back(std::move(entry));
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write clusterings: " + path);
    file << out.dump(2) << "\n";
}

double round_sig(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double magnitude = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::abs(value)))));
    return std::round(value * magnitude) / magnitude;
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

}  // namespace qadist
