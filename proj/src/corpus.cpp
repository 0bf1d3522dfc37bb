#include "oniontext/corpus.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "oniontext/error.hpp"
#include "oniontext/rng.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kModule = "corpus";

[[noreturn]] void record_error(std::size_t line, const std::string& message) {
    throw Error(kModule, "line " + std::to_string(line) + ": " + message);
}

std::optional<std::string> opt_string(const ordered_json& j, const char* field,
                                      std::size_t line) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) record_error(line, std::string("field ") + field + " must be a string");
    return it->get<std::string>();
}

}  // namespace

const char* to_string(SourceName name) {
    switch (name) {
        case SourceName::Agora: return "Agora";
        case SourceName::Berlusconi: return "Berlusconi";
        case SourceName::CannaHome: return "CannaHome";
        case SourceName::Duta10k: return "Duta10k";
        case SourceName::ManualDarkWeb: return "ManualDarkWeb";
        case SourceName::NormalWeb: return "NormalWeb";
        case SourceName::SilkRoad: return "SilkRoad";
        case SourceName::Synthetic: return "Synthetic";
    }
    return "Synthetic";
}

const char* to_string(SourceMode mode) {
    switch (mode) {
        case SourceMode::General: return "general";
        case SourceMode::Marketplace: return "marketplace";
        case SourceMode::Pretext: return "pretext";
    }
    return "general";
}

SourceName source_name_from_string(const std::string& s) {
    static const std::map<std::string, SourceName> table = {
        {"Agora", SourceName::Agora},
        {"Berlusconi", SourceName::Berlusconi},
        {"CannaHome", SourceName::CannaHome},
        {"Duta10k", SourceName::Duta10k},
        {"ManualDarkWeb", SourceName::ManualDarkWeb},
        {"NormalWeb", SourceName::NormalWeb},
        {"SilkRoad", SourceName::SilkRoad},
        {"Synthetic", SourceName::Synthetic},
    };
    auto it = table.find(s);
    if (it == table.end()) throw Error(kModule, "unknown source name: " + s);
    return it->second;
}

SourceMode source_mode_from_string(const std::string& s) {
    if (s == "general") return SourceMode::General;
    if (s == "marketplace") return SourceMode::Marketplace;
    if (s == "pretext") return SourceMode::Pretext;
    throw Error(kModule, "unknown source mode: " + s + " (expected general|marketplace|pretext)");
}

std::string document_to_json_line(const Document& doc) {
    ordered_json j;
    j["id"] = doc.id;
    j["source"] = to_string(doc.source.name);
    j["mode"] = to_string(doc.source.mode);
    if (doc.raw_html) j["raw_html"] = *doc.raw_html;
    if (doc.raw_text) j["raw_text"] = *doc.raw_text;
    if (doc.main_label) j["main_label"] = *doc.main_label;
    if (doc.drug_sublabel) j["drug_sublabel"] = *doc.drug_sublabel;
    if (doc.extracted_text) j["extracted_text"] = *doc.extracted_text;
    if (doc.tokens) j["tokens"] = *doc.tokens;
    if (doc.skipped) j["skipped"] = true;
    return j.dump();
}

Document document_from_json_line(const std::string& line, std::size_t line_number) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        record_error(line_number, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) record_error(line_number, "record must be a JSON object");

    Document doc;
    auto id = opt_string(j, "id", line_number);
    if (!id || id->empty()) record_error(line_number, "missing or empty field id");
    doc.id = *id;

    auto source = opt_string(j, "source", line_number);
    if (!source) record_error(line_number, "missing field source");
    auto mode = opt_string(j, "mode", line_number);
    if (!mode) record_error(line_number, "missing field mode");
    try {
        doc.source.name = source_name_from_string(*source);
        doc.source.mode = source_mode_from_string(*mode);
    } catch (const Error& e) {
        record_error(line_number, e.what());
    }

    doc.raw_html = opt_string(j, "raw_html", line_number);
    doc.raw_text = opt_string(j, "raw_text", line_number);
    doc.main_label = opt_string(j, "main_label", line_number);
    doc.drug_sublabel = opt_string(j, "drug_sublabel", line_number);
    doc.extracted_text = opt_string(j, "extracted_text", line_number);
    if (auto it = j.find("tokens"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) record_error(line_number, "field tokens must be an array");
        doc.tokens = it->get<std::vector<std::string>>();
    }
    if (auto it = j.find("skipped"); it != j.end() && it->is_boolean()) {
        doc.skipped = it->get<bool>();
    }

    if (doc.raw_html.has_value() == doc.raw_text.has_value()) {
        record_error(line_number,
                     "document " + doc.id + ": exactly one of raw_html / raw_text must be present");
    }
    if (doc.source.mode == SourceMode::Pretext && !doc.raw_text) {
        record_error(line_number, "document " + doc.id + ": mode pretext requires raw_text");
    }
    if (doc.drug_sublabel && (!doc.main_label || *doc.main_label != "Drugs")) {
        record_error(line_number,
                     "document " + doc.id + ": drug_sublabel requires main_label \"Drugs\"");
    }
    return doc;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open corpus file: " + path.string());
    std::vector<Document> docs;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        Document doc = document_from_json_line(line, line_number);
        if (!seen_ids.insert(doc.id).second) {
            throw Error(kModule, "duplicate document id: " + doc.id);
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_corpus(const std::vector<Document>& docs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(kModule, "cannot write corpus file: " + path.string());
    for (const auto& doc : docs) {
        out << document_to_json_line(doc) << '\n';
    }
    if (!out) throw Error(kModule, "write failed: " + path.string());
}

std::pair<std::vector<Document>, CorpusStats> fuse_sources(
    std::vector<std::pair<SourceTag, std::vector<Document>>> batches) {
    std::vector<Document> fused;
    std::unordered_set<std::string> seen_ids;
    for (auto& [tag, docs] : batches) {
        for (auto& doc : docs) {
            if (!seen_ids.insert(doc.id).second) {
                throw Error(kModule, "duplicate document id across batches: " + doc.id);
            }
            doc.source = tag;
            fused.push_back(std::move(doc));
        }
    }
    CorpusStats stats = compute_stats(fused);
    return {std::move(fused), std::move(stats)};
}

CorpusStats compute_stats(const std::vector<Document>& docs) {
    CorpusStats stats;
    for (const auto& doc : docs) {
        ++stats.per_source_counts[to_string(doc.source.name)];
        ++stats.per_class_counts[doc.main_label ? *doc.main_label : kUnlabeledKey];
    }
    stats.total = docs.size();
    return stats;
}

std::pair<std::vector<Document>, std::vector<Document>> stratified_split(
    const std::vector<Document>& docs, double test_fraction, std::uint64_t seed, StratifyBy key) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(kModule, "test_fraction must be in (0, 1)");
    }
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& label =
            key == StratifyBy::MainLabel ? docs[i].main_label : docs[i].drug_sublabel;
        if (!label) {
            throw Error(kModule, "document " + docs[i].id + " has no " +
                                     (key == StratifyBy::MainLabel ? "main_label" : "drug_sublabel") +
                                     "; cannot stratify");
        }
        by_class[*label].push_back(i);
    }
    for (const auto& [label, members] : by_class) {
        if (members.size() < 2) {
            throw Error(kModule, "class " + label + " has fewer than 2 documents");
        }
    }

    Rng rng(seed);
    std::vector<bool> in_test(docs.size(), false);
    // std::map iteration gives a stable class order, so the only source of
    // randomness is the seeded shuffle.
    for (auto& [label, members] : by_class) {
        const std::size_t count = members.size();
        auto want = static_cast<std::size_t>(
            std::floor(static_cast<double>(count) * test_fraction + 0.5));
        want = std::max<std::size_t>(1, std::min(want, count - 1));
        rng.shuffle(members);
        for (std::size_t k = 0; k < want; ++k) in_test[members[k]] = true;
    }

    std::vector<Document> train;
    std::vector<Document> test;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        (in_test[i] ? test : train).push_back(docs[i]);
    }
    return {std::move(train), std::move(test)};
}

}  // namespace oniontext
