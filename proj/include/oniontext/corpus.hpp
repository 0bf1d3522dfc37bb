#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oniontext {

enum class SourceName {
    Agora,
    Berlusconi,
    CannaHome,
    Duta10k,
    ManualDarkWeb,
    NormalWeb,
    SilkRoad,
    Synthetic,
};

enum class SourceMode { General, Marketplace, Pretext };

const char* to_string(SourceName name);
const char* to_string(SourceMode mode);
SourceName source_name_from_string(const std::string& s);
SourceMode source_mode_from_string(const std::string& s);

struct SourceTag {
    SourceName name = SourceName::Synthetic;
    SourceMode mode = SourceMode::General;
    bool operator==(const SourceTag&) const = default;
};

// One corpus instance flowing through the pipeline. At ingestion exactly
// one of raw_html / raw_text is present; extraction fills extracted_text,
// preprocessing fills tokens. A marketplace listing page with no product
// description is marked skipped and excluded from training.
struct Document {
    std::string id;
    SourceTag source;
    std::optional<std::string> raw_html;
    std::optional<std::string> raw_text;
    std::optional<std::string> main_label;
    std::optional<std::string> drug_sublabel;
    std::optional<std::string> extracted_text;
    std::optional<std::vector<std::string>> tokens;
    bool skipped = false;

    bool operator==(const Document&) const = default;
};

inline constexpr const char* kUnlabeledKey = "UNLABELED";

struct CorpusStats {
    std::map<std::string, std::size_t> per_source_counts;
    std::map<std::string, std::size_t> per_class_counts;  // unlabeled under kUnlabeledKey
    std::size_t total = 0;

    bool operator==(const CorpusStats&) const = default;
};

// JSON Lines corpus file, one record per line (schema in the README).
std::vector<Document> load_corpus(const std::filesystem::path& path);
void write_corpus(const std::vector<Document>& docs, const std::filesystem::path& path);

std::string document_to_json_line(const Document& doc);
Document document_from_json_line(const std::string& line, std::size_t line_number);

// Stamps every document with its batch's source tag and concatenates the
// batches in order. Ids must be unique across all batches.
std::pair<std::vector<Document>, CorpusStats> fuse_sources(
    std::vector<std::pair<SourceTag, std::vector<Document>>> batches);

CorpusStats compute_stats(const std::vector<Document>& docs);

enum class StratifyBy { MainLabel, DrugSublabel };

// Per-class holdout: test size = round-half-up(count * test_fraction),
// clamped to [1, count-1]. Every document must carry the stratification
// label and every class must have at least two documents. Deterministic
// per seed; both halves keep the input's document order.
std::pair<std::vector<Document>, std::vector<Document>> stratified_split(
    const std::vector<Document>& docs, double test_fraction, std::uint64_t seed,
    StratifyBy key = StratifyBy::MainLabel);

}  // namespace oniontext
