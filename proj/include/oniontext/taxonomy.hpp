#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oniontext {

inline constexpr const char* kDroppedLabel = "DROPPED";
inline constexpr const char* kDrugsClass = "Drugs";

struct MappingResult {
    std::string main_class;  // a final main class, or kDroppedLabel
    std::optional<std::string> drug_sublabel;
    std::string provenance;  // which table row fired

    bool dropped() const { return main_class == kDroppedLabel; }
};

struct DutaRow {
    std::string original_label;
    std::string original_sublabel;  // empty when the row has no sub-label
    std::string new_main_class;     // final class or kDroppedLabel
};

struct AgoraRow {
    std::string category;
    std::string new_main_class;
    std::string drug_subclass;  // empty for non-drug categories
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// The final 19-class inventory, the 49 drug sub-class rows and the two
// source-label mapping tables. Immutable after construction; safe for
// concurrent readers.
class Taxonomy {
public:
    static Taxonomy load(const std::filesystem::path& taxonomy_dir);

    static Taxonomy from_tables(std::vector<std::string> main_classes,
                                std::vector<std::string> drug_subclass_rows,
                                std::vector<DutaRow> duta_rows,
                                std::vector<AgoraRow> agora_rows);

    const std::vector<std::string>& main_classes() const { return main_classes_; }
    const std::vector<std::string>& drug_subclass_rows() const { return drug_subclass_rows_; }
    // Distinct sub-class names in first-occurrence order (the duplicated
    // row collapses onto its first printing).
    const std::vector<std::string>& distinct_drug_subclasses() const { return distinct_subclasses_; }
    const std::vector<DutaRow>& duta_rows() const { return duta_rows_; }
    const std::vector<AgoraRow>& agora_rows() const { return agora_rows_; }

    bool is_main_class(const std::string& label) const;
    std::optional<std::size_t> main_class_index(const std::string& label) const;
    std::optional<std::size_t> drug_subclass_index(const std::string& name) const;

    MappingResult map_duta_label(const std::string& original,
                                 const std::optional<std::string>& sub = std::nullopt) const;
    MappingResult map_agora_label(const std::string& category) const;

    // For an Agora category that maps to the Drugs main class, the
    // canonical sub-class name; none for non-drug categories. Unmapped
    // paths under "Drugs/" must still resolve to a known sub-class row.
    std::optional<std::string> resolve_drug_subclass(const std::string& category_path) const;

    ValidationReport validate() const;

private:
    Taxonomy() = default;
    void build_indexes();

    std::vector<std::string> main_classes_;
    std::vector<std::string> drug_subclass_rows_;
    std::vector<std::string> distinct_subclasses_;
    std::vector<DutaRow> duta_rows_;
    std::vector<AgoraRow> agora_rows_;

    std::map<std::string, std::size_t> main_class_index_;
    std::map<std::string, std::size_t> subclass_index_;          // canonical name -> index
    std::map<std::string, std::string> subclass_by_spaced_name_; // slash/space-insensitive key
    std::map<std::pair<std::string, std::string>, std::size_t> duta_index_;
    std::map<std::string, std::size_t> agora_index_;
};

ValidationReport validate_taxonomy(const Taxonomy& taxonomy);

}  // namespace oniontext
