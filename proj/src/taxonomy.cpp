#include "oniontext/taxonomy.hpp"

#include <algorithm>
#include <set>

#include "oniontext/error.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext {

namespace {

constexpr const char* kModule = "taxonomy";

// Canonical key for sub-class lookup: the printed table renders one row
// with a '/' where the category path join would give a space.
std::string spaced_key(std::string_view name) {
    std::string out(collapse_whitespace(name));
    for (char& c : out) {
        if (c == '/') c = ' ';
    }
    return out;
}

std::string join_path_segments(const std::string& path) {
    auto segments = split(path, '/');
    std::vector<std::string> cleaned;
    for (auto& s : segments) {
        auto t = collapse_whitespace(s);
        if (!t.empty()) cleaned.push_back(std::move(t));
    }
    return join(cleaned, " ");
}

}  // namespace

Taxonomy Taxonomy::load(const std::filesystem::path& taxonomy_dir) {
    auto main_rows = read_csv(taxonomy_dir / "main_classes.csv", 1);
    std::vector<std::string> main_classes;
    for (auto& row : main_rows) main_classes.push_back(collapse_whitespace(row[0]));

    auto subclass_rows = read_csv(taxonomy_dir / "drug_subclasses.csv", 2);
    std::vector<std::string> drug_rows;
    for (auto& row : subclass_rows) drug_rows.push_back(collapse_whitespace(row[1]));

    auto duta_csv = read_csv(taxonomy_dir / "duta_map.csv", 3);
    std::vector<DutaRow> duta_rows;
    for (auto& row : duta_csv) {
        duta_rows.push_back({collapse_whitespace(row[0]), collapse_whitespace(row[1]),
                             collapse_whitespace(row[2])});
    }

    auto agora_csv = read_csv(taxonomy_dir / "agora_map.csv", 3);
    std::vector<AgoraRow> agora_rows;
    for (auto& row : agora_csv) {
        agora_rows.push_back({collapse_whitespace(row[0]), collapse_whitespace(row[1]),
                              collapse_whitespace(row[2])});
    }

    return from_tables(std::move(main_classes), std::move(drug_rows), std::move(duta_rows),
                       std::move(agora_rows));
}

Taxonomy Taxonomy::from_tables(std::vector<std::string> main_classes,
                               std::vector<std::string> drug_subclass_rows,
                               std::vector<DutaRow> duta_rows,
                               std::vector<AgoraRow> agora_rows) {
    Taxonomy t;
    t.main_classes_ = std::move(main_classes);
    t.drug_subclass_rows_ = std::move(drug_subclass_rows);
    t.duta_rows_ = std::move(duta_rows);
    t.agora_rows_ = std::move(agora_rows);
    t.build_indexes();
    return t;
}

void Taxonomy::build_indexes() {
    main_class_index_.clear();
    for (std::size_t i = 0; i < main_classes_.size(); ++i) {
        main_class_index_.emplace(main_classes_[i], i);
    }

    distinct_subclasses_.clear();
    subclass_index_.clear();
    subclass_by_spaced_name_.clear();
    for (const auto& name : drug_subclass_rows_) {
        if (subclass_index_.emplace(name, distinct_subclasses_.size()).second) {
            distinct_subclasses_.push_back(name);
            subclass_by_spaced_name_.emplace(spaced_key(name), name);
        }
    }

    duta_index_.clear();
    for (std::size_t i = 0; i < duta_rows_.size(); ++i) {
        duta_index_.emplace(std::make_pair(duta_rows_[i].original_label,
                                           duta_rows_[i].original_sublabel),
                            i);
    }
    agora_index_.clear();
    for (std::size_t i = 0; i < agora_rows_.size(); ++i) {
        agora_index_.emplace(agora_rows_[i].category, i);
    }
}

bool Taxonomy::is_main_class(const std::string& label) const {
    return main_class_index_.contains(collapse_whitespace(label));
}

std::optional<std::size_t> Taxonomy::main_class_index(const std::string& label) const {
    auto it = main_class_index_.find(collapse_whitespace(label));
    if (it == main_class_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Taxonomy::drug_subclass_index(const std::string& name) const {
    auto it = subclass_index_.find(collapse_whitespace(name));
    if (it == subclass_index_.end()) return std::nullopt;
    return it->second;
}

MappingResult Taxonomy::map_duta_label(const std::string& original,
                                       const std::optional<std::string>& sub) const {
    const std::string label = collapse_whitespace(original);
    const std::string sublabel = sub ? collapse_whitespace(*sub) : std::string();

    auto make_result = [&](const DutaRow& row) {
        MappingResult r;
        r.main_class = row.new_main_class;
        r.provenance = "duta_map: " + row.original_label +
                       (row.original_sublabel.empty() ? "" : " / " + row.original_sublabel);
        return r;
    };

    if (auto it = duta_index_.find({label, sublabel}); it != duta_index_.end()) {
        return make_result(duta_rows_[it->second]);
    }
    if (!sublabel.empty()) {
        if (auto it = duta_index_.find({label, std::string()}); it != duta_index_.end()) {
            return make_result(duta_rows_[it->second]);
        }
    }
    // All rows of a known label agree on one target; accept any sub-label.
    const DutaRow* unique_row = nullptr;
    for (const auto& row : duta_rows_) {
        if (row.original_label != label) continue;
        if (unique_row == nullptr) {
            unique_row = &row;
        } else if (row.new_main_class != unique_row->new_main_class) {
            unique_row = nullptr;
            break;
        }
    }
    if (unique_row != nullptr) return make_result(*unique_row);

    std::set<std::string> known;
    for (const auto& row : duta_rows_) known.insert(row.original_label);
    std::string list;
    for (const auto& k : known) {
        if (!list.empty()) list += ", ";
        list += k;
    }
    throw Error(kModule, "unknown Duta10k label: " + label + " (known labels: " + list + ")");
}

MappingResult Taxonomy::map_agora_label(const std::string& category) const {
    const std::string key = collapse_whitespace(category);
    auto it = agora_index_.find(key);
    if (it == agora_index_.end()) {
        throw Error(kModule, "unknown Agora category: " + key);
    }
    const AgoraRow& row = agora_rows_[it->second];
    MappingResult r;
    r.main_class = row.new_main_class;
    if (!row.drug_subclass.empty()) r.drug_sublabel = row.drug_subclass;
    r.provenance = "agora_map: " + row.category;
    return r;
}

std::optional<std::string> Taxonomy::resolve_drug_subclass(const std::string& category_path) const {
    const std::string path = collapse_whitespace(category_path);

    auto lookup_canonical = [&](const std::string& derived) -> std::optional<std::string> {
        if (auto it = subclass_index_.find(derived); it != subclass_index_.end()) return derived;
        if (auto it = subclass_by_spaced_name_.find(spaced_key(derived));
            it != subclass_by_spaced_name_.end()) {
            return it->second;
        }
        return std::nullopt;
    };

    if (auto it = agora_index_.find(path); it != agora_index_.end()) {
        const AgoraRow& row = agora_rows_[it->second];
        if (row.new_main_class != kDrugsClass) return std::nullopt;
        if (auto canonical = lookup_canonical(row.drug_subclass.empty()
                                                  ? join_path_segments(path)
                                                  : row.drug_subclass)) {
            return canonical;
        }
        throw Error(kModule, "drug category " + path + " has no matching sub-class row");
    }

    const bool drugs_prefixed = path.rfind("Drugs/", 0) == 0;
    std::string tail = drugs_prefixed ? path.substr(6) : path;
    auto canonical = lookup_canonical(join_path_segments(tail));
    if (canonical) return canonical;
    if (drugs_prefixed) {
        throw Error(kModule, "drug path " + path + " derives no known sub-class row");
    }
    return std::nullopt;
}

ValidationReport Taxonomy::validate() const {
    ValidationReport report;
    auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

    std::set<std::string> distinct_main(main_classes_.begin(), main_classes_.end());
    if (distinct_main.size() != 19) {
        fail("main class count: expected 19 distinct, found " +
             std::to_string(distinct_main.size()));
    }
    if (main_classes_.size() != distinct_main.size()) {
        fail("main class list contains duplicates");
    }

    if (drug_subclass_rows_.size() != 49) {
        fail("drug sub-class rows: expected 49, found " +
             std::to_string(drug_subclass_rows_.size()));
    }
    if (distinct_subclasses_.size() != 48) {
        fail("distinct drug sub-class names: expected 48, found " +
             std::to_string(distinct_subclasses_.size()));
    }

    for (const auto& row : duta_rows_) {
        if (row.new_main_class != kDroppedLabel && !distinct_main.contains(row.new_main_class)) {
            fail("duta_map target not a main class: " + row.original_label + " -> " +
                 row.new_main_class);
        }
    }

    std::set<std::string> agora_targets;
    std::set<std::string> seen_categories;
    for (const auto& row : agora_rows_) {
        if (!seen_categories.insert(row.category).second) {
            fail("agora_map duplicate category: " + row.category);
        }
        if (!distinct_main.contains(row.new_main_class)) {
            fail("agora_map target not a main class: " + row.category + " -> " +
                 row.new_main_class);
        } else {
            agora_targets.insert(row.new_main_class);
        }
        const bool is_drugs = row.new_main_class == kDrugsClass;
        if (is_drugs && row.drug_subclass.empty()) {
            fail("agora_map drug category without sub-class: " + row.category);
        }
        if (!is_drugs && !row.drug_subclass.empty()) {
            fail("agora_map sub-class on non-Drugs target: " + row.category + " -> " +
                 row.new_main_class);
        }
        if (!row.drug_subclass.empty() && !subclass_index_.contains(row.drug_subclass)) {
            fail("agora_map sub-class not a known row: " + row.category + " -> " +
                 row.drug_subclass);
        }
    }
    if (agora_targets.size() != 15) {
        fail("distinct agora_map main-class targets: expected 15, found " +
             std::to_string(agora_targets.size()));
    }

    // Every distinct sub-class name must be reachable from some category.
    std::set<std::string> reached;
    for (const auto& row : agora_rows_) {
        if (!row.drug_subclass.empty()) reached.insert(row.drug_subclass);
    }
    for (const auto& name : distinct_subclasses_) {
        if (!reached.contains(name)) {
            fail("drug sub-class unreachable from agora_map: " + name);
        }
    }

    return report;
}

ValidationReport validate_taxonomy(const Taxonomy& taxonomy) { return taxonomy.validate(); }

}  // namespace oniontext
