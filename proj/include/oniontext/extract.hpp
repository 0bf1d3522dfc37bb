#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oniontext/corpus.hpp"

namespace oniontext {

struct MarketplaceSelectorConfig {
    std::string marketplace_name;
    std::string title_selector;
    std::string description_selector;
};

struct ExtractedText {
    enum class Mode { General, Marketplace };

    std::vector<std::string> lines;  // non-empty, markup-free
    Mode mode = Mode::General;

    std::string joined() const;
};

// General-page procedure: drop script/style subtrees, take the remaining
// visible text, trim each line, break multi-headline lines (runs of two
// or more spaces, or tabs) into separate lines, drop blanks.
ExtractedText extract_general(std::string_view html);

// Marketplace procedure: title and description located by per-market
// selectors. Returns nothing for listing-style pages whose description
// selector matches no element with text; those pages are skipped.
std::optional<std::pair<std::string, std::string>> extract_marketplace(
    std::string_view html, const MarketplaceSelectorConfig& config);

using SelectorConfigMap = std::map<std::string, MarketplaceSelectorConfig>;

// One JSON record per marketplace:
// {"marketplace": str, "title_selector": str, "description_selector": str}
SelectorConfigMap load_selector_configs(const std::filesystem::path& path);

// Dispatches on the document's source mode and fills extracted_text
// (general: joined lines; marketplace: "title\ndescription" or the
// skipped flag; pretext: raw_text copied through).
Document extract_document(Document doc, const SelectorConfigMap& configs);

}  // namespace oniontext
