#include "oniontext/extract.hpp"

#include <fstream>

#include <json.hpp>

#include "oniontext/error.hpp"
#include "oniontext/html.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext {

namespace {

constexpr const char* kModule = "extract";

// Step 4: a whitespace run inside a line separates headlines when it
// contains a tab or spans two or more characters.
std::vector<std::string> split_multi_headline(const std::string& line) {
    std::vector<std::string> segments;
    std::string current;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
            std::size_t start = i;
            bool has_tab = false;
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
                has_tab = has_tab || line[i] == '\t';
                ++i;
            }
            if (has_tab || i - start >= 2) {
                if (!current.empty()) segments.push_back(std::move(current));
                current.clear();
            } else if (!current.empty()) {
                current.push_back(' ');
            }
        } else {
            current.push_back(line[i++]);
        }
    }
    if (!current.empty()) segments.push_back(std::move(current));
    return segments;
}

}  // namespace

std::string ExtractedText::joined() const { return join(lines, "\n"); }

ExtractedText extract_general(std::string_view html_source) {
    auto root = html::parse(html_source);
    std::string text = html::visible_text(*root);

    ExtractedText out;
    out.mode = ExtractedText::Mode::General;
    for (const auto& raw_line : split(text, '\n')) {
        std::string line = trim(raw_line);
        if (line.empty()) continue;
        for (auto& segment : split_multi_headline(line)) {
            if (!segment.empty()) out.lines.push_back(std::move(segment));
        }
    }
    return out;
}

std::optional<std::pair<std::string, std::string>> extract_marketplace(
    std::string_view html_source, const MarketplaceSelectorConfig& config) {
    html::Selector title_selector = html::Selector::parse(config.title_selector);
    html::Selector description_selector = html::Selector::parse(config.description_selector);

    auto root = html::parse(html_source);
    const html::Node* description_el = nullptr;
    for (const html::Node* candidate : description_selector.find_all(*root)) {
        if (!collapse_whitespace(html::visible_text(*candidate)).empty()) {
            description_el = candidate;
            break;
        }
    }
    if (description_el == nullptr) return std::nullopt;

    std::string description = collapse_whitespace(html::visible_text(*description_el));
    std::string title;
    if (const html::Node* title_el = title_selector.find_first(*root)) {
        title = collapse_whitespace(html::visible_text(*title_el));
    }
    return std::make_pair(std::move(title), std::move(description));
}

SelectorConfigMap load_selector_configs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(kModule, "cannot open selector config: " + path.string());
    SelectorConfigMap configs;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(kModule, path.filename().string() + " line " +
                                     std::to_string(line_number) + ": " + e.what());
        }
        MarketplaceSelectorConfig config;
        try {
            config.marketplace_name = j.at("marketplace").get<std::string>();
            config.title_selector = j.at("title_selector").get<std::string>();
            config.description_selector = j.at("description_selector").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(kModule, path.filename().string() + " line " +
                                     std::to_string(line_number) + ": " + e.what());
        }
        // Surface selector syntax errors at configuration time.
        html::Selector::parse(config.title_selector);
        html::Selector::parse(config.description_selector);
        configs[config.marketplace_name] = std::move(config);
    }
    return configs;
}

Document extract_document(Document doc, const SelectorConfigMap& configs) {
    switch (doc.source.mode) {
        case SourceMode::General: {
            if (!doc.raw_html) {
                throw Error(kModule, "document " + doc.id + ": general mode requires raw_html");
            }
            doc.extracted_text = extract_general(*doc.raw_html).joined();
            return doc;
        }
        case SourceMode::Marketplace: {
            if (!doc.raw_html) {
                throw Error(kModule,
                            "document " + doc.id + ": marketplace mode requires raw_html");
            }
            const std::string market = to_string(doc.source.name);
            auto it = configs.find(market);
            if (it == configs.end()) {
                throw Error(kModule, "document " + doc.id +
                                         ": no selector config registered for marketplace " +
                                         market);
            }
            auto result = extract_marketplace(*doc.raw_html, it->second);
            if (!result) {
                doc.skipped = true;  // listing page without a product description
                doc.extracted_text.reset();
            } else {
                doc.extracted_text = result->first + "\n" + result->second;
            }
            return doc;
        }
        case SourceMode::Pretext: {
            if (!doc.raw_text) {
                throw Error(kModule, "document " + doc.id + ": pretext mode requires raw_text");
            }
            doc.extracted_text = *doc.raw_text;
            return doc;
        }
    }
    throw Error(kModule, "document " + doc.id + ": unknown source mode");
}

}  // namespace oniontext
