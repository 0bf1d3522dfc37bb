#include "oniontext/preprocess.hpp"

#include <fstream>

#include "oniontext/error.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext {

namespace {

constexpr const char* kModule = "preprocess";

bool all_lower_alpha(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < 'a' || c > 'z') return false;
    }
    return true;
}

bool is_url_token(std::string_view token) {
    if (starts_with_ci(token, "http://") || starts_with_ci(token, "https://") ||
        starts_with_ci(token, "ftp://") || starts_with_ci(token, "www.")) {
        return true;
    }
    return token.find(".onion") != std::string_view::npos;
}

// Replaces the typographic apostrophe with the ASCII one so contraction
// keys match either spelling.
std::string normalize_apostrophes(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            static_cast<unsigned char>(text[i + 2]) == 0x99) {
            out.push_back('\'');
            i += 2;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

std::string strip_tags(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '<' && i + 1 < text.size() &&
            (is_ascii_letter(text[i + 1]) || text[i + 1] == '/' || text[i + 1] == '!' ||
             text[i + 1] == '?')) {
            if (text.compare(i, 4, "<!--") == 0) {
                std::size_t end = text.find("-->", i + 4);
                i = (end == std::string::npos) ? text.size() : end + 3;
            } else {
                std::size_t end = text.find('>', i + 1);
                i = (end == std::string::npos) ? text.size() : end + 1;
            }
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

std::string strip_urls(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_ascii_space(text[i])) {
            out.push_back(text[i++]);
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && !is_ascii_space(text[i])) ++i;
        std::string_view token(&text[start], i - start);
        if (!is_url_token(token)) out.append(token);
    }
    return out;
}

std::string lemma_step(const std::string& word, const PreprocessResources& res) {
    // Verb sense first, then noun.
    if (auto it = res.verb_lemmas.find(word); it != res.verb_lemmas.end()) return it->second;
    if (auto it = res.noun_lemmas.find(word); it != res.noun_lemmas.end()) return it->second;

    std::string first_candidate;
    for (const auto& rule : res.suffix_rules) {
        if (word.size() <= rule.suffix.size()) continue;
        const std::size_t stem_len = word.size() - rule.suffix.size();
        if (stem_len < 3) continue;
        if (word.compare(stem_len, rule.suffix.size(), rule.suffix) != 0) continue;
        if (rule.suffix == "s" &&
            (word.ends_with("ss") || word.ends_with("us") || word.ends_with("is"))) {
            continue;
        }
        std::string candidate = word.substr(0, stem_len) + rule.replacement;
        // A candidate that the dictionary knows is preferred over any
        // earlier guess, and is mapped through it for lemma stability.
        if (auto it = res.verb_lemmas.find(candidate); it != res.verb_lemmas.end()) {
            return it->second;
        }
        if (auto it = res.noun_lemmas.find(candidate); it != res.noun_lemmas.end()) {
            return it->second;
        }
        if (first_candidate.empty()) first_candidate = std::move(candidate);
    }
    return first_candidate.empty() ? word : first_candidate;
}

}  // namespace

PreprocessResources PreprocessResources::load(const std::filesystem::path& dir) {
    PreprocessResources res;

    {
        std::ifstream in(dir / "stopwords.txt");
        if (!in) throw Error(kModule, "cannot open " + (dir / "stopwords.txt").string());
        std::string line;
        while (std::getline(in, line)) {
            std::string word;
            for (char c : line) {
                if (is_ascii_letter(c)) word.push_back(ascii_lower(c));
            }
            if (!word.empty()) res.stopword_set.insert(std::move(word));
        }
    }

    for (auto& row : read_csv(dir / "contractions.csv", 2)) {
        std::string key = to_lower(row[0]);
        if (key.find('\'') == std::string::npos) {
            throw Error(kModule, "contraction without apostrophe: " + row[0]);
        }
        if (row[1].find('\'') != std::string::npos) {
            throw Error(kModule, "contraction expansion contains apostrophe: " + row[1]);
        }
        res.contraction_table[std::move(key)] = row[1];
    }

    for (auto& row : read_csv(dir / "lemma_exceptions.csv", 3)) {
        const std::string word = to_lower(row[0]);
        const std::string lemma = to_lower(row[2]);
        if (!all_lower_alpha(word) || !all_lower_alpha(lemma)) {
            throw Error(kModule, "lemma exception must be alphabetic: " + row[0]);
        }
        if (row[1] == "v") {
            res.verb_lemmas[word] = lemma;
        } else if (row[1] == "n") {
            res.noun_lemmas[word] = lemma;
        } else {
            throw Error(kModule, "lemma exception pos must be v or n: " + row[1]);
        }
    }

    for (auto& row : read_csv(dir / "suffix_rules.csv", 3)) {
        SuffixRule rule;
        rule.suffix = to_lower(row[0]);
        rule.replacement = to_lower(row[1]);
        if (rule.suffix.empty() || !all_lower_alpha(rule.suffix)) {
            throw Error(kModule, "suffix rule needs an alphabetic suffix");
        }
        if (!rule.replacement.empty() && !all_lower_alpha(rule.replacement)) {
            throw Error(kModule, "suffix replacement must be alphabetic or empty");
        }
        if (row[2] != "v" && row[2] != "n") {
            throw Error(kModule, "suffix rule pos must be v or n: " + row[2]);
        }
        rule.pos = row[2][0];
        res.suffix_rules.push_back(std::move(rule));
    }

    return res;
}

std::string clean_markup(const std::string& text) { return strip_urls(strip_tags(text)); }

std::string normalize_tokens(const std::string& text, const PreprocessResources& res) {
    const std::string input = normalize_apostrophes(text);

    // Step 3: expand contractions over word-with-apostrophe runs.
    std::string expanded;
    expanded.reserve(input.size());
    std::size_t i = 0;
    while (i < input.size()) {
        if (!is_ascii_letter(input[i]) && input[i] != '\'') {
            expanded.push_back(input[i++]);
            continue;
        }
        std::size_t start = i;
        while (i < input.size() && (is_ascii_letter(input[i]) || input[i] == '\'')) ++i;
        std::string token = input.substr(start, i - start);
        auto it = res.contraction_table.find(to_lower(token));
        if (it == res.contraction_table.end()) {
            expanded += token;
        } else {
            std::string expansion = it->second;
            if (!expansion.empty() && token[0] >= 'A' && token[0] <= 'Z') {
                expansion[0] = static_cast<char>(expansion[0] - 'a' + 'A');
            }
            expanded += expansion;
        }
    }

    // Step 4: drop digit-bearing tokens whole, then every character that
    // is not a letter.
    std::vector<std::string> kept;
    for (const auto& token : split_whitespace(expanded)) {
        bool has_digit = false;
        std::string letters;
        for (char c : token) {
            if (is_ascii_digit(c)) has_digit = true;
            if (is_ascii_letter(c)) letters.push_back(c);
        }
        if (has_digit || letters.empty()) continue;
        kept.push_back(std::move(letters));
    }
    return join(kept, " ");
}

std::string lemmatize(const std::string& word, const PreprocessResources& res) {
    std::string current = word;
    // Suffix replacements strictly shorten the word, so this converges.
    for (int guard = 0; guard < 32; ++guard) {
        std::string next = lemma_step(current, res);
        if (next == current) return current;
        current = std::move(next);
    }
    return current;
}

std::vector<std::string> filter_and_lemmatize(const std::string& text,
                                              const PreprocessResources& res) {
    std::vector<std::string> tokens;
    for (const auto& raw : split_whitespace(text)) {
        std::string word = to_lower(raw);
        if (res.stopword_set.contains(word)) continue;
        std::string lemma = lemmatize(word, res);
        // A lemma may itself be a stopword; keep the output stopword-free.
        if (res.stopword_set.contains(lemma)) continue;
        tokens.push_back(std::move(lemma));
    }
    return tokens;
}

std::vector<std::string> preprocess(const std::string& text, const PreprocessResources& res) {
    return filter_and_lemmatize(normalize_tokens(clean_markup(text), res), res);
}

}  // namespace oniontext
