#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace oniontext {

// Data tables backing the cleaning pipeline. Immutable after load.
struct PreprocessResources {
    std::unordered_map<std::string, std::string> contraction_table;  // lowercase key
    std::unordered_set<std::string> stopword_set;                    // lowercase alphabetic
    std::unordered_map<std::string, std::string> verb_lemmas;
    std::unordered_map<std::string, std::string> noun_lemmas;

    struct SuffixRule {
        std::string suffix;
        std::string replacement;
        char pos;  // 'v' or 'n'
    };
    std::vector<SuffixRule> suffix_rules;

    // Reads stopwords.txt, contractions.csv, lemma_exceptions.csv and
    // suffix_rules.csv from the given directory. Stopword entries are
    // normalized to their alphabetic form (apostrophes dropped) so the
    // set matches tokens as they look after special-character removal.
    static PreprocessResources load(const std::filesystem::path& dir);
};

// Steps 1-2: residual markup tags, then URL tokens (http/https/ftp
// schemes, www. prefixes, bare .onion hosts) removed.
std::string clean_markup(const std::string& text);

// Steps 3-4: contractions expanded, then characters outside letters and
// spaces dropped, with digit-bearing tokens removed whole.
std::string normalize_tokens(const std::string& text, const PreprocessResources& res);

// Steps 5-6: whitespace tokenization, lowercasing, stopword removal,
// lemmatization (dictionary first, suffix rules as fallback).
std::vector<std::string> filter_and_lemmatize(const std::string& text,
                                              const PreprocessResources& res);

// The full six-step pipeline.
std::vector<std::string> preprocess(const std::string& text, const PreprocessResources& res);

// Exposed for tests: lowercase word in, lemma out. Idempotent.
std::string lemmatize(const std::string& word, const PreprocessResources& res);

}  // namespace oniontext
