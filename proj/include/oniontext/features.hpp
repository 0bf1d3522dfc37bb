#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace oniontext {

// Term dictionary fitted on a tokenized corpus. Term order is
// lexicographic so fits are deterministic.
struct Vocabulary {
    std::vector<std::string> terms;  // index -> term
    std::unordered_map<std::string, std::uint32_t> term_to_index;
    std::vector<std::uint32_t> document_frequency;  // per index
    std::uint32_t n_documents_fitted = 0;
    std::uint32_t min_df = 1;

    std::size_t size() const { return terms.size(); }

    // Smoothed inverse document frequency: ln((1 + N) / (1 + df)) + 1.
    double idf(std::uint32_t index) const;

    bool operator==(const Vocabulary&) const = default;
};

// Sparse L2-normalized vector; all-zero when no token is in-vocabulary.
struct FeatureVector {
    std::vector<std::pair<std::uint32_t, double>> entries;  // sorted by index
    std::uint32_t dimension = 0;

    double norm() const;

    bool operator==(const FeatureVector&) const = default;
};

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& token_docs,
                          std::uint32_t min_df);

FeatureVector tfidf_transform(const std::vector<std::string>& tokens, const Vocabulary& vocab);

}  // namespace oniontext
