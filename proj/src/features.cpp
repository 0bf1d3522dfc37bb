#include "oniontext/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "oniontext/error.hpp"

namespace oniontext {

namespace {
constexpr const char* kModule = "features";
}

double Vocabulary::idf(std::uint32_t index) const {
    return std::log((1.0 + n_documents_fitted) / (1.0 + document_frequency[index])) + 1.0;
}

double FeatureVector::norm() const {
    double sum = 0.0;
    for (const auto& [index, weight] : entries) sum += weight * weight;
    return std::sqrt(sum);
}

Vocabulary fit_vocabulary(const std::vector<std::vector<std::string>>& token_docs,
                          std::uint32_t min_df) {
    if (min_df < 1) throw Error(kModule, "min_df must be >= 1");
    if (token_docs.empty()) throw Error(kModule, "cannot fit vocabulary on an empty corpus");

    // std::map keeps terms lexicographic, which fixes the index order.
    std::map<std::string, std::uint32_t> df;
    for (const auto& doc : token_docs) {
        std::map<std::string, bool> seen;
        for (const auto& token : doc) {
            if (!seen.emplace(token, true).second) continue;
            ++df[token];
        }
    }

    Vocabulary vocab;
    vocab.min_df = min_df;
    vocab.n_documents_fitted = static_cast<std::uint32_t>(token_docs.size());
    for (const auto& [term, count] : df) {
        if (count < min_df) continue;
        vocab.term_to_index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
        vocab.terms.push_back(term);
        vocab.document_frequency.push_back(count);
    }
    if (vocab.terms.empty()) {
        throw Error(kModule, "no term appears in at least " + std::to_string(min_df) +
                                 " documents; vocabulary is empty");
    }
    return vocab;
}

FeatureVector tfidf_transform(const std::vector<std::string>& tokens, const Vocabulary& vocab) {
    FeatureVector vec;
    vec.dimension = static_cast<std::uint32_t>(vocab.size());

    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto& token : tokens) {
        auto it = vocab.term_to_index.find(token);
        if (it == vocab.term_to_index.end()) continue;  // out-of-vocabulary
        ++counts[it->second];
    }
    if (counts.empty()) return vec;  // all-zero vector

    double norm_sq = 0.0;
    vec.entries.reserve(counts.size());
    for (const auto& [index, count] : counts) {
        const double weight = static_cast<double>(count) * vocab.idf(index);
        vec.entries.emplace_back(index, weight);
        norm_sq += weight * weight;
    }
    const double norm = std::sqrt(norm_sq);
    for (auto& [index, weight] : vec.entries) weight /= norm;
    return vec;
}

}  // namespace oniontext
