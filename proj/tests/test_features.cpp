#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "oniontext/error.hpp"
#include "oniontext/features.hpp"
#include "oniontext/rng.hpp"

using namespace oniontext;

namespace {

using TokenDocs = std::vector<std::vector<std::string>>;

// Independent dense evaluation of the weighting formula; the oracle the
// sparse implementation is checked against.
std::vector<double> brute_force_tfidf(const TokenDocs& corpus, std::size_t doc_index,
                                      const Vocabulary& vocab) {
    const double n_docs = static_cast<double>(corpus.size());
    std::vector<double> dense(vocab.size(), 0.0);
    for (std::size_t v = 0; v < vocab.size(); ++v) {
        const std::string& term = vocab.terms[v];
        double count = 0.0;
        for (const auto& token : corpus[doc_index]) {
            if (token == term) count += 1.0;
        }
        double df = 0.0;
        for (const auto& doc : corpus) {
            for (const auto& token : doc) {
                if (token == term) {
                    df += 1.0;
                    break;
                }
            }
        }
        dense[v] = count * (std::log((1.0 + n_docs) / (1.0 + df)) + 1.0);
    }
    double norm = 0.0;
    for (double w : dense) norm += w * w;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
        for (double& w : dense) w /= norm;
    }
    return dense;
}

std::vector<double> densify(const FeatureVector& vec) {
    std::vector<double> dense(vec.dimension, 0.0);
    for (const auto& [index, weight] : vec.entries) dense[index] = weight;
    return dense;
}

}  // namespace

TEST_CASE("fit_vocabulary counts document frequencies") {
    TokenDocs docs = {{"drug", "gun"}, {"drug"}};
    auto vocab = fit_vocabulary(docs, 1);
    CHECK(vocab.size() == 2);
    CHECK(vocab.document_frequency[vocab.term_to_index.at("drug")] == 2);
    CHECK(vocab.document_frequency[vocab.term_to_index.at("gun")] == 1);
    CHECK(vocab.n_documents_fitted == 2);

    SUBCASE("min_df filters rare terms") {
        auto filtered = fit_vocabulary(docs, 2);
        CHECK(filtered.size() == 1);
        CHECK(filtered.terms[0] == "drug");
    }
    SUBCASE("repeated tokens count once per document") {
        auto repeated = fit_vocabulary({{"drug", "drug", "drug"}}, 1);
        CHECK(repeated.document_frequency[0] == 1);
    }
}

TEST_CASE("fit_vocabulary error cases") {
    CHECK_THROWS_AS(fit_vocabulary({}, 1), Error);
    CHECK_THROWS_AS(fit_vocabulary({{}}, 1), Error);
    CHECK_THROWS_AS(fit_vocabulary({{"a"}}, 0), Error);
    CHECK_THROWS_AS(fit_vocabulary({{"a"}, {"b"}}, 3), Error);
}

TEST_CASE("vocabulary term order is lexicographic") {
    auto vocab = fit_vocabulary({{"zeta", "alpha", "mid"}, {"zeta", "alpha", "mid"}}, 1);
    CHECK(vocab.terms == std::vector<std::string>{"alpha", "mid", "zeta"});
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        CHECK(vocab.term_to_index.at(vocab.terms[i]) == i);
    }
}

TEST_CASE("the worked three-document example") {
    TokenDocs corpus = {{"drug", "drug", "gun"}, {"drug", "card"}, {"gun", "card", "card"}};
    auto vocab = fit_vocabulary(corpus, 1);
    auto vec = tfidf_transform(corpus[0], vocab);
    auto dense = densify(vec);
    // Equal document frequencies cancel under normalization: 2/sqrt(5), 1/sqrt(5).
    CHECK(dense[vocab.term_to_index.at("drug")] == doctest::Approx(0.8944).epsilon(1e-4));
    CHECK(dense[vocab.term_to_index.at("gun")] == doctest::Approx(0.4472).epsilon(1e-4));
    CHECK(dense[vocab.term_to_index.at("card")] == 0.0);
}

TEST_CASE("tfidf_transform degenerate cases") {
    auto vocab = fit_vocabulary({{"drug", "gun"}, {"drug"}}, 1);
    SUBCASE("all-OOV document is the zero vector") {
        auto vec = tfidf_transform({"unseen", "words"}, vocab);
        CHECK(vec.entries.empty());
        CHECK(vec.norm() == 0.0);
        CHECK(vec.dimension == vocab.size());
    }
    SUBCASE("single in-vocabulary token has weight 1") {
        auto vec = tfidf_transform({"gun"}, vocab);
        REQUIRE(vec.entries.size() == 1);
        CHECK(vec.entries[0].second == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("non-zero vectors have unit norm") {
        auto vec = tfidf_transform({"drug", "gun", "drug"}, vocab);
        CHECK(vec.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("transform matches the brute-force oracle on random corpora") {
    Rng rng(777);
    static const char* lexicon[] = {"alpha", "bravo", "charlie", "delta", "echo",  "foxtrot",
                                    "golf",  "hotel", "india",   "juliet", "kilo", "lima",
                                    "mike",  "nov",   "oscar",   "papa",  "quebec", "romeo",
                                    "sierra", "tango"};
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t num_docs = 1 + rng.below(10);
        const std::size_t num_terms = 1 + rng.below(20);
        TokenDocs corpus(num_docs);
        for (auto& doc : corpus) {
            const std::size_t len = rng.below(30);
            for (std::size_t i = 0; i < len; ++i) {
                doc.push_back(lexicon[rng.below(num_terms)]);
            }
        }
        bool any_tokens = false;
        for (const auto& doc : corpus) any_tokens = any_tokens || !doc.empty();
        if (!any_tokens) continue;

        auto vocab = fit_vocabulary(corpus, 1);
        for (std::size_t d = 0; d < corpus.size(); ++d) {
            auto dense = densify(tfidf_transform(corpus[d], vocab));
            auto oracle = brute_force_tfidf(corpus, d, vocab);
            REQUIRE(dense.size() == oracle.size());
            for (std::size_t v = 0; v < dense.size(); ++v) {
                CHECK(std::abs(dense[v] - oracle[v]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("duplicating every token leaves the normalized vector unchanged") {
    auto vocab = fit_vocabulary({{"a", "b", "c"}, {"a", "b"}, {"c"}}, 1);
    std::vector<std::string> doc = {"a", "a", "b", "c"};
    auto base = tfidf_transform(doc, vocab);
    for (int k = 2; k <= 5; ++k) {
        std::vector<std::string> scaled;
        for (int rep = 0; rep < k; ++rep) scaled.insert(scaled.end(), doc.begin(), doc.end());
        auto vec = tfidf_transform(scaled, vocab);
        REQUIRE(vec.entries.size() == base.entries.size());
        for (std::size_t i = 0; i < vec.entries.size(); ++i) {
            CHECK(vec.entries[i].first == base.entries[i].first);
            CHECK(vec.entries[i].second ==
                  doctest::Approx(base.entries[i].second).epsilon(1e-12));
        }
    }
}

TEST_CASE("idf is strictly decreasing in document frequency") {
    TokenDocs corpus;
    for (int i = 0; i < 8; ++i) {
        std::vector<std::string> doc = {"common"};
        if (i < 4) doc.push_back("medium");
        if (i < 1) doc.push_back("rare");
        corpus.push_back(std::move(doc));
    }
    auto vocab = fit_vocabulary(corpus, 1);
    const double idf_rare = vocab.idf(vocab.term_to_index.at("rare"));
    const double idf_medium = vocab.idf(vocab.term_to_index.at("medium"));
    const double idf_common = vocab.idf(vocab.term_to_index.at("common"));
    CHECK(idf_rare > idf_medium);
    CHECK(idf_medium > idf_common);
    CHECK(idf_common > 0.0);  // the +1 tail keeps ubiquitous terms alive
}
