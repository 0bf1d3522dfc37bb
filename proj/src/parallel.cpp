#include "oniontext/parallel.hpp"

#include <exception>

#include "oniontext/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oniontext {

namespace {

// Runs fn(i) for i in [0, n). In parallel mode the first exception is
// captured and rethrown after the loop; OpenMP regions must not leak.
template <typename Fn>
void for_each_index(std::size_t n, ExecutionPolicy policy, Fn&& fn) {
#ifdef _OPENMP
    if (policy == ExecutionPolicy::Parallel) {
        std::exception_ptr first_error = nullptr;
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            try {
                fn(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical(oniontext_parallel_error)
                if (first_error == nullptr) first_error = std::current_exception();
            }
        }
        if (first_error != nullptr) std::rethrow_exception(first_error);
        return;
    }
#else
    (void)policy;
#endif
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

std::vector<Document> extract_documents(std::vector<Document> docs,
                                        const SelectorConfigMap& configs,
                                        ExecutionPolicy policy) {
    for_each_index(docs.size(), policy,
                   [&](std::size_t i) { docs[i] = extract_document(std::move(docs[i]), configs); });
    return docs;
}

std::vector<Document> preprocess_documents(std::vector<Document> docs,
                                           const PreprocessResources& res,
                                           ExecutionPolicy policy) {
    for_each_index(docs.size(), policy, [&](std::size_t i) {
        Document& doc = docs[i];
        if (doc.skipped) return;
        if (!doc.extracted_text) {
            throw Error("preprocess", "document " + doc.id +
                                          " has no extracted_text; run the extract stage first");
        }
        doc.tokens = preprocess(*doc.extracted_text, res);
    });
    return docs;
}

std::vector<FeatureVector> transform_documents(
    const std::vector<std::vector<std::string>>& token_docs, const Vocabulary& vocab,
    ExecutionPolicy policy) {
    std::vector<FeatureVector> vectors(token_docs.size());
    for_each_index(token_docs.size(), policy,
                   [&](std::size_t i) { vectors[i] = tfidf_transform(token_docs[i], vocab); });
    return vectors;
}

std::vector<std::uint32_t> predict_documents(const ClassifierModel& model,
                                             const std::vector<FeatureVector>& vectors,
                                             ExecutionPolicy policy) {
    std::vector<std::uint32_t> predictions(vectors.size(), 0);
    for_each_index(vectors.size(), policy, [&](std::size_t i) {
        predictions[i] = static_cast<std::uint32_t>(argmax(predict_proba(model, vectors[i])));
    });
    return predictions;
}

}  // namespace oniontext
