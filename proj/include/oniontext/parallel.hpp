#pragma once

#include <cstdint>
#include <vector>

#include "oniontext/corpus.hpp"
#include "oniontext/extract.hpp"
#include "oniontext/features.hpp"
#include "oniontext/model.hpp"
#include "oniontext/preprocess.hpp"

namespace oniontext {

// Batch kernels over independent documents. The serial path is the
// reference; the parallel path partitions the same per-document work
// across OpenMP threads and produces bit-identical results, because each
// slot is computed independently by the same code.
enum class ExecutionPolicy { Serial, Parallel };

int max_threads();

std::vector<Document> extract_documents(std::vector<Document> docs,
                                        const SelectorConfigMap& configs,
                                        ExecutionPolicy policy);

// Tokenizes extracted_text into tokens; skipped documents pass through.
std::vector<Document> preprocess_documents(std::vector<Document> docs,
                                           const PreprocessResources& res,
                                           ExecutionPolicy policy);

std::vector<FeatureVector> transform_documents(
    const std::vector<std::vector<std::string>>& token_docs, const Vocabulary& vocab,
    ExecutionPolicy policy);

std::vector<std::uint32_t> predict_documents(const ClassifierModel& model,
                                             const std::vector<FeatureVector>& vectors,
                                             ExecutionPolicy policy);

}  // namespace oniontext
