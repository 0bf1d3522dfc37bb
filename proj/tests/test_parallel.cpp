#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oniontext/error.hpp"
#include "oniontext/fixtures.hpp"
#include "oniontext/parallel.hpp"
#include "test_support.hpp"

using namespace oniontext;

namespace {

struct Pipeline {
    Taxonomy taxonomy = Taxonomy::load(test::taxonomy_dir());
    PreprocessResources res = PreprocessResources::load(test::preprocess_dir());
    SelectorConfigMap configs = load_selector_configs(test::selectors_file());
    std::vector<Document> docs;

    Pipeline() {
        GeneratorSpec spec;
        spec.seed = 404;
        spec.docs_per_class = 8;
        docs = generate_corpus(spec, taxonomy);
    }
};

}  // namespace

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
    Pipeline p;

    auto extracted_serial = extract_documents(p.docs, p.configs, ExecutionPolicy::Serial);
    auto extracted_parallel = extract_documents(p.docs, p.configs, ExecutionPolicy::Parallel);
    CHECK(extracted_serial == extracted_parallel);

    auto tokens_serial = preprocess_documents(extracted_serial, p.res, ExecutionPolicy::Serial);
    auto tokens_parallel =
        preprocess_documents(extracted_parallel, p.res, ExecutionPolicy::Parallel);
    CHECK(tokens_serial == tokens_parallel);

    std::vector<std::vector<std::string>> token_docs;
    for (const auto& doc : tokens_serial) {
        if (!doc.skipped) token_docs.push_back(*doc.tokens);
    }
    auto vocab = fit_vocabulary(token_docs, 2);
    auto vectors_serial = transform_documents(token_docs, vocab, ExecutionPolicy::Serial);
    auto vectors_parallel = transform_documents(token_docs, vocab, ExecutionPolicy::Parallel);
    CHECK(vectors_serial == vectors_parallel);

    LabeledFeatures features;
    for (std::size_t i = 0; i < token_docs.size(); ++i) {
        features.emplace_back(vectors_serial[i], static_cast<std::uint32_t>(i % 19));
    }
    TrainingConfig config;
    config.seed = 2;
    auto [model, trace] =
        train(features, Task::Main, p.taxonomy.main_classes(), vocab, config);

    auto predictions_serial = predict_documents(model, vectors_serial, ExecutionPolicy::Serial);
    auto predictions_parallel =
        predict_documents(model, vectors_parallel, ExecutionPolicy::Parallel);
    CHECK(predictions_serial == predictions_parallel);
}

TEST_CASE("errors inside the parallel region propagate") {
    Pipeline p;
    // Documents straight from the generator have no extracted_text yet.
    CHECK_THROWS_WITH_AS(preprocess_documents(p.docs, p.res, ExecutionPolicy::Parallel),
                         doctest::Contains("extracted_text"), Error);
    CHECK_THROWS_WITH_AS(preprocess_documents(p.docs, p.res, ExecutionPolicy::Serial),
                         doctest::Contains("extracted_text"), Error);
}

TEST_CASE("empty batches are fine under both policies") {
    Pipeline p;
    CHECK(extract_documents({}, p.configs, ExecutionPolicy::Parallel).empty());
    CHECK(transform_documents({}, fit_vocabulary({{"a"}, {"a"}}, 1), ExecutionPolicy::Parallel)
              .empty());
}
