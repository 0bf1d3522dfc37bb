// Times the batch kernels in serial and OpenMP-parallel mode on a
// synthetic corpus and reports the speedup. The serial path is the
// reference implementation; outputs are compared for equality so the
// benchmark doubles as a smoke check.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "oniontext/corpus.hpp"
#include "oniontext/extract.hpp"
#include "oniontext/features.hpp"
#include "oniontext/fixtures.hpp"
#include "oniontext/model.hpp"
#include "oniontext/parallel.hpp"
#include "oniontext/preprocess.hpp"
#include "oniontext/taxonomy.hpp"
#include "oniontext/text_util.hpp"

using namespace oniontext;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename Fn>
double time_it(Fn&& fn) {
    const double start = now_seconds();
    fn();
    return now_seconds() - start;
}

void print_row(const char* stage, double serial_s, double parallel_s, bool identical) {
    std::printf("%-12s %10.3fs %12.3fs %9.2fx   %s\n", stage, serial_s, parallel_s,
                serial_s / parallel_s, identical ? "outputs identical" : "OUTPUTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    std::uint32_t per_class = 300;
    if (argc > 1) per_class = static_cast<std::uint32_t>(std::strtoul(argv[1], nullptr, 10));

    const auto data_dir = resolve_data_dir();
    Taxonomy taxonomy = Taxonomy::load(data_dir / "taxonomy");
    auto resources = PreprocessResources::load(data_dir / "preprocess");
    auto selectors = load_selector_configs(data_dir / "selectors" / "marketplaces.jsonl");

    GeneratorSpec spec;
    spec.seed = 1;
    spec.docs_per_class = per_class;
    spec.classes = Task::Main;
    auto docs = generate_corpus(spec, taxonomy);
    std::printf("corpus: %zu documents, %d threads available\n\n", docs.size(), max_threads());
    std::printf("%-12s %11s %13s %10s\n", "stage", "serial", "parallel", "speedup");

    const double extract_serial = time_it([&] {
        (void)extract_documents(docs, selectors, ExecutionPolicy::Serial);
    });
    auto extracted_serial = extract_documents(docs, selectors, ExecutionPolicy::Serial);
    std::vector<Document> extracted_parallel;
    const double extract_parallel = time_it([&] {
        extracted_parallel = extract_documents(docs, selectors, ExecutionPolicy::Parallel);
    });
    print_row("extract", extract_serial, extract_parallel, extracted_serial == extracted_parallel);

    auto preprocessed_serial = extracted_serial;
    const double prep_serial = time_it([&] {
        preprocessed_serial =
            preprocess_documents(std::move(preprocessed_serial), resources, ExecutionPolicy::Serial);
    });
    auto preprocessed_parallel = extracted_parallel;
    const double prep_parallel = time_it([&] {
        preprocessed_parallel = preprocess_documents(std::move(preprocessed_parallel), resources,
                                                     ExecutionPolicy::Parallel);
    });
    print_row("preprocess", prep_serial, prep_parallel,
              preprocessed_serial == preprocessed_parallel);

    std::vector<std::vector<std::string>> token_docs;
    token_docs.reserve(preprocessed_serial.size());
    for (const auto& doc : preprocessed_serial) {
        token_docs.push_back(doc.tokens ? *doc.tokens : std::vector<std::string>{});
    }
    Vocabulary vocab = fit_vocabulary(token_docs, 2);

    std::vector<FeatureVector> vectors_serial;
    const double tf_serial = time_it([&] {
        vectors_serial = transform_documents(token_docs, vocab, ExecutionPolicy::Serial);
    });
    std::vector<FeatureVector> vectors_parallel;
    const double tf_parallel = time_it([&] {
        vectors_parallel = transform_documents(token_docs, vocab, ExecutionPolicy::Parallel);
    });
    print_row("tf-idf", tf_serial, tf_parallel, vectors_serial == vectors_parallel);

    LabeledFeatures features;
    features.reserve(vectors_serial.size());
    for (std::size_t i = 0; i < preprocessed_serial.size(); ++i) {
        const auto index = taxonomy.main_class_index(*preprocessed_serial[i].main_label);
        features.emplace_back(vectors_serial[i], static_cast<std::uint32_t>(*index));
    }
    TrainingConfig config;
    config.seed = 1;
    ClassifierModel model;
    const double train_time = time_it([&] {
        auto [m, trace] = train(features, Task::Main, taxonomy.main_classes(), vocab, config);
        model = std::move(m);
    });
    std::printf("%-12s %10.3fs %14s   (single-threaded by design)\n", "train", train_time, "-");

    std::vector<std::uint32_t> predictions_serial;
    const double predict_serial = time_it([&] {
        predictions_serial = predict_documents(model, vectors_serial, ExecutionPolicy::Serial);
    });
    std::vector<std::uint32_t> predictions_parallel;
    const double predict_parallel = time_it([&] {
        predictions_parallel = predict_documents(model, vectors_parallel, ExecutionPolicy::Parallel);
    });
    print_row("predict", predict_serial, predict_parallel,
              predictions_serial == predictions_parallel);
    return 0;
}
