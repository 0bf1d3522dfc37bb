#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oniontext/corpus.hpp"
#include "oniontext/error.hpp"
#include "oniontext/eval.hpp"
#include "oniontext/extract.hpp"
#include "oniontext/features.hpp"
#include "oniontext/fixtures.hpp"
#include "oniontext/model.hpp"
#include "oniontext/parallel.hpp"
#include "oniontext/preprocess.hpp"
#include "oniontext/rng.hpp"
#include "oniontext/taxonomy.hpp"
#include "oniontext/text_util.hpp"

namespace {

using namespace oniontext;

namespace fs = std::filesystem;

struct CommonPaths {
    std::string data_dir;

    fs::path taxonomy_dir() const { return resolve_data_dir(data_dir) / "taxonomy"; }
    fs::path preprocess_dir() const { return resolve_data_dir(data_dir) / "preprocess"; }
    fs::path default_selectors() const {
        return resolve_data_dir(data_dir) / "selectors" / "marketplaces.jsonl";
    }
};

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cli", "cannot write file: " + path.string());
    out << content;
    if (!out) throw Error("cli", "write failed: " + path.string());
}

ExecutionPolicy policy_from(bool serial) {
    return serial ? ExecutionPolicy::Serial : ExecutionPolicy::Parallel;
}

// --- subcommand option blocks -------------------------------------------

struct GenFixturesOpts {
    CommonPaths paths;
    std::string classes = "main";
    std::uint32_t per_class = 100;
    std::uint64_t seed = 0;
    double separation = 0.9;
    std::uint32_t keyword_pool = 25;
    std::uint32_t noise_words = 200;
    std::string output;
};

void run_gen_fixtures(const GenFixturesOpts& opt) {
    Taxonomy taxonomy = Taxonomy::load(opt.paths.taxonomy_dir());
    GeneratorSpec spec;
    spec.seed = opt.seed;
    spec.docs_per_class = opt.per_class;
    spec.classes = task_from_string(opt.classes);
    spec.keyword_pool_size = opt.keyword_pool;
    spec.shared_noise_words = opt.noise_words;
    spec.separation = opt.separation;
    auto docs = generate_corpus(spec, taxonomy);
    write_corpus(docs, opt.output);
    std::cout << "wrote " << docs.size() << " documents to " << opt.output << "\n";
}

struct ValidateOpts {
    CommonPaths paths;
};

int run_validate_taxonomy(const ValidateOpts& opt) {
    Taxonomy taxonomy = Taxonomy::load(opt.paths.taxonomy_dir());
    ValidationReport report = taxonomy.validate();

    std::set<std::string> agora_targets;
    for (const auto& row : taxonomy.agora_rows()) agora_targets.insert(row.new_main_class);
    std::cout << "main classes: " << taxonomy.main_classes().size() << "\n";
    std::cout << "drug sub-class rows: " << taxonomy.drug_subclass_rows().size() << " ("
              << taxonomy.distinct_drug_subclasses().size() << " distinct)\n";
    std::cout << "duta_map rows: " << taxonomy.duta_rows().size() << "\n";
    std::cout << "agora_map rows: " << taxonomy.agora_rows().size() << " -> "
              << agora_targets.size() << " main classes\n";

    if (!report.ok()) {
        for (const auto& violation : report.violations) {
            std::cout << "violation: " << violation << "\n";
        }
        std::cout << "taxonomy INVALID (" << report.violations.size() << " violations)\n";
        return 1;
    }
    std::cout << "taxonomy OK\n";
    return 0;
}

struct IngestOpts {
    std::string manifest;
    std::string output;
};

void run_ingest(const IngestOpts& opt) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(opt.manifest));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("cli", "manifest " + opt.manifest + ": " + e.what());
    }
    const nlohmann::json& sources =
        manifest.is_array() ? manifest : manifest.at("sources");

    std::vector<std::pair<SourceTag, std::vector<Document>>> batches;
    for (const auto& entry : sources) {
        SourceTag tag;
        tag.name = source_name_from_string(entry.at("name").get<std::string>());
        tag.mode = source_mode_from_string(entry.at("mode").get<std::string>());
        const fs::path path = entry.at("path").get<std::string>();
        std::optional<std::string> label;
        if (entry.contains("label") && entry["label"].is_string()) {
            label = entry["label"].get<std::string>();
        }

        std::vector<Document> docs;
        if (fs::is_directory(path)) {
            std::vector<fs::path> files;
            for (const auto& item : fs::directory_iterator(path)) {
                if (!item.is_regular_file()) continue;
                auto ext = item.path().extension().string();
                if (ext == ".html" || ext == ".htm") files.push_back(item.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& file : files) {
                Document doc;
                doc.id = std::string(to_string(tag.name)) + "/" + file.filename().string();
                doc.raw_html = read_file(file);
                doc.main_label = label;
                docs.push_back(std::move(doc));
            }
        } else {
            docs = load_corpus(path);
            if (label) {
                for (auto& doc : docs) doc.main_label = label;
            }
        }
        batches.emplace_back(tag, std::move(docs));
    }

    auto [fused, stats] = fuse_sources(std::move(batches));
    write_corpus(fused, opt.output);
    std::cout << "fused " << stats.total << " documents from " << stats.per_source_counts.size()
              << " sources into " << opt.output << "\n";
    for (const auto& [source, count] : stats.per_source_counts) {
        std::cout << "  " << source << ": " << count << "\n";
    }
}

struct ExtractOpts {
    CommonPaths paths;
    std::string corpus;
    std::string selectors;
    std::string output;
    bool serial = false;
};

void run_extract(const ExtractOpts& opt) {
    auto docs = load_corpus(opt.corpus);
    const fs::path selector_path =
        opt.selectors.empty() ? opt.paths.default_selectors() : fs::path(opt.selectors);
    auto configs = load_selector_configs(selector_path);
    docs = extract_documents(std::move(docs), configs, policy_from(opt.serial));
    std::size_t skipped = 0;
    for (const auto& doc : docs) skipped += doc.skipped ? 1 : 0;
    write_corpus(docs, opt.output);
    std::cout << "extracted " << (docs.size() - skipped) << " documents (" << skipped
              << " skipped) into " << opt.output << "\n";
}

struct PreprocessOpts {
    CommonPaths paths;
    std::string corpus;
    std::string output;
    bool serial = false;
};

void run_preprocess(const PreprocessOpts& opt) {
    auto docs = load_corpus(opt.corpus);
    auto res = PreprocessResources::load(opt.paths.preprocess_dir());
    docs = preprocess_documents(std::move(docs), res, policy_from(opt.serial));
    write_corpus(docs, opt.output);
    std::cout << "preprocessed " << docs.size() << " documents into " << opt.output << "\n";
}

struct TrainOpts {
    CommonPaths paths;
    std::string corpus;
    std::string task = "main";
    double test_fraction = 0.1;
    double val_fraction = 0.1;
    std::uint32_t epochs = 5;
    std::uint32_t batch_size = 32;
    double learning_rate = 1e-3;
    double l2_penalty = 1e-4;
    std::uint32_t min_df = 2;
    std::uint64_t seed = 0;
    std::string output;
    std::string test_out;
};

// Documents that enter supervised stages: skipped pages are excluded,
// unlabeled or unknown-label documents are rejected.
std::uint32_t class_index_for(const Document& doc, Task task, const Taxonomy& taxonomy) {
    if (task == Task::Main) {
        if (!doc.main_label) {
            throw Error("cli", "document " + doc.id + " has no main_label");
        }
        auto index = taxonomy.main_class_index(*doc.main_label);
        if (!index) {
            throw Error("cli", "document " + doc.id + ": label " + *doc.main_label +
                                   " is not a taxonomy main class");
        }
        return static_cast<std::uint32_t>(*index);
    }
    if (!doc.drug_sublabel) {
        throw Error("cli", "document " + doc.id + " has no drug_sublabel");
    }
    auto index = taxonomy.drug_subclass_index(*doc.drug_sublabel);
    if (!index) {
        throw Error("cli", "document " + doc.id + ": sub-label " + *doc.drug_sublabel +
                               " is not a taxonomy drug sub-class");
    }
    return static_cast<std::uint32_t>(*index);
}

std::vector<std::vector<std::string>> tokens_of(const std::vector<Document>& docs) {
    std::vector<std::vector<std::string>> out;
    out.reserve(docs.size());
    for (const auto& doc : docs) {
        if (!doc.tokens) {
            throw Error("cli", "document " + doc.id +
                                   " has no tokens; run the preprocess stage first");
        }
        out.push_back(*doc.tokens);
    }
    return out;
}

void run_train(const TrainOpts& opt) {
    Taxonomy taxonomy = Taxonomy::load(opt.paths.taxonomy_dir());
    const Task task = task_from_string(opt.task);
    const StratifyBy stratify_key =
        task == Task::Main ? StratifyBy::MainLabel : StratifyBy::DrugSublabel;

    auto all_docs = load_corpus(opt.corpus);
    std::vector<Document> docs;
    for (auto& doc : all_docs) {
        if (!doc.skipped) docs.push_back(std::move(doc));
    }
    if (docs.empty()) throw Error("cli", "no trainable documents in " + opt.corpus);

    std::vector<Document> test_docs;
    if (opt.test_fraction > 0.0) {
        auto [rest, test] = stratified_split(docs, opt.test_fraction, opt.seed, stratify_key);
        docs = std::move(rest);
        test_docs = std::move(test);
    }
    std::vector<Document> val_docs;
    if (opt.val_fraction > 0.0) {
        const double of_rest = opt.val_fraction / (1.0 - opt.test_fraction);
        auto [rest, val] = stratified_split(docs, of_rest, mix_seed(opt.seed, 1), stratify_key);
        docs = std::move(rest);
        val_docs = std::move(val);
    }

    const auto class_names = task == Task::Main ? taxonomy.main_classes()
                                                : taxonomy.distinct_drug_subclasses();
    Vocabulary vocab = fit_vocabulary(tokens_of(docs), opt.min_df);

    auto featurize = [&](const std::vector<Document>& subset) {
        LabeledFeatures features;
        auto vectors = transform_documents(tokens_of(subset), vocab, ExecutionPolicy::Parallel);
        features.reserve(subset.size());
        for (std::size_t i = 0; i < subset.size(); ++i) {
            features.emplace_back(std::move(vectors[i]),
                                  class_index_for(subset[i], task, taxonomy));
        }
        return features;
    };

    LabeledFeatures train_features = featurize(docs);
    LabeledFeatures val_features = featurize(val_docs);

    TrainingConfig config;
    config.epochs = opt.epochs;
    config.batch_size = opt.batch_size;
    config.learning_rate = opt.learning_rate;
    config.l2_penalty = opt.l2_penalty;
    config.seed = opt.seed;

    auto [model, trace] = train(train_features, task, class_names, std::move(vocab), config,
                                val_features.empty() ? nullptr : &val_features);

    for (std::size_t epoch = 0; epoch < trace.train_loss.size(); ++epoch) {
        std::cout << "epoch " << (epoch + 1) << "/" << trace.train_loss.size() << "  train_loss "
                  << trace.train_loss[epoch];
        if (epoch < trace.validation_loss.size()) {
            std::cout << "  val_loss " << trace.validation_loss[epoch] << "  val_acc "
                      << trace.validation_accuracy[epoch];
        }
        std::cout << "\n";
    }

    save_model(model, opt.output);
    std::cout << "saved " << to_string(task) << " model (" << model.num_classes() << " classes, "
              << model.vocabulary.size() << " terms) to " << opt.output << "\n";
    if (!opt.test_out.empty()) {
        write_corpus(test_docs, opt.test_out);
        std::cout << "wrote " << test_docs.size() << " held-out documents to " << opt.test_out
                  << "\n";
    }
}

struct EvaluateOpts {
    CommonPaths paths;
    std::string corpus;
    std::string model_path;
    double test_fraction = 0.0;  // 0 = evaluate the whole corpus
    std::uint64_t seed = 0;
    std::string output;
    std::string format = "table";
};

void run_evaluate(const EvaluateOpts& opt) {
    ClassifierModel model = load_model(opt.model_path);
    const StratifyBy stratify_key =
        model.task == Task::Main ? StratifyBy::MainLabel : StratifyBy::DrugSublabel;

    auto all_docs = load_corpus(opt.corpus);
    std::vector<Document> docs;
    for (auto& doc : all_docs) {
        if (!doc.skipped) docs.push_back(std::move(doc));
    }
    if (opt.test_fraction > 0.0) {
        auto [rest, test] = stratified_split(docs, opt.test_fraction, opt.seed, stratify_key);
        docs = std::move(test);
    }
    if (docs.empty()) throw Error("cli", "no documents to evaluate");

    std::unordered_map<std::string, std::uint32_t> class_index;
    for (std::size_t i = 0; i < model.class_names.size(); ++i) {
        class_index.emplace(model.class_names[i], static_cast<std::uint32_t>(i));
    }
    auto label_of = [&](const Document& doc) -> std::uint32_t {
        const auto& label = model.task == Task::Main ? doc.main_label : doc.drug_sublabel;
        if (!label) {
            throw Error("cli", "document " + doc.id + " carries no label for task " +
                                   to_string(model.task));
        }
        auto it = class_index.find(*label);
        if (it == class_index.end()) {
            throw Error("cli", "document " + doc.id + ": label " + *label +
                                   " is not among the model's classes (model/taxonomy mismatch)");
        }
        return it->second;
    };

    auto vectors =
        transform_documents(tokens_of(docs), model.vocabulary, ExecutionPolicy::Parallel);
    auto predictions = predict_documents(model, vectors, ExecutionPolicy::Parallel);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        pairs.emplace_back(label_of(docs[i]), predictions[i]);
    }
    ConfusionMatrix cm = confusion_matrix(pairs, model.num_classes(), model.class_names);
    EvaluationReport report = compute_metrics(cm);

    const ReportFormat format =
        opt.format == "json" ? ReportFormat::Json : ReportFormat::Table;
    const std::string rendered = render_report(report, format);
    if (opt.output.empty()) {
        std::cout << rendered;
    } else {
        write_text_file(opt.output, rendered);
        std::printf("accuracy %.2f%% on %zu documents; report written to %s\n",
                    report.accuracy * 100.0, docs.size(), opt.output.c_str());
    }
}

struct PredictOpts {
    CommonPaths paths;
    std::string model_path;
    std::string drugs_model_path;
    std::string input;
    std::string mode = "general";
    std::string marketplace = "Synthetic";
    std::string selectors;
};

void run_predict(const PredictOpts& opt) {
    ClassifierModel model = load_model(opt.model_path);
    auto res = PreprocessResources::load(opt.paths.preprocess_dir());

    const std::string content = read_file(opt.input);
    std::string text;
    const SourceMode mode = source_mode_from_string(opt.mode);
    switch (mode) {
        case SourceMode::General:
            text = extract_general(content).joined();
            break;
        case SourceMode::Marketplace: {
            const fs::path selector_path = opt.selectors.empty() ? opt.paths.default_selectors()
                                                                 : fs::path(opt.selectors);
            auto configs = load_selector_configs(selector_path);
            auto it = configs.find(opt.marketplace);
            if (it == configs.end()) {
                throw Error("cli", "no selector config registered for marketplace " +
                                       opt.marketplace);
            }
            auto result = extract_marketplace(content, it->second);
            if (!result) {
                throw Error("cli", "input page has no product description; skipped");
            }
            text = result->first + "\n" + result->second;
            break;
        }
        case SourceMode::Pretext:
            text = content;
            break;
    }

    const std::vector<std::string> tokens = preprocess(text, res);
    if (!opt.drugs_model_path.empty()) {
        ClassifierModel drugs_model = load_model(opt.drugs_model_path);
        TwoLevelPrediction prediction = classify_two_level(model, drugs_model, tokens);
        std::printf("%s\t%.6f", prediction.main_label.c_str(), prediction.main_confidence);
        if (prediction.drug_sublabel) {
            std::printf("\t%s\t%.6f", prediction.drug_sublabel->c_str(),
                        *prediction.drug_confidence);
        }
        std::printf("\n");
    } else {
        FeatureVector x = tfidf_transform(tokens, model.vocabulary);
        auto probs = predict_proba(model, x);
        const std::size_t best = argmax(probs);
        std::printf("%s\t%.6f\n", model.class_names[best].c_str(), probs[best]);
    }
}

struct ReportOpts {
    std::string input;
    std::string format = "table";
    std::string output;
};

void run_report(const ReportOpts& opt) {
    EvaluationReport report = parse_report(read_file(opt.input));
    const ReportFormat format =
        opt.format == "json" ? ReportFormat::Json : ReportFormat::Table;
    const std::string rendered = render_report(report, format);
    if (opt.output.empty()) {
        std::cout << rendered;
    } else {
        write_text_file(opt.output, rendered);
    }
}

void add_data_dir_option(CLI::App* cmd, CommonPaths& paths) {
    cmd->add_option("--data-dir", paths.data_dir,
                    "Resource-file root (default: $ONIONTEXT_DATA_DIR, then ./data)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oniontext: dark-web text classification pipeline"};
    app.require_subcommand(1);

    GenFixturesOpts gen_opts;
    auto* gen = app.add_subcommand("gen-fixtures", "Generate a synthetic labeled corpus");
    add_data_dir_option(gen, gen_opts.paths);
    gen->add_option("--classes", gen_opts.classes, "Class inventory to generate")
        ->check(CLI::IsMember({"main", "drugs"}));
    gen->add_option("--per-class", gen_opts.per_class, "Documents per class");
    gen->add_option("--seed", gen_opts.seed, "Generator seed");
    gen->add_option("--separation", gen_opts.separation,
                    "Fraction of tokens drawn from the class keyword pool")
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("--keyword-pool", gen_opts.keyword_pool, "Keywords per class");
    gen->add_option("--noise-words", gen_opts.noise_words, "Shared noise vocabulary size");
    gen->add_option("-o,--output", gen_opts.output, "Output corpus (JSON Lines)")->required();

    ValidateOpts validate_opts;
    auto* validate = app.add_subcommand("validate-taxonomy", "Check the shipped taxonomy tables");
    add_data_dir_option(validate, validate_opts.paths);

    IngestOpts ingest_opts;
    auto* ingest = app.add_subcommand("ingest", "Fuse sources listed in a manifest into one corpus");
    ingest->add_option("--manifest", ingest_opts.manifest, "Source manifest (JSON)")->required();
    ingest->add_option("-o,--output", ingest_opts.output, "Output corpus")->required();

    ExtractOpts extract_opts;
    auto* extract = app.add_subcommand("extract", "Extract classifiable text from raw documents");
    add_data_dir_option(extract, extract_opts.paths);
    extract->add_option("--corpus", extract_opts.corpus, "Input corpus")->required();
    extract->add_option("--selectors", extract_opts.selectors, "Marketplace selector config");
    extract->add_option("-o,--output", extract_opts.output, "Output corpus")->required();
    extract->add_flag("--serial", extract_opts.serial, "Disable the parallel worker pool");

    PreprocessOpts preprocess_opts;
    auto* prep = app.add_subcommand("preprocess", "Clean and tokenize extracted text");
    add_data_dir_option(prep, preprocess_opts.paths);
    prep->add_option("--corpus", preprocess_opts.corpus, "Input corpus")->required();
    prep->add_option("-o,--output", preprocess_opts.output, "Output corpus")->required();
    prep->add_flag("--serial", preprocess_opts.serial, "Disable the parallel worker pool");

    TrainOpts train_opts;
    auto* train_cmd = app.add_subcommand("train", "Train a classifier on a tokenized corpus");
    add_data_dir_option(train_cmd, train_opts.paths);
    train_cmd->add_option("--corpus", train_opts.corpus, "Input corpus")->required();
    train_cmd->add_option("--task", train_opts.task, "main or drugs")
        ->check(CLI::IsMember({"main", "drugs"}));
    train_cmd->add_option("--test-fraction", train_opts.test_fraction, "Held-out test fraction")
        ->check(CLI::Range(0.0, 0.9));
    train_cmd->add_option("--val-fraction", train_opts.val_fraction, "Validation fraction")
        ->check(CLI::Range(0.0, 0.9));
    train_cmd->add_option("--epochs", train_opts.epochs, "Training epochs");
    train_cmd->add_option("--batch-size", train_opts.batch_size, "Mini-batch size");
    train_cmd->add_option("--lr", train_opts.learning_rate, "Learning rate");
    train_cmd->add_option("--l2-penalty", train_opts.l2_penalty, "L2 regularization strength");
    train_cmd->add_option("--min-df", train_opts.min_df, "Minimum document frequency");
    train_cmd->add_option("--seed", train_opts.seed, "Shuffle/split seed");
    train_cmd->add_option("-o,--output", train_opts.output, "Output model file")->required();
    train_cmd->add_option("--test-out", train_opts.test_out, "Write the held-out test corpus here");

    EvaluateOpts eval_opts;
    auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model on a labeled corpus");
    add_data_dir_option(eval_cmd, eval_opts.paths);
    eval_cmd->add_option("--corpus", eval_opts.corpus, "Input corpus")->required();
    eval_cmd->add_option("--model", eval_opts.model_path, "Model file")->required();
    eval_cmd->add_option("--test-fraction", eval_opts.test_fraction,
                         "Re-derive the seeded split and evaluate its test side")
        ->check(CLI::Range(0.0, 0.9));
    eval_cmd->add_option("--seed", eval_opts.seed, "Split seed (with --test-fraction)");
    eval_cmd->add_option("-o,--output", eval_opts.output, "Write the report here");
    eval_cmd->add_option("--format", eval_opts.format, "Report format")
        ->check(CLI::IsMember({"table", "json"}));

    PredictOpts predict_opts;
    auto* predict = app.add_subcommand("predict", "Classify a single page or text file");
    add_data_dir_option(predict, predict_opts.paths);
    predict->add_option("--model", predict_opts.model_path, "Main model file")->required();
    predict->add_option("--drugs-model", predict_opts.drugs_model_path,
                        "Drug sub-class model for two-level routing");
    predict->add_option("--input", predict_opts.input, "Input file")->required();
    predict->add_option("--mode", predict_opts.mode, "Extraction mode")
        ->check(CLI::IsMember({"general", "marketplace", "pretext"}));
    predict->add_option("--marketplace", predict_opts.marketplace,
                        "Marketplace name for marketplace mode");
    predict->add_option("--selectors", predict_opts.selectors, "Marketplace selector config");

    ReportOpts report_opts;
    auto* report = app.add_subcommand("report", "Render a machine-readable evaluation report");
    report->add_option("--input", report_opts.input, "Report JSON file")->required();
    report->add_option("--format", report_opts.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}));
    report->add_option("-o,--output", report_opts.output, "Write rendered report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*gen) run_gen_fixtures(gen_opts);
        if (*validate) return run_validate_taxonomy(validate_opts);
        if (*ingest) run_ingest(ingest_opts);
        if (*extract) run_extract(extract_opts);
        if (*prep) run_preprocess(preprocess_opts);
        if (*train_cmd) run_train(train_opts);
        if (*eval_cmd) run_evaluate(eval_opts);
        if (*predict) run_predict(predict_opts);
        if (*report) run_report(report_opts);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
