#include "oniontext/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "oniontext/error.hpp"
#include "oniontext/rng.hpp"
#include "oniontext/taxonomy.hpp"
#include "oniontext/text_util.hpp"

namespace oniontext {

namespace {

constexpr const char* kModule = "model";
constexpr const char* kMagic = "oniontext-model";
constexpr int kFormatVersion = 1;

std::vector<double> logits_for(std::span<const double> weights, std::size_t num_classes,
                               std::size_t dimension, const FeatureVector& x) {
    const std::size_t cols = dimension + 1;
    std::vector<double> logits(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k) {
        const double* row = weights.data() + k * cols;
        double z = row[dimension];  // bias
        for (const auto& [index, value] : x.entries) z += row[index] * value;
        logits[k] = z;
    }
    return logits;
}

void softmax_in_place(std::vector<double>& logits) {
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& z : logits) {
        z = std::exp(z - max_logit);
        sum += z;
    }
    for (double& z : logits) z /= sum;
}

// 17 significant digits, locale-independent, round-trips doubles exactly.
std::string format_weight(double w) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), w, std::chars_format::general, 17);
    return std::string(buf, end);
}

}  // namespace

const char* to_string(Task task) { return task == Task::Main ? "main" : "drugs"; }

Task task_from_string(const std::string& s) {
    if (s == "main") return Task::Main;
    if (s == "drugs") return Task::Drugs;
    throw Error(kModule, "unknown task: " + s + " (expected main|drugs)");
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

double loss_and_gradient(std::span<const double> weights, std::size_t num_classes,
                         std::size_t dimension, const LabeledFeatures& batch,
                         std::span<const std::size_t> batch_indices, double l2_penalty,
                         std::vector<double>& gradient_out) {
    const std::size_t cols = dimension + 1;
    gradient_out.assign(num_classes * cols, 0.0);

    double loss = 0.0;
    const double inv_batch = 1.0 / static_cast<double>(batch_indices.size());
    for (std::size_t idx : batch_indices) {
        const auto& [x, label] = batch[idx];
        std::vector<double> logits = logits_for(weights, num_classes, dimension, x);
        const double max_logit = *std::max_element(logits.begin(), logits.end());
        double sum = 0.0;
        for (double z : logits) sum += std::exp(z - max_logit);
        const double log_sum = max_logit + std::log(sum);
        loss += (log_sum - logits[label]) * inv_batch;

        for (std::size_t k = 0; k < num_classes; ++k) {
            const double p = std::exp(logits[k] - log_sum);
            const double delta = (p - (k == label ? 1.0 : 0.0)) * inv_batch;
            double* grad_row = gradient_out.data() + k * cols;
            for (const auto& [index, value] : x.entries) grad_row[index] += delta * value;
            grad_row[dimension] += delta;
        }
    }

    if (l2_penalty > 0.0) {
        double penalty = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            gradient_out[i] += l2_penalty * weights[i];
            penalty += weights[i] * weights[i];
        }
        loss += 0.5 * l2_penalty * penalty;
    }
    return loss;
}

std::pair<ClassifierModel, TrainingTrace> train(const LabeledFeatures& data, Task task,
                                                std::vector<std::string> class_names,
                                                Vocabulary vocabulary,
                                                const TrainingConfig& config,
                                                const LabeledFeatures* validation) {
    if (config.epochs < 1) throw Error(kModule, "epochs must be >= 1");
    if (config.batch_size < 1) throw Error(kModule, "batch_size must be >= 1");
    if (!(config.learning_rate > 0.0)) throw Error(kModule, "learning_rate must be > 0");
    if (data.empty()) throw Error(kModule, "no training data");

    const std::size_t num_classes = class_names.size();
    std::set<std::uint32_t> distinct_labels;
    for (const auto& [x, label] : data) {
        if (label >= num_classes) {
            throw Error(kModule, "class index " + std::to_string(label) + " out of range (K=" +
                                     std::to_string(num_classes) + ")");
        }
        distinct_labels.insert(label);
    }
    if (distinct_labels.size() < 2) {
        throw Error(kModule, "training data covers fewer than 2 distinct classes");
    }

    const std::size_t dimension = vocabulary.size();
    const std::size_t cols = dimension + 1;
    std::vector<double> weights(num_classes * cols, 0.0);
    std::vector<double> first_moment(weights.size(), 0.0);
    std::vector<double> second_moment(weights.size(), 0.0);
    std::vector<double> gradient;

    TrainingTrace trace;
    Rng rng(config.seed);
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    double beta1_t = 1.0;
    double beta2_t = 1.0;
    for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batch_count = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(order.size(), begin + config.batch_size);
            std::span<const std::size_t> batch_indices(order.data() + begin, end - begin);
            const double loss = loss_and_gradient(weights, num_classes, dimension, data,
                                                  batch_indices, config.l2_penalty, gradient);
            if (!std::isfinite(loss)) {
                throw Error(kModule, "loss is not finite at epoch " + std::to_string(epoch + 1) +
                                         ", batch " + std::to_string(batch_count + 1));
            }
            epoch_loss += loss;
            ++batch_count;

            beta1_t *= config.beta1;
            beta2_t *= config.beta2;
            const double bias1 = 1.0 - beta1_t;
            const double bias2 = 1.0 - beta2_t;
            for (std::size_t i = 0; i < weights.size(); ++i) {
                const double g = gradient[i];
                first_moment[i] = config.beta1 * first_moment[i] + (1.0 - config.beta1) * g;
                second_moment[i] = config.beta2 * second_moment[i] + (1.0 - config.beta2) * g * g;
                const double m_hat = first_moment[i] / bias1;
                const double v_hat = second_moment[i] / bias2;
                weights[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
            }
        }
        trace.train_loss.push_back(epoch_loss / static_cast<double>(batch_count));

        if (validation != nullptr && !validation->empty()) {
            double val_loss = 0.0;
            std::size_t correct = 0;
            for (const auto& [x, label] : *validation) {
                std::vector<double> logits = logits_for(weights, num_classes, dimension, x);
                const double max_logit = *std::max_element(logits.begin(), logits.end());
                double sum = 0.0;
                for (double z : logits) sum += std::exp(z - max_logit);
                val_loss += max_logit + std::log(sum) - logits[label];
                if (argmax(logits) == label) ++correct;
            }
            trace.validation_loss.push_back(val_loss / static_cast<double>(validation->size()));
            trace.validation_accuracy.push_back(static_cast<double>(correct) /
                                                static_cast<double>(validation->size()));
        }
    }

    ClassifierModel model;
    model.task = task;
    model.class_names = std::move(class_names);
    model.vocabulary = std::move(vocabulary);
    model.weights = std::move(weights);
    return {std::move(model), std::move(trace)};
}

std::vector<double> predict_proba(const ClassifierModel& model, const FeatureVector& x) {
    if (x.dimension != model.vocabulary.size()) {
        throw Error(kModule, "feature dimension " + std::to_string(x.dimension) +
                                 " does not match model vocabulary size " +
                                 std::to_string(model.vocabulary.size()));
    }
    std::vector<double> probs =
        logits_for(model.weights, model.num_classes(), model.vocabulary.size(), x);
    softmax_in_place(probs);
    return probs;
}

TwoLevelPrediction classify_two_level(const ClassifierModel& main_model,
                                      const ClassifierModel& drugs_model,
                                      const std::vector<std::string>& tokens) {
    TwoLevelPrediction result;
    const FeatureVector main_x = tfidf_transform(tokens, main_model.vocabulary);
    std::vector<double> main_probs = predict_proba(main_model, main_x);
    const std::size_t main_idx = argmax(main_probs);
    result.main_label = main_model.class_names[main_idx];
    result.main_confidence = main_probs[main_idx];

    if (result.main_label == kDrugsClass) {
        const FeatureVector drugs_x = tfidf_transform(tokens, drugs_model.vocabulary);
        std::vector<double> drug_probs = predict_proba(drugs_model, drugs_x);
        const std::size_t drug_idx = argmax(drug_probs);
        result.drug_sublabel = drugs_model.class_names[drug_idx];
        result.drug_confidence = drug_probs[drug_idx];
    }
    return result;
}

TwoLevelPrediction classify_two_level(const ClassifierModel& main_model,
                                      const ClassifierModel& drugs_model, const FeatureVector& x) {
    if (main_model.vocabulary.size() != drugs_model.vocabulary.size()) {
        throw Error(kModule, "models do not share a vocabulary; classify token sequences instead");
    }
    TwoLevelPrediction result;
    std::vector<double> main_probs = predict_proba(main_model, x);
    const std::size_t main_idx = argmax(main_probs);
    result.main_label = main_model.class_names[main_idx];
    result.main_confidence = main_probs[main_idx];
    if (result.main_label == kDrugsClass) {
        std::vector<double> drug_probs = predict_proba(drugs_model, x);
        const std::size_t drug_idx = argmax(drug_probs);
        result.drug_sublabel = drugs_model.class_names[drug_idx];
        result.drug_confidence = drug_probs[drug_idx];
    }
    return result;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(kModule, "cannot write model file: " + path.string());

    out << kMagic << ' ' << kFormatVersion << '\n';
    out << "task " << to_string(model.task) << '\n';
    out << "classes " << model.num_classes() << '\n';
    out << "vocabulary " << model.vocabulary.size() << '\n';

    out << "[classes]\n";
    for (const auto& name : model.class_names) out << name << '\n';

    out << "[vocabulary]\n";
    out << "n_documents_fitted " << model.vocabulary.n_documents_fitted << '\n';
    out << "min_df " << model.vocabulary.min_df << '\n';
    for (std::size_t i = 0; i < model.vocabulary.size(); ++i) {
        const std::string& term = model.vocabulary.terms[i];
        if (term.empty() || term.find_first_of("\t\n\r") != std::string::npos) {
            throw Error(kModule, "vocabulary term not serializable: \"" + term + "\"");
        }
        out << term << '\t' << i << '\t' << model.vocabulary.document_frequency[i] << '\n';
    }

    out << "[weights]\n";
    const std::size_t cols = model.weight_cols();
    for (std::size_t k = 0; k < model.num_classes(); ++k) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (j > 0) out << ' ';
            out << format_weight(model.weights[k * cols + j]);
        }
        out << '\n';
    }
    if (!out) throw Error(kModule, "write failed: " + path.string());
}

namespace {

std::string next_line(std::istream& in, const char* field) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(kModule, std::string("model file truncated at ") + field);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::uint64_t parse_count(const std::string& text, const char* field) {
    try {
        std::size_t consumed = 0;
        const std::uint64_t value = std::stoull(text, &consumed);
        if (consumed != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw Error(kModule, std::string("model file: invalid ") + field + ": " + text);
    }
}

std::string expect_keyword_line(std::istream& in, const char* keyword) {
    std::string line = next_line(in, keyword);
    const std::string prefix = std::string(keyword) + " ";
    if (line.rfind(prefix, 0) != 0) {
        throw Error(kModule, std::string("model file: expected ") + keyword + " line, found: " + line);
    }
    return line.substr(prefix.size());
}

}  // namespace

ClassifierModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(kModule, "cannot open model file: " + path.string());

    const std::string header = next_line(in, "header");
    std::istringstream hs(header);
    std::string magic;
    int version = 0;
    hs >> magic >> version;
    if (magic != kMagic) {
        throw Error(kModule, "model file: bad magic header: " + magic);
    }
    if (version != kFormatVersion) {
        throw Error(kModule, "model file: unsupported format_version " + std::to_string(version));
    }

    ClassifierModel model;
    model.task = task_from_string(expect_keyword_line(in, "task"));
    const auto num_classes = parse_count(expect_keyword_line(in, "classes"), "classes");
    const auto vocab_size = parse_count(expect_keyword_line(in, "vocabulary"), "vocabulary");

    if (next_line(in, "[classes]") != "[classes]") {
        throw Error(kModule, "model file: missing [classes] section");
    }
    for (std::uint64_t i = 0; i < num_classes; ++i) {
        std::string name = next_line(in, "class name");
        if (name.empty()) throw Error(kModule, "model file: empty class name");
        model.class_names.push_back(std::move(name));
    }

    if (next_line(in, "[vocabulary]") != "[vocabulary]") {
        throw Error(kModule, "model file: missing [vocabulary] section");
    }
    model.vocabulary.n_documents_fitted = static_cast<std::uint32_t>(
        parse_count(expect_keyword_line(in, "n_documents_fitted"), "n_documents_fitted"));
    model.vocabulary.min_df =
        static_cast<std::uint32_t>(parse_count(expect_keyword_line(in, "min_df"), "min_df"));
    for (std::uint64_t i = 0; i < vocab_size; ++i) {
        std::string line = next_line(in, "vocabulary term");
        auto cells = split(line, '\t');
        if (cells.size() != 3) {
            throw Error(kModule, "model file: malformed vocabulary row: " + line);
        }
        const auto index = parse_count(cells[1], "term index");
        if (index != i) {
            throw Error(kModule, "model file: vocabulary index out of order at " + cells[0]);
        }
        model.vocabulary.term_to_index.emplace(cells[0],
                                               static_cast<std::uint32_t>(model.vocabulary.terms.size()));
        model.vocabulary.terms.push_back(cells[0]);
        model.vocabulary.document_frequency.push_back(
            static_cast<std::uint32_t>(parse_count(cells[2], "document_frequency")));
    }

    if (next_line(in, "[weights]") != "[weights]") {
        throw Error(kModule, "model file: missing [weights] section");
    }
    const std::size_t cols = vocab_size + 1;
    model.weights.reserve(num_classes * cols);
    for (std::uint64_t k = 0; k < num_classes; ++k) {
        const std::string row = next_line(in, "weights row");
        const char* cursor = row.data();
        const char* row_end = row.data() + row.size();
        for (std::size_t j = 0; j < cols; ++j) {
            while (cursor < row_end && *cursor == ' ') ++cursor;
            double w = 0.0;
            auto [next, ec] = std::from_chars(cursor, row_end, w);
            if (ec != std::errc{} || next == cursor) {
                throw Error(kModule,
                            "model file: truncated weights row " + std::to_string(k + 1));
            }
            cursor = next;
            model.weights.push_back(w);
        }
        while (cursor < row_end && *cursor == ' ') ++cursor;
        if (cursor != row_end) {
            throw Error(kModule, "model file: weights row " + std::to_string(k + 1) +
                                     " has too many columns");
        }
    }
    return model;
}

}  // namespace oniontext
