#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "oniontext/features.hpp"

namespace oniontext {

enum class Task { Main, Drugs };

const char* to_string(Task task);
Task task_from_string(const std::string& s);

struct TrainingConfig {
    std::uint32_t epochs = 5;
    std::uint32_t batch_size = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double l2_penalty = 1e-4;
    std::uint64_t seed = 0;
};

// Multinomial logistic model: weights is K x (V+1) row-major with the
// bias in the last column. Immutable once trained; inference is safe
// under concurrent readers.
struct ClassifierModel {
    Task task = Task::Main;
    std::vector<std::string> class_names;
    Vocabulary vocabulary;
    std::vector<double> weights;

    std::size_t num_classes() const { return class_names.size(); }
    std::size_t weight_cols() const { return vocabulary.size() + 1; }
};

struct TrainingTrace {
    std::vector<double> train_loss;           // mean batch loss per epoch
    std::vector<double> validation_loss;      // empty without validation data
    std::vector<double> validation_accuracy;
};

using LabeledFeatures = std::vector<std::pair<FeatureVector, std::uint32_t>>;

// Minimizes mean categorical cross-entropy plus (l2_penalty/2)*||W||^2
// with mini-batch adaptive-moment updates. Shuffling is seeded, training
// is single-threaded, and results are deterministic per seed.
std::pair<ClassifierModel, TrainingTrace> train(const LabeledFeatures& data, Task task,
                                                std::vector<std::string> class_names,
                                                Vocabulary vocabulary,
                                                const TrainingConfig& config,
                                                const LabeledFeatures* validation = nullptr);

// softmax(W x~) with the bias coordinate appended; entries are positive
// and sum to one.
std::vector<double> predict_proba(const ClassifierModel& model, const FeatureVector& x);

// Lowest index wins ties.
std::size_t argmax(std::span<const double> values);

struct TwoLevelPrediction {
    std::string main_label;
    double main_confidence = 0.0;
    std::optional<std::string> drug_sublabel;
    std::optional<double> drug_confidence;
};

// The sub-class model runs only when the main model says Drugs; each
// model transforms the token sequence with its own vocabulary.
TwoLevelPrediction classify_two_level(const ClassifierModel& main_model,
                                      const ClassifierModel& drugs_model,
                                      const std::vector<std::string>& tokens);

// Shared-vocabulary variant operating on one feature vector.
TwoLevelPrediction classify_two_level(const ClassifierModel& main_model,
                                      const ClassifierModel& drugs_model, const FeatureVector& x);

void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

// Mean regularized cross-entropy over a batch and its gradient with
// respect to the weights. Exposed so the gradient can be checked against
// finite differences.
double loss_and_gradient(std::span<const double> weights, std::size_t num_classes,
                         std::size_t dimension, const LabeledFeatures& batch,
                         std::span<const std::size_t> batch_indices, double l2_penalty,
                         std::vector<double>& gradient_out);

}  // namespace oniontext
