#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace oniontext {

struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

    std::size_t num_classes() const { return counts.size(); }
    std::size_t total() const;
    std::size_t trace() const;
};

ConfusionMatrix confusion_matrix(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                                 std::size_t num_classes,
                                 std::vector<std::string> class_names = {});

struct PerClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

// Macro fields are unweighted means over all classes with undefined
// per-class values counted as zero; the rendering states this.
struct EvaluationReport {
    double accuracy = 0.0;
    std::vector<PerClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    ConfusionMatrix confusion;
};

EvaluationReport compute_metrics(const ConfusionMatrix& cm);

struct ConfusionCell {
    std::size_t true_class = 0;
    std::size_t predicted_class = 0;
    std::size_t count = 0;

    bool operator==(const ConfusionCell&) const = default;
};

// The k largest off-diagonal cells, descending; ties broken by
// (row, column) index order.
std::vector<ConfusionCell> top_confusions(const ConfusionMatrix& cm, std::size_t k);

enum class ReportFormat { Table, Json };

std::string render_report(const EvaluationReport& report, ReportFormat format);

// Inverse of render_report(…, Json).
EvaluationReport parse_report(const std::string& json_text);

}  // namespace oniontext
