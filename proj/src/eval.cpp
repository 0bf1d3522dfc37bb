#include "oniontext/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "oniontext/error.hpp"

namespace oniontext {

namespace {

constexpr const char* kModule = "eval";

std::string percent(double ratio) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", ratio * 100.0);
    return buf;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace

std::size_t ConfusionMatrix::total() const {
    std::size_t sum = 0;
    for (const auto& row : counts) {
        for (std::size_t c : row) sum += c;
    }
    return sum;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t sum = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
    return sum;
}

ConfusionMatrix confusion_matrix(const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
                                 std::size_t num_classes, std::vector<std::string> class_names) {
    if (class_names.empty()) {
        for (std::size_t i = 0; i < num_classes; ++i) {
            class_names.push_back("class_" + std::to_string(i));
        }
    }
    if (class_names.size() != num_classes) {
        throw Error(kModule, "class name count does not match K");
    }
    ConfusionMatrix cm;
    cm.class_names = std::move(class_names);
    cm.counts.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
    for (const auto& [truth, predicted] : pairs) {
        if (truth >= num_classes || predicted >= num_classes) {
            throw Error(kModule, "class index out of range: (" + std::to_string(truth) + ", " +
                                     std::to_string(predicted) + ") with K=" +
                                     std::to_string(num_classes));
        }
        ++cm.counts[truth][predicted];
    }
    return cm;
}

EvaluationReport compute_metrics(const ConfusionMatrix& cm) {
    const std::size_t k = cm.num_classes();
    if (k == 0 || cm.total() == 0) {
        throw Error(kModule, "cannot compute metrics on an empty confusion matrix");
    }

    EvaluationReport report;
    report.confusion = cm;
    report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(cm.total());

    for (std::size_t c = 0; c < k; ++c) {
        std::size_t row_sum = 0;
        std::size_t col_sum = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += cm.counts[c][j];
            col_sum += cm.counts[j][c];
        }
        PerClassMetrics m;
        m.label = cm.class_names[c];
        m.support = row_sum;
        const double tp = static_cast<double>(cm.counts[c][c]);
        m.precision = col_sum > 0 ? tp / static_cast<double>(col_sum) : 0.0;
        m.recall = row_sum > 0 ? tp / static_cast<double>(row_sum) : 0.0;
        m.f1 = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
        report.per_class.push_back(std::move(m));
    }
    report.macro_precision /= static_cast<double>(k);
    report.macro_recall /= static_cast<double>(k);
    report.macro_f1 /= static_cast<double>(k);
    return report;
}

std::vector<ConfusionCell> top_confusions(const ConfusionMatrix& cm, std::size_t k) {
    std::vector<ConfusionCell> cells;
    for (std::size_t t = 0; t < cm.num_classes(); ++t) {
        for (std::size_t p = 0; p < cm.num_classes(); ++p) {
            if (t == p || cm.counts[t][p] == 0) continue;
            cells.push_back({t, p, cm.counts[t][p]});
        }
    }
    std::stable_sort(cells.begin(), cells.end(), [](const ConfusionCell& a, const ConfusionCell& b) {
        if (a.count != b.count) return a.count > b.count;
        if (a.true_class != b.true_class) return a.true_class < b.true_class;
        return a.predicted_class < b.predicted_class;
    });
    if (cells.size() > k) cells.resize(k);
    return cells;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        nlohmann::ordered_json j;
        j["accuracy"] = report.accuracy;
        j["averaging"] = "macro";
        j["macro_precision"] = report.macro_precision;
        j["macro_recall"] = report.macro_recall;
        j["macro_f1"] = report.macro_f1;
        j["per_class"] = nlohmann::ordered_json::array();
        for (const auto& m : report.per_class) {
            j["per_class"].push_back({{"label", m.label},
                                      {"precision", m.precision},
                                      {"recall", m.recall},
                                      {"f1", m.f1},
                                      {"support", m.support}});
        }
        j["confusion"]["class_names"] = report.confusion.class_names;
        j["confusion"]["counts"] = report.confusion.counts;
        return j.dump(2) + "\n";
    }

    std::ostringstream out;
    out << "Evaluation report (macro averages over all classes)\n\n";
    out << "Accuracy   Precision   Recall   F1 score\n";
    out << percent(report.accuracy) << "     " << fixed2(report.macro_precision) << "        "
        << fixed2(report.macro_recall) << "     " << fixed2(report.macro_f1) << "\n\n";

    std::size_t width = 5;
    for (const auto& m : report.per_class) width = std::max(width, m.label.size());
    out << "Class";
    out << std::string(width - 5 + 3, ' ');
    out << "Precision   Recall   F1       Support\n";
    for (const auto& m : report.per_class) {
        out << m.label << std::string(width - m.label.size() + 3, ' ');
        out << fixed4(m.precision) << "      " << fixed4(m.recall) << "   " << fixed4(m.f1)
            << "   " << m.support << "\n";
    }

    auto worst = top_confusions(report.confusion, 5);
    if (!worst.empty()) {
        out << "\nTop confusions (true -> predicted):\n";
        for (const auto& cell : worst) {
            out << "  " << report.confusion.class_names[cell.true_class] << " -> "
                << report.confusion.class_names[cell.predicted_class] << ": " << cell.count
                << "\n";
        }
    }
    return out.str();
}

EvaluationReport parse_report(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(kModule, std::string("invalid report JSON: ") + e.what());
    }
    EvaluationReport report;
    try {
        report.accuracy = j.at("accuracy").get<double>();
        report.macro_precision = j.at("macro_precision").get<double>();
        report.macro_recall = j.at("macro_recall").get<double>();
        report.macro_f1 = j.at("macro_f1").get<double>();
        for (const auto& entry : j.at("per_class")) {
            PerClassMetrics m;
            m.label = entry.at("label").get<std::string>();
            m.precision = entry.at("precision").get<double>();
            m.recall = entry.at("recall").get<double>();
            m.f1 = entry.at("f1").get<double>();
            m.support = entry.at("support").get<std::size_t>();
            report.per_class.push_back(std::move(m));
        }
        report.confusion.class_names =
            j.at("confusion").at("class_names").get<std::vector<std::string>>();
        report.confusion.counts =
            j.at("confusion").at("counts").get<std::vector<std::vector<std::size_t>>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(kModule, std::string("report JSON missing field: ") + e.what());
    }
    return report;
}

}  // namespace oniontext
