#include "quditml/metrics.hpp"

#include "quditml/errors.hpp"

#include <cstdio>
#include <sstream>

namespace quditml {

long long ConfusionMatrix::total() const {
    long long sum = 0;
    for (const auto& row : counts) {
        for (long long c : row) sum += c;
    }
    return sum;
}

long long ConfusionMatrix::row_sum(int true_class) const {
    long long sum = 0;
    for (long long c : counts[static_cast<std::size_t>(true_class)]) sum += c;
    return sum;
}

long long ConfusionMatrix::col_sum(int predicted_class) const {
    long long sum = 0;
    for (const auto& row : counts) sum += row[static_cast<std::size_t>(predicted_class)];
    return sum;
}

int predict_class(const RVector& probs) {
    int best = 0;
    for (Eigen::Index k = 1; k < probs.size(); ++k) {
        if (probs[k] > probs[best]) best = static_cast<int>(k);
    }
    return best;
}

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels) {
    if (predictions.size() != labels.size()) {
        throw ShapeError("confusion: " + std::to_string(predictions.size()) +
                         " predictions vs " + std::to_string(labels.size()) + " labels");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 8 || predictions[i] < 0 || predictions[i] > 8) {
            throw InvalidInput("confusion: class index outside 0..8 at sample " +
                               std::to_string(i));
        }
        cm.counts[static_cast<std::size_t>(labels[i])]
                 [static_cast<std::size_t>(predictions[i])]++;
    }
    return cm;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
    const long long total = cm.total();
    if (total <= 0) {
        throw InvalidInput("compute_metrics: empty confusion matrix");
    }
    MetricsReport report;
    long long diagonal = 0;
    for (int c = 0; c < 9; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        const long long tp = cm.counts[uc][uc];
        const long long col = cm.col_sum(c);
        const long long row = cm.row_sum(c);
        diagonal += tp;
        report.support[uc] = row;
        report.precision[uc] = col > 0 ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
        report.recall[uc] = row > 0 ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
        const double pr_sum = report.precision[uc] + report.recall[uc];
        report.f1[uc] = pr_sum > 0.0
                            ? 2.0 * report.precision[uc] * report.recall[uc] / pr_sum
                            : 0.0;
        report.macro_precision += report.precision[uc];
        report.macro_recall += report.recall[uc];
        report.macro_f1 += report.f1[uc];
    }
    report.macro_precision /= 9.0;
    report.macro_recall /= 9.0;
    report.macro_f1 /= 9.0;
    report.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
    return report;
}

namespace {

std::string fixed2(double value) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

} // namespace

std::string format_metrics_table(const MetricsReport& report, bool color) {
    const char* bold = color ? "\x1b[1m" : "";
    const char* reset = color ? "\x1b[0m" : "";
    std::ostringstream out;
    out << bold << "Class      Precision  Recall  F1-Score   # Data" << reset << "\n";
    for (int c = 0; c < 9; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        char line[96];
        std::snprintf(line, sizeof(line), "%-10d %9.2f %7.2f %9.2f %8lld", c,
                      report.precision[uc], report.recall[uc], report.f1[uc],
                      report.support[uc]);
        out << line << "\n";
    }
    out << "\n";
    out << "Accuracy        " << fixed2(report.accuracy) << "\n";
    out << "Macro Average   " << fixed2(report.macro_precision) << "    "
        << fixed2(report.macro_recall) << "    " << fixed2(report.macro_f1) << "\n";
    return out.str();
}

std::string format_metrics_kv(const MetricsReport& report) {
    std::ostringstream out;
    char buf[64];
    for (int c = 0; c < 9; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        std::snprintf(buf, sizeof(buf), "precision_%d %.17g", c, report.precision[uc]);
        out << buf << "\n";
        std::snprintf(buf, sizeof(buf), "recall_%d %.17g", c, report.recall[uc]);
        out << buf << "\n";
        std::snprintf(buf, sizeof(buf), "f1_%d %.17g", c, report.f1[uc]);
        out << buf << "\n";
        std::snprintf(buf, sizeof(buf), "support_%d %lld", c, report.support[uc]);
        out << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "accuracy %.17g", report.accuracy);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf), "macro_precision %.17g", report.macro_precision);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf), "macro_recall %.17g", report.macro_recall);
    out << buf << "\n";
    std::snprintf(buf, sizeof(buf), "macro_f1 %.17g", report.macro_f1);
    out << buf << "\n";
    return out.str();
}

MetricsReport parse_metrics_kv(const std::string& text) {
    MetricsReport report;
    std::istringstream in(text);
    std::string key;
    while (in >> key) {
        double value = 0.0;
        if (!(in >> value)) {
            throw ParseError("metrics kv: missing value for key '" + key + "'");
        }
        if (key.rfind("precision_", 0) == 0) {
            report.precision[static_cast<std::size_t>(key.back() - '0')] = value;
        } else if (key.rfind("recall_", 0) == 0) {
            report.recall[static_cast<std::size_t>(key.back() - '0')] = value;
        } else if (key.rfind("f1_", 0) == 0) {
            report.f1[static_cast<std::size_t>(key.back() - '0')] = value;
        } else if (key.rfind("support_", 0) == 0) {
            report.support[static_cast<std::size_t>(key.back() - '0')] =
                static_cast<long long>(value);
        } else if (key == "accuracy") {
            report.accuracy = value;
        } else if (key == "macro_precision") {
            report.macro_precision = value;
        } else if (key == "macro_recall") {
            report.macro_recall = value;
        } else if (key == "macro_f1") {
            report.macro_f1 = value;
        } else {
            throw ParseError("metrics kv: unknown key '" + key + "'");
        }
    }
    return report;
}

} // namespace quditml
