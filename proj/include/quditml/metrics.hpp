// metrics.hpp — Confusion-matrix evaluation: per-class precision/recall/F1,
// accuracy, and unweighted macro averages.

#pragma once

#include "quditml/algebra.hpp"

#include <array>
#include <string>
#include <vector>

namespace quditml {

// counts(true_class, predicted_class).
struct ConfusionMatrix {
    std::array<std::array<long long, 9>, 9> counts{};

    long long total() const;
    long long row_sum(int true_class) const;
    long long col_sum(int predicted_class) const;
};

// argmax; ties broken by lowest index.
int predict_class(const RVector& probs);

ConfusionMatrix confusion(const std::vector<int>& predictions,
                          const std::vector<int>& labels);

struct MetricsReport {
    std::array<double, 9> precision{};
    std::array<double, 9> recall{};
    std::array<double, 9> f1{};
    std::array<long long, 9> support{};
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
};

// precision = diag/col-sum, recall = diag/row-sum (0 when the denominator
// vanishes), F1 the harmonic mean, macro rows unweighted means over classes.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

// Aligned plain-text table (per-class rows, then accuracy and macro average).
std::string format_metrics_table(const MetricsReport& report, bool color = false);

// One "key value" pair per line, for machine diffing.
std::string format_metrics_kv(const MetricsReport& report);
MetricsReport parse_metrics_kv(const std::string& text);

} // namespace quditml
