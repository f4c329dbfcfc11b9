// dataset.hpp — Raw-series windowing, the 5-statistic feature extractor,
// CSV ingestion, the bundled synthetic generator, and stratified splitting.

#pragma once

#include "quditml/algebra.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace quditml {

inline constexpr int kFeatureCount = 5;
inline constexpr int kDefaultWindow = 10;

// One step of a QBER/SKR time series with its class label.
struct TimeSeriesRecord {
    long long step = 0;
    double qber = 0.0;  // fraction in [0, 1]
    double skr = 0.0;   // bits/s, >= 0
    int label = 0;      // 0..8
};

struct WindowedSample {
    std::vector<double> qber;
    std::vector<double> skr;
    int label = 0;
};

struct FeatureRow {
    RVector features;   // length kFeatureCount
    int label = 0;
};

enum class Split { Full, Train, Test };

struct LabeledDataset {
    std::vector<FeatureRow> rows;
    Split split = Split::Full;

    int size() const { return static_cast<int>(rows.size()); }
    std::array<int, 9> class_counts() const;
    // Rows stacked as a size x K matrix plus the label column.
    RMatrix feature_matrix() const;
    std::vector<int> labels() const;
};

// Sliding windows of length `window` with the given stride, restricted to
// contiguous same-label segments. Segments shorter than the window are
// skipped and counted.
struct WindowingResult {
    std::vector<WindowedSample> windows;
    int skipped_segments = 0;
};

WindowingResult window_series(const std::vector<TimeSeriesRecord>& records,
                              int window, int stride = 1);

// (mean qber, std qber, mean skr, std skr, least-squares slope of qber).
// Standard deviations are population (divide by N).
FeatureRow extract_features(const WindowedSample& sample);

// Feature CSV: header "f1,f2,f3,f4,f5,label". Malformed rows are rejected
// with file/line/column context.
LabeledDataset load_feature_csv(const std::filesystem::path& path);
void write_feature_csv(const std::filesystem::path& path, const LabeledDataset& dataset);

// Raw series CSV: header "step,qber,skr,label".
std::vector<TimeSeriesRecord> load_series_csv(const std::filesystem::path& path);
void write_series_csv(const std::filesystem::path& path,
                      const std::vector<TimeSeriesRecord>& records);

// Nine Gaussian class clusters in 5-dimensional feature space, partially
// overlapping, deterministic per seed. Rows come out grouped by class.
LabeledDataset synthesize_dataset(std::uint64_t seed, int rows_per_class);

// Seeded stratified split; `fraction` of each class goes to train.
std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double fraction,
                                                        std::uint64_t seed);

// Per-feature z-score fitted on a train split and applied to both splits.
struct Standardizer {
    RVector mean;
    RVector stddev;     // entries clamped away from zero

    static Standardizer fit(const LabeledDataset& train);
    RVector apply(const RVector& x) const;
    LabeledDataset apply(const LabeledDataset& dataset) const;
};

} // namespace quditml
