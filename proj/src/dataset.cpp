#include "quditml/dataset.hpp"

#include "quditml/errors.hpp"
#include "quditml/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace quditml {

namespace {

constexpr char kFeatureHeader[] = "f1,f2,f3,f4,f5,label";
constexpr char kSeriesHeader[] = "step,qber,skr,label";

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

double parse_double_cell(const std::string& cell, const std::string& file, int line,
                         int column) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(value)) {
        throw ParseError(file + ":" + std::to_string(line) + ": column " +
                         std::to_string(column) + ": not a number: '" + cell + "'");
    }
    return value;
}

int parse_label_cell(const std::string& cell, const std::string& file, int line,
                     int column) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const long value = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0') {
        throw ParseError(file + ":" + std::to_string(line) + ": column " +
                         std::to_string(column) + ": not an integer label: '" + cell + "'");
    }
    if (value < 0 || value > 8) {
        throw ParseError(file + ":" + std::to_string(line) + ": column " +
                         std::to_string(column) + ": label " + std::to_string(value) +
                         " outside 0..8");
    }
    return static_cast<int>(value);
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path.string() + ": cannot open file");
    }
    return in;
}

std::string read_line_trim_cr(std::istream& in) {
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    return line;
}

} // namespace

std::array<int, 9> LabeledDataset::class_counts() const {
    std::array<int, 9> counts{};
    for (const FeatureRow& row : rows) {
        counts[static_cast<std::size_t>(row.label)]++;
    }
    return counts;
}

RMatrix LabeledDataset::feature_matrix() const {
    RMatrix m(rows.size(), kFeatureCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        m.row(static_cast<Eigen::Index>(i)) = rows[i].features;
    }
    return m;
}

std::vector<int> LabeledDataset::labels() const {
    std::vector<int> out;
    out.reserve(rows.size());
    for (const FeatureRow& row : rows) {
        out.push_back(row.label);
    }
    return out;
}

WindowingResult window_series(const std::vector<TimeSeriesRecord>& records,
                              int window, int stride) {
    if (window < 1 || stride < 1) {
        throw InvalidInput("window_series: window and stride must be >= 1");
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].step <= records[i - 1].step) {
            throw InvalidInput("window_series: records not sorted by step at index " +
                               std::to_string(i));
        }
    }

    WindowingResult result;
    std::size_t segment_begin = 0;
    while (segment_begin < records.size()) {
        std::size_t segment_end = segment_begin + 1;
        while (segment_end < records.size() &&
               records[segment_end].label == records[segment_begin].label) {
            ++segment_end;
        }
        const std::size_t length = segment_end - segment_begin;
        if (length < static_cast<std::size_t>(window)) {
            result.skipped_segments++;
        } else {
            for (std::size_t offset = 0;
                 offset + static_cast<std::size_t>(window) <= length;
                 offset += static_cast<std::size_t>(stride)) {
                WindowedSample sample;
                sample.label = records[segment_begin].label;
                sample.qber.reserve(static_cast<std::size_t>(window));
                sample.skr.reserve(static_cast<std::size_t>(window));
                for (int k = 0; k < window; ++k) {
                    const TimeSeriesRecord& rec = records[segment_begin + offset +
                                                          static_cast<std::size_t>(k)];
                    sample.qber.push_back(rec.qber);
                    sample.skr.push_back(rec.skr);
                }
                result.windows.push_back(std::move(sample));
            }
        }
        segment_begin = segment_end;
    }
    return result;
}

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v, double mean) {
    double sum_sq = 0.0;
    for (double x : v) sum_sq += (x - mean) * (x - mean);
    return std::sqrt(sum_sq / static_cast<double>(v.size()));
}

double least_squares_slope(const std::vector<double>& v) {
    const auto n = static_cast<double>(v.size());
    if (v.size() < 2) return 0.0;
    const double t_mean = (n - 1.0) / 2.0;
    const double y_mean = mean_of(v);
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        const double dt = static_cast<double>(t) - t_mean;
        numerator += dt * (v[t] - y_mean);
        denominator += dt * dt;
    }
    return numerator / denominator;
}

} // namespace

FeatureRow extract_features(const WindowedSample& sample) {
    if (sample.qber.empty() || sample.qber.size() != sample.skr.size()) {
        throw InvalidInput("extract_features: window is empty or ragged");
    }
    const double qber_mean = mean_of(sample.qber);
    const double skr_mean = mean_of(sample.skr);
    FeatureRow row;
    row.label = sample.label;
    row.features.resize(kFeatureCount);
    row.features << qber_mean, population_std(sample.qber, qber_mean), skr_mean,
        population_std(sample.skr, skr_mean), least_squares_slope(sample.qber);
    return row;
}

LabeledDataset load_feature_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    const std::string file = path.string();

    const std::string header = read_line_trim_cr(in);
    if (header != kFeatureHeader) {
        throw ParseError(file + ":1: expected header '" + kFeatureHeader + "', got '" +
                         header + "'");
    }

    LabeledDataset dataset;
    int line_number = 1;
    while (in.peek() != std::char_traits<char>::eof()) {
        const std::string line = read_line_trim_cr(in);
        ++line_number;
        if (line.empty() && in.eof()) break;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != kFeatureCount + 1) {
            throw ParseError(file + ":" + std::to_string(line_number) + ": expected " +
                             std::to_string(kFeatureCount + 1) + " columns, got " +
                             std::to_string(cells.size()));
        }
        FeatureRow row;
        row.features.resize(kFeatureCount);
        for (int j = 0; j < kFeatureCount; ++j) {
            row.features[j] = parse_double_cell(cells[static_cast<std::size_t>(j)], file,
                                                line_number, j + 1);
        }
        row.label = parse_label_cell(cells[kFeatureCount], file, line_number,
                                     kFeatureCount + 1);
        dataset.rows.push_back(std::move(row));
    }
    return dataset;
}

void write_feature_csv(const std::filesystem::path& path, const LabeledDataset& dataset) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path.string() + ": cannot open file for writing");
    }
    out << kFeatureHeader << "\n";
    for (const FeatureRow& row : dataset.rows) {
        for (int j = 0; j < kFeatureCount; ++j) {
            out << format_double(row.features[j]) << ',';
        }
        out << row.label << "\n";
    }
}

std::vector<TimeSeriesRecord> load_series_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    const std::string file = path.string();

    const std::string header = read_line_trim_cr(in);
    if (header != kSeriesHeader) {
        throw ParseError(file + ":1: expected header '" + kSeriesHeader + "', got '" +
                         header + "'");
    }

    std::vector<TimeSeriesRecord> records;
    int line_number = 1;
    while (in.peek() != std::char_traits<char>::eof()) {
        const std::string line = read_line_trim_cr(in);
        ++line_number;
        if (line.empty() && in.eof()) break;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != 4) {
            throw ParseError(file + ":" + std::to_string(line_number) +
                             ": expected 4 columns, got " + std::to_string(cells.size()));
        }
        TimeSeriesRecord rec;
        rec.step = static_cast<long long>(parse_double_cell(cells[0], file, line_number, 1));
        rec.qber = parse_double_cell(cells[1], file, line_number, 2);
        rec.skr = parse_double_cell(cells[2], file, line_number, 3);
        rec.label = parse_label_cell(cells[3], file, line_number, 4);
        records.push_back(rec);
    }
    return records;
}

void write_series_csv(const std::filesystem::path& path,
                      const std::vector<TimeSeriesRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path.string() + ": cannot open file for writing");
    }
    out << kSeriesHeader << "\n";
    for (const TimeSeriesRecord& rec : records) {
        out << rec.step << ',' << format_double(rec.qber) << ',' << format_double(rec.skr)
            << ',' << rec.label << "\n";
    }
}

// Cluster means for the nine synthetic classes. The layout mimics the QKD
// task's structure: one baseline class, two nearby "coexistence" classes,
// a triple of close power-level classes, and a triple of attenuation
// classes, with unit-variance noise on every coordinate.
namespace {

constexpr double kMeanScale = 2.6;

constexpr double kClassMeans[9][kFeatureCount] = {
    {0.0, 0.0, 0.0, 0.0, 0.0},
    {0.75, 0.3, 0.0, 0.0, 0.0},
    {1.0, 1.3, 0.4, 0.0, 0.0},
    {-1.2, 1.2, 0.0, 0.3, 0.0},
    {-1.2, 1.2, 1.0, 0.0, 0.3},
    {-1.2, 1.2, 0.0, 1.0, 0.3},
    {0.3, -1.4, 0.9, 0.0, 0.4},
    {0.0, -1.4, 0.0, 0.9, 0.8},
    {1.0, -1.4, 0.4, 0.4, -0.9},
};

} // namespace

LabeledDataset synthesize_dataset(std::uint64_t seed, int rows_per_class) {
    if (rows_per_class < 1) {
        throw InvalidInput("synthesize_dataset: rows_per_class must be >= 1");
    }
    Rng rng(seed);
    LabeledDataset dataset;
    dataset.rows.reserve(static_cast<std::size_t>(rows_per_class) * 9);
    for (int c = 0; c < 9; ++c) {
        for (int i = 0; i < rows_per_class; ++i) {
            FeatureRow row;
            row.label = c;
            row.features.resize(kFeatureCount);
            for (int j = 0; j < kFeatureCount; ++j) {
                row.features[j] = kMeanScale * kClassMeans[c][j] + rng.gaussian();
            }
            dataset.rows.push_back(std::move(row));
        }
    }
    return dataset;
}

std::pair<LabeledDataset, LabeledDataset> split_dataset(const LabeledDataset& dataset,
                                                        double fraction,
                                                        std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidInput("split_dataset: fraction must be in (0, 1)");
    }
    std::array<std::vector<std::size_t>, 9> by_class;
    for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
        by_class[static_cast<std::size_t>(dataset.rows[i].label)].push_back(i);
    }
    for (int c = 0; c < 9; ++c) {
        const std::size_t n = by_class[static_cast<std::size_t>(c)].size();
        if (n == 1) {
            throw InvalidInput("split_dataset: class " + std::to_string(c) +
                               " has fewer than 2 rows; cannot stratify");
        }
    }

    Rng rng(seed);
    LabeledDataset train;
    LabeledDataset test;
    train.split = Split::Train;
    test.split = Split::Test;
    for (auto& indices : by_class) {
        if (indices.empty()) continue;
        rng.shuffle(indices);
        const auto n = static_cast<long long>(indices.size());
        const long long to_train = std::clamp(
            static_cast<long long>(std::llround(fraction * static_cast<double>(n))),
            1LL, n - 1);
        for (long long i = 0; i < n; ++i) {
            const FeatureRow& row = dataset.rows[indices[static_cast<std::size_t>(i)]];
            (i < to_train ? train : test).rows.push_back(row);
        }
    }
    return {std::move(train), std::move(test)};
}

Standardizer Standardizer::fit(const LabeledDataset& train) {
    if (train.rows.empty()) {
        throw InvalidInput("Standardizer: empty train split");
    }
    const RMatrix features = train.feature_matrix();
    Standardizer scaler;
    scaler.mean = features.colwise().mean();
    RVector variance = RVector::Zero(features.cols());
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        const RVector centered = features.row(i).transpose() - scaler.mean;
        variance += centered.cwiseProduct(centered);
    }
    variance /= static_cast<double>(features.rows());
    scaler.stddev = variance.cwiseSqrt().cwiseMax(1e-12);
    return scaler;
}

RVector Standardizer::apply(const RVector& x) const {
    if (x.size() != mean.size()) {
        throw ShapeError("Standardizer: feature length mismatch");
    }
    return (x - mean).cwiseQuotient(stddev);
}

LabeledDataset Standardizer::apply(const LabeledDataset& dataset) const {
    LabeledDataset out = dataset;
    for (FeatureRow& row : out.rows) {
        row.features = apply(row.features);
    }
    return out;
}

} // namespace quditml
