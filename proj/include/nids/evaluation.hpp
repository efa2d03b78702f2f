#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nids/classifier.hpp"
#include "nids/dataset.hpp"

namespace nids {

struct ConfusionMatrix {
    std::vector<std::string> labels;            // row/column order
    std::vector<std::vector<std::size_t>> m;    // m[true][predicted]

    static ConfusionMatrix from_labels(const std::vector<std::string>& truth,
                                       const std::vector<std::string>& predicted,
                                       const std::vector<std::string>& label_order);
    std::size_t total() const;
    std::string to_csv() const;
};

struct BinaryCounts {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
};

// Positive-vs-rest collapse of a (possibly multi-class) confusion matrix.
BinaryCounts collapse(const ConfusionMatrix& cm, const std::string& positive);

struct MetricsRow {
    std::string positive;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Accuracy/precision/recall/F1 with the zero-denominator convention: a
// metric is 0 when its denominator is 0.
MetricsRow metrics(const ConfusionMatrix& cm, const std::string& positive);

struct MetricsReport {
    double accuracy = 0.0;            // trace / total
    std::vector<MetricsRow> per_class; // each class treated as positive

    static MetricsReport from(const ConfusionMatrix& cm);
};

struct TimingReport {
    double fit_s = 0.0;
    double predict_s = 0.0;
    std::size_t n_train = 0;
    std::size_t n_predict = 0;
    std::string environment;
};

struct GapBlock {
    double accuracy = 0.0;                                   // train - test
    std::vector<std::pair<std::string, double>> f1_per_class; // train - test
};

struct EvaluationReport {
    std::string model;
    MetricsReport train_metrics;
    ConfusionMatrix train_confusion;
    bool has_test = false;
    MetricsReport test_metrics;
    ConfusionMatrix test_confusion;
    GapBlock gap; // valid when has_test
    TimingReport timing;
    std::uint64_t seed = 0;
    std::string config_digest;

    std::string to_json() const; // stable key order
};

// Metrics + confusion on both sides, the train-test gap block, and timing
// (fit time from the model, predict time from the test-side batch).
EvaluationReport evaluate(const TrainedModel& model, const Dataset& train_holdout,
                          const Dataset& test);
// Within-dataset degraded mode: no test side, gap absent.
EvaluationReport evaluate(const TrainedModel& model, const Dataset& train_holdout);

struct ComparisonRow {
    std::string model;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double accuracy_gap = 0.0;
    bool overfit_flagged = false;
    double fit_s = 0.0;
    double predict_s = 0.0;
};

struct ComparisonTable {
    double flag_threshold = 0.0;
    std::vector<ComparisonRow> rows; // descending test accuracy, ties by name

    std::string to_csv() const;
    std::string to_json() const;
};

// A model is flagged when its accuracy gap exceeds flag_threshold.
ComparisonTable compare_models(const std::vector<EvaluationReport>& reports,
                               double flag_threshold = 0.05);

} // namespace nids
