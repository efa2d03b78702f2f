#include "nids/evaluation.hpp"

#include <algorithm>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nids/csv.hpp"
#include "nids/kernels.hpp"

namespace nids {

using ordered_json = nlohmann::ordered_json;

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<std::string>& truth,
                                             const std::vector<std::string>& predicted,
                                             const std::vector<std::string>& label_order) {
    if (truth.size() != predicted.size()) {
        throw Error("confusion_matrix: truth/predicted length mismatch");
    }
    ConfusionMatrix cm;
    cm.labels = label_order;
    cm.m.assign(label_order.size(), std::vector<std::size_t>(label_order.size(), 0));

    auto index_of = [&](const std::string& l) -> std::size_t {
        for (std::size_t i = 0; i < label_order.size(); ++i) {
            if (label_order[i] == l) return i;
        }
        throw Error("confusion_matrix: unknown label '" + l + "'");
    };
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++cm.m[index_of(truth[i])][index_of(predicted[i])];
    }
    return cm;
}

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : m) {
        for (auto v : row) t += v;
    }
    return t;
}

std::string ConfusionMatrix::to_csv() const {
    std::string out = "true\\predicted";
    for (const auto& l : labels) {
        out += ',';
        out += l;
    }
    out += '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += labels[i];
        for (auto v : m[i]) {
            out += ',';
            out += std::to_string(v);
        }
        out += '\n';
    }
    return out;
}

BinaryCounts collapse(const ConfusionMatrix& cm, const std::string& positive) {
    std::size_t p = cm.labels.size();
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        if (cm.labels[i] == positive) {
            p = i;
            break;
        }
    }
    if (p == cm.labels.size()) {
        throw Error("metrics: positive class '" + positive + "' not in label order");
    }
    BinaryCounts c;
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        for (std::size_t j = 0; j < cm.labels.size(); ++j) {
            std::size_t v = cm.m[i][j];
            if (i == p && j == p) {
                c.tp += v;
            } else if (i == p) {
                c.fn += v;
            } else if (j == p) {
                c.fp += v;
            } else {
                c.tn += v;
            }
        }
    }
    return c;
}

MetricsRow metrics(const ConfusionMatrix& cm, const std::string& positive) {
    if (cm.total() == 0) throw Error("metrics: empty confusion matrix");
    BinaryCounts c = collapse(cm, positive);
    MetricsRow r;
    r.positive = positive;
    const double total = static_cast<double>(c.tp + c.tn + c.fp + c.fn);
    r.accuracy = (static_cast<double>(c.tp) + static_cast<double>(c.tn)) / total;
    r.precision = (c.tp + c.fp) > 0
                      ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                      : 0.0;
    r.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                                 : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

MetricsReport MetricsReport::from(const ConfusionMatrix& cm) {
    MetricsReport report;
    std::size_t diag = 0;
    for (std::size_t i = 0; i < cm.labels.size(); ++i) diag += cm.m[i][i];
    report.accuracy = static_cast<double>(diag) / static_cast<double>(cm.total());
    for (const auto& label : cm.labels) report.per_class.push_back(metrics(cm, label));
    return report;
}

namespace {

std::pair<MetricsReport, ConfusionMatrix> evaluate_side(const TrainedModel& model,
                                                        const Dataset& d, double* predict_seconds) {
    BatchPrediction pred = predict_batch(model, d);
    std::vector<std::string> truth;
    truth.reserve(d.size());
    for (const auto& r : d.records()) truth.push_back(r.label);
    // Ground-truth labels outside the model's class set would abort the
    // report; count them against accuracy instead via an extended order.
    std::vector<std::string> order = model.classes;
    for (const auto& t : truth) {
        if (std::find(order.begin(), order.end(), t) == order.end()) order.push_back(t);
    }
    ConfusionMatrix cm = ConfusionMatrix::from_labels(truth, pred.labels, order);
    if (predict_seconds) *predict_seconds = pred.elapsed_seconds;
    return {MetricsReport::from(cm), std::move(cm)};
}

ordered_json side_to_json(const MetricsReport& m, const ConfusionMatrix& cm) {
    ordered_json per_class = ordered_json::array();
    for (const auto& row : m.per_class) {
        per_class.push_back(ordered_json{{"class", row.positive},
                                         {"precision", row.precision},
                                         {"recall", row.recall},
                                         {"f1", row.f1}});
    }
    ordered_json confusion = ordered_json::array();
    for (const auto& row : cm.m) confusion.push_back(row);
    return ordered_json{{"accuracy", m.accuracy},
                        {"per_class", std::move(per_class)},
                        {"confusion", std::move(confusion)},
                        {"labels", cm.labels}};
}

} // namespace

EvaluationReport evaluate(const TrainedModel& model, const Dataset& train_holdout,
                          const Dataset& test) {
    EvaluationReport report = evaluate(model, train_holdout);
    report.has_test = true;

    double predict_s = 0.0;
    auto [tm, tcm] = evaluate_side(model, test, &predict_s);
    report.test_metrics = std::move(tm);
    report.test_confusion = std::move(tcm);
    report.timing.predict_s = predict_s;
    report.timing.n_predict = test.size();

    report.gap.accuracy = report.train_metrics.accuracy - report.test_metrics.accuracy;
    for (const auto& train_row : report.train_metrics.per_class) {
        for (const auto& test_row : report.test_metrics.per_class) {
            if (test_row.positive == train_row.positive) {
                report.gap.f1_per_class.emplace_back(train_row.positive,
                                                     train_row.f1 - test_row.f1);
                break;
            }
        }
    }
    return report;
}

EvaluationReport evaluate(const TrainedModel& model, const Dataset& train_holdout) {
    EvaluationReport report;
    report.model = to_string(model.spec.family);
    report.seed = model.spec.seed;

    double predict_s = 0.0;
    auto [m, cm] = evaluate_side(model, train_holdout, &predict_s);
    report.train_metrics = std::move(m);
    report.train_confusion = std::move(cm);
    report.has_test = false;

    report.timing.fit_s = model.fit_seconds;
    report.timing.n_train = model.n_train;
    report.timing.predict_s = predict_s; // overwritten when a test side exists
    report.timing.n_predict = train_holdout.size();
    report.timing.environment = std::string("kernels=") + kern::active().name + ", threads=" +
                                std::to_string(std::thread::hardware_concurrency());
    return report;
}

std::string EvaluationReport::to_json() const {
    ordered_json j;
    j["model"] = model;
    j["train"] = side_to_json(train_metrics, train_confusion);
    if (has_test) {
        j["test"] = side_to_json(test_metrics, test_confusion);
        ordered_json f1 = ordered_json::object();
        for (const auto& [cls, gap_v] : gap.f1_per_class) f1[cls] = gap_v;
        j["gap"] = ordered_json{{"accuracy", gap.accuracy}, {"f1_per_class", std::move(f1)}};
    }
    j["timing"] = ordered_json{{"fit_s", timing.fit_s},
                               {"predict_s", timing.predict_s},
                               {"n_train", timing.n_train},
                               {"n_test", timing.n_predict}};
    j["seed"] = seed;
    j["config_digest"] = config_digest;
    return j.dump(2) + "\n";
}

ComparisonTable compare_models(const std::vector<EvaluationReport>& reports,
                               double flag_threshold) {
    if (reports.empty()) throw Error("compare_models: no reports");
    ComparisonTable table;
    table.flag_threshold = flag_threshold;
    for (const auto& r : reports) {
        ComparisonRow row;
        row.model = r.model;
        row.train_accuracy = r.train_metrics.accuracy;
        row.test_accuracy = r.has_test ? r.test_metrics.accuracy : r.train_metrics.accuracy;
        row.accuracy_gap = r.has_test ? r.gap.accuracy : 0.0;
        row.overfit_flagged = r.has_test && row.accuracy_gap > flag_threshold;
        row.fit_s = r.timing.fit_s;
        row.predict_s = r.timing.predict_s;
        table.rows.push_back(std::move(row));
    }
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [](const ComparisonRow& a, const ComparisonRow& b) {
                         if (a.test_accuracy != b.test_accuracy) {
                             return a.test_accuracy > b.test_accuracy;
                         }
                         return a.model < b.model;
                     });
    return table;
}

std::string ComparisonTable::to_csv() const {
    std::string out = "model,train_accuracy,test_accuracy,accuracy_gap,overfit_flagged,fit_s,predict_s\n";
    for (const auto& r : rows) {
        out += r.model;
        out += ',';
        out += format_csv_value(r.train_accuracy);
        out += ',';
        out += format_csv_value(r.test_accuracy);
        out += ',';
        out += format_csv_value(r.accuracy_gap);
        out += ',';
        out += r.overfit_flagged ? "true" : "false";
        out += ',';
        out += format_csv_value(r.fit_s);
        out += ',';
        out += format_csv_value(r.predict_s);
        out += '\n';
    }
    return out;
}

std::string ComparisonTable::to_json() const {
    ordered_json rows_json = ordered_json::array();
    for (const auto& r : rows) {
        rows_json.push_back(ordered_json{{"model", r.model},
                                         {"train_accuracy", r.train_accuracy},
                                         {"test_accuracy", r.test_accuracy},
                                         {"accuracy_gap", r.accuracy_gap},
                                         {"overfit_flagged", r.overfit_flagged},
                                         {"fit_s", r.fit_s},
                                         {"predict_s", r.predict_s}});
    }
    ordered_json j{{"flag_threshold", flag_threshold}, {"rows", std::move(rows_json)}};
    return j.dump(2) + "\n";
}

} // namespace nids
