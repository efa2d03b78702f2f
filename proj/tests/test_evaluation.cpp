#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "nids/evaluation.hpp"
#include "nids/rng.hpp"

using namespace nids;

namespace {

Dataset make_dataset(const std::vector<std::pair<std::vector<double>, std::string>>& rows,
                     std::size_t dim) {
    Schema s;
    for (std::size_t i = 0; i < dim; ++i) s.feature_names.push_back("f" + std::to_string(i));
    s.label_column = "label";
    std::vector<FlowRecord> recs;
    for (const auto& [values, label] : rows) recs.push_back({values, label});
    return Dataset(s, recs, "test");
}

} // namespace

TEST_SUITE("evaluation") {

TEST_CASE("confusion matrix counts by hand") {
    std::vector<std::string> order{"b", "m"};
    ConfusionMatrix diag = ConfusionMatrix::from_labels({"b", "m", "b"}, {"b", "m", "b"}, order);
    CHECK(diag.m[0][0] == 2);
    CHECK(diag.m[1][1] == 1);
    CHECK(diag.m[0][1] == 0);
    CHECK(diag.m[1][0] == 0);

    ConfusionMatrix cm =
        ConfusionMatrix::from_labels({"b", "b", "m", "m"}, {"b", "m", "m", "m"}, order);
    BinaryCounts c = collapse(cm, "m");
    CHECK(c.tp == 2);
    CHECK(c.tn == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 0);

    CHECK_THROWS_AS(ConfusionMatrix::from_labels({"z"}, {"b"}, order), Error);
    CHECK_THROWS_AS(ConfusionMatrix::from_labels({"b"}, {"b", "m"}, order), Error);
}

TEST_CASE("counts sum to input length over random label vectors") {
    Rng rng(101);
    std::vector<std::string> order{"b", "m", "o"};
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 1 + rng.bounded(300);
        std::vector<std::string> truth(n);
        std::vector<std::string> pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = order[rng.bounded(3)];
            pred[i] = order[rng.bounded(3)];
        }
        ConfusionMatrix cm = ConfusionMatrix::from_labels(truth, pred, order);
        CHECK(cm.total() == n);
    }
}

TEST_CASE("metrics formulas, perfect case and zero-denominator convention") {
    std::vector<std::string> order{"neg", "pos"};
    ConfusionMatrix perfect = ConfusionMatrix::from_labels({"pos", "neg"}, {"pos", "neg"}, order);
    MetricsRow r = metrics(perfect, "pos");
    CHECK(r.accuracy == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f1 == 1.0);

    // TP=0, FP=0, FN>0 -> precision = recall = f1 = 0
    ConfusionMatrix none = ConfusionMatrix::from_labels({"pos", "pos"}, {"neg", "neg"}, order);
    MetricsRow z = metrics(none, "pos");
    CHECK(z.precision == 0.0);
    CHECK(z.recall == 0.0);
    CHECK(z.f1 == 0.0);
    CHECK(z.accuracy == 0.0);
}

TEST_CASE("metrics match a brute-force recount over random binary matrices") {
    Rng rng(555);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t tp = rng.bounded(40);
        std::size_t tn = rng.bounded(40);
        std::size_t fp = rng.bounded(40);
        std::size_t fn = rng.bounded(40);
        if (tp + tn + fp + fn == 0) continue;

        // rebuild raw label vectors, recount from scratch
        std::vector<std::string> truth;
        std::vector<std::string> pred;
        auto add = [&](std::size_t count, const char* t, const char* p) {
            for (std::size_t i = 0; i < count; ++i) {
                truth.push_back(t);
                pred.push_back(p);
            }
        };
        add(tp, "pos", "pos");
        add(tn, "neg", "neg");
        add(fp, "neg", "pos");
        add(fn, "pos", "neg");

        ConfusionMatrix cm = ConfusionMatrix::from_labels(truth, pred, {"neg", "pos"});
        MetricsRow m = metrics(cm, "pos");

        double total = double(tp + tn + fp + fn);
        double acc = double(tp + tn) / total;
        double prec = (tp + fp) ? double(tp) / double(tp + fp) : 0.0;
        double rec = (tp + fn) ? double(tp) / double(tp + fn) : 0.0;
        double f1 = (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
        CHECK(std::abs(m.accuracy - acc) <= 1e-12);
        CHECK(std::abs(m.precision - prec) <= 1e-12);
        CHECK(std::abs(m.recall - rec) <= 1e-12);
        CHECK(std::abs(m.f1 - f1) <= 1e-12);

        // true identities: recall(a) = M[a][a]/row, precision(a) = M[a][a]/col
        for (std::size_t a = 0; a < 2; ++a) {
            MetricsRow ra = metrics(cm, cm.labels[a]);
            double row = double(cm.m[a][0] + cm.m[a][1]);
            double col = double(cm.m[0][a] + cm.m[1][a]);
            if (row > 0) CHECK(std::abs(ra.recall - double(cm.m[a][a]) / row) <= 1e-12);
            if (col > 0) CHECK(std::abs(ra.precision - double(cm.m[a][a]) / col) <= 1e-12);
            // harmonic-mean identity
            CHECK(std::abs(ra.f1 * (ra.precision + ra.recall) - 2 * ra.precision * ra.recall) <=
                  1e-12);
        }

        // Eq. (3) overall accuracy equals trace/total
        MetricsReport report = MetricsReport::from(cm);
        CHECK(std::abs(report.accuracy - double(cm.m[0][0] + cm.m[1][1]) / total) <= 1e-12);
    }
}

TEST_CASE("published gap arithmetic: decision tree and svm") {
    CHECK(std::abs((0.9959 - 0.5942) - 0.4017) < 1e-4);
    CHECK(std::abs((0.9600 - 0.7559) - 0.2041) < 1e-4);
    double svm_gap = 0.9600 - 0.7559;
    double ann_gap = 0.9549 - 0.7000;
    double dnn_gap = 0.9735 - 0.6518;
    double dt_gap = 0.9959 - 0.5942;
    double rf_gap = 0.9967 - 0.5949;
    CHECK(svm_gap < ann_gap);
    CHECK(ann_gap < dnn_gap);
    CHECK(dnn_gap < dt_gap);
    CHECK(dnn_gap < rf_gap);
}

TEST_CASE("evaluate: identical sides give a zero gap; swapping sides negates it") {
    Rng rng(4242);
    std::vector<std::pair<std::vector<double>, std::string>> rows;
    for (int i = 0; i < 120; ++i) {
        bool b = rng.uniform() < 0.5;
        rows.push_back({{rng.gaussian() + (b ? 0.0 : 2.0)}, b ? "benign" : "malicious"});
    }
    rows[0].second = "benign";
    rows[1].second = "malicious";
    Dataset train = make_dataset(rows, 1);

    std::vector<std::pair<std::vector<double>, std::string>> rows2;
    for (int i = 0; i < 100; ++i) {
        bool b = rng.uniform() < 0.5;
        rows2.push_back({{rng.gaussian() + (b ? 0.3 : 2.3)}, b ? "benign" : "malicious"});
    }
    Dataset other = make_dataset(rows2, 1);

    TrainedModel model = fit(ClassifierSpec::make(Family::decision_tree, {{"max_depth", "3"}}), train);

    EvaluationReport same = evaluate(model, train, train);
    CHECK(same.gap.accuracy == 0.0);
    for (const auto& [cls, g] : same.gap.f1_per_class) CHECK(g == 0.0);

    EvaluationReport ab = evaluate(model, train, other);
    EvaluationReport ba = evaluate(model, other, train);
    CHECK(ab.gap.accuracy == doctest::Approx(-ba.gap.accuracy).epsilon(1e-12));
    REQUIRE(ab.gap.f1_per_class.size() == ba.gap.f1_per_class.size());
    for (std::size_t i = 0; i < ab.gap.f1_per_class.size(); ++i) {
        CHECK(ab.gap.f1_per_class[i].second ==
              doctest::Approx(-ba.gap.f1_per_class[i].second).epsilon(1e-12));
    }

    // report json carries the documented keys in order
    ab.config_digest = "deadbeef";
    auto j = nlohmann::json::parse(ab.to_json());
    CHECK(j.contains("model"));
    CHECK(j["train"].contains("accuracy"));
    CHECK(j["test"].contains("per_class"));
    CHECK(j["gap"].contains("f1_per_class"));
    CHECK(j["timing"].contains("fit_s"));
    CHECK(j["config_digest"] == "deadbeef");

    EvaluationReport degraded = evaluate(model, train);
    auto jd = nlohmann::json::parse(degraded.to_json());
    CHECK_FALSE(jd.contains("test"));
    CHECK_FALSE(jd.contains("gap"));
}

TEST_CASE("compare_models sorts, tie-breaks by name, flags large gaps, preserves values") {
    EvaluationReport a;
    a.model = "zeta";
    a.train_metrics.accuracy = 0.95;
    a.has_test = true;
    a.test_metrics.accuracy = 0.80;
    a.gap.accuracy = 0.15;
    a.timing.fit_s = 1.5;
    a.timing.predict_s = 0.25;

    EvaluationReport b = a;
    b.model = "alpha";

    EvaluationReport c;
    c.model = "mid";
    c.train_metrics.accuracy = 0.9;
    c.has_test = true;
    c.test_metrics.accuracy = 0.88;
    c.gap.accuracy = 0.02;

    ComparisonTable t = compare_models({a, b, c});
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[0].model == "mid");
    CHECK(t.rows[1].model == "alpha"); // tie with zeta broken by name
    CHECK(t.rows[2].model == "zeta");
    CHECK_FALSE(t.rows[0].overfit_flagged);
    CHECK(t.rows[1].overfit_flagged);
    CHECK(t.rows[1].train_accuracy == 0.95);
    CHECK(t.rows[1].test_accuracy == 0.80);
    CHECK(t.rows[1].fit_s == 1.5);

    ComparisonTable single = compare_models({a});
    CHECK(single.rows.size() == 1);
    CHECK_THROWS_AS(compare_models({}), Error);
}

} // TEST_SUITE
