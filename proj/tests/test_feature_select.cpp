#include <doctest.h>

#include <cmath>

#include "nids/feature_select.hpp"
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

// label is a deterministic threshold of feature 0; features 1.. are noise,
// the last feature is constant.
Dataset thresholded_dataset(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<std::vector<double>, std::string>> rows;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(d);
        v[0] = rng.gaussian();
        for (std::size_t j = 1; j + 1 < d; ++j) v[j] = rng.gaussian();
        v[d - 1] = 3.25;
        std::string label = v[0] > 0 ? "hot" : "cold";
        rows.push_back({std::move(v), std::move(label)});
    }
    rows[0].second = "hot";
    rows[1].second = "cold";
    return make_dataset(rows, d);
}

ClassifierSpec small_forest() {
    return ClassifierSpec::make(Family::random_forest, {{"n_trees", "15"}}, 0);
}

} // namespace

TEST_SUITE("feature_select") {

TEST_CASE("a deterministic-threshold feature ranks first; constants score zero; sums to one") {
    Dataset d = thresholded_dataset(600, 5, 41);
    FeatureRanking r = rank_features(d, small_forest(), {}, 1.0, 7);
    REQUIRE(r.items.size() == 5);
    CHECK(r.items[0].feature == "f0");
    double sum = 0.0;
    for (const auto& item : r.items) {
        CHECK(item.importance >= 0.0);
        sum += item.importance;
        if (item.feature == "f4") CHECK(item.importance == 0.0); // constant feature
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
}

TEST_CASE("rank_features is deterministic and honors exclusions") {
    Dataset d = thresholded_dataset(400, 4, 42);
    FeatureRanking a = rank_features(d, small_forest(), {"f2"}, 0.5, 99);
    FeatureRanking b = rank_features(d, small_forest(), {"f2"}, 0.5, 99);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        CHECK(a.items[i].feature == b.items[i].feature);
        CHECK(a.items[i].importance == b.items[i].importance);
    }
    for (const auto& item : a.items) CHECK(item.feature != "f2");

    CHECK_THROWS_AS(rank_features(d, small_forest(), {"zzz"}, 0.5, 1), Error);
    CHECK_THROWS_AS(rank_features(d, small_forest(), {"f0", "f1", "f2", "f3"}, 0.5, 1), Error);
}

TEST_CASE("rank_features rejects single-class data") {
    Dataset d = make_dataset({{{1, 2}, "only"}, {{2, 3}, "only"}}, 2);
    CHECK_THROWS_AS(rank_features(d, small_forest(), {}, 1.0, 1), Error);
}

TEST_CASE("curve reaches 1.0 at k = 2 for a two-feature-separable instance") {
    // label = (f0 > 0.5) or (f1 > 0.5): one feature is not enough, two are.
    Rng rng(17);
    std::vector<std::pair<std::vector<double>, std::string>> rows;
    for (int i = 0; i < 400; ++i) {
        double a = double(rng.bounded(2));
        double b = double(rng.bounded(2));
        rows.push_back({{a, b, rng.uniform(), rng.uniform()},
                        (a > 0.5 || b > 0.5) ? "pos" : "neg"});
    }
    Dataset d = make_dataset(rows, 4);
    FeatureRanking r = rank_features(d, small_forest(), {}, 1.0, 3);
    CHECK(((r.items[0].feature == "f0" && r.items[1].feature == "f1") ||
           (r.items[0].feature == "f1" && r.items[1].feature == "f0")));

    std::vector<ClassifierSpec> specs{ClassifierSpec::make(Family::decision_tree)};
    AccuracyCurve curve = accuracy_curve(d, r, specs, 3, 5);
    REQUIRE(curve.series.size() == 1);
    REQUIRE(curve.series[0].accuracy.size() == 3); // curve length = max_k
    CHECK(curve.series[0].accuracy[0] < 1.0);
    CHECK(curve.series[0].accuracy[1] == doctest::Approx(1.0));
}

TEST_CASE("curve is purely functional: restricting to the top-k features reproduces it") {
    Dataset d = thresholded_dataset(300, 4, 77);
    FeatureRanking r = rank_features(d, small_forest(), {}, 1.0, 3);
    std::vector<ClassifierSpec> specs{ClassifierSpec::make(Family::decision_tree),
                                      ClassifierSpec::make(Family::naive_bayes)};
    AccuracyCurve full = accuracy_curve(d, r, specs, 3, 11);

    Dataset restricted = d.select_features(r.top(3));
    FeatureRanking r3;
    for (std::size_t i = 0; i < 3; ++i) r3.items.push_back(r.items[i]);
    AccuracyCurve again = accuracy_curve(restricted, r3, specs, 3, 11);
    for (std::size_t s = 0; s < specs.size(); ++s) {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(full.series[s].accuracy[k] == again.series[s].accuracy[k]);
        }
    }
}

TEST_CASE("choose_top_k applies the tolerance rule") {
    auto curve_of = [](std::vector<double> means) {
        AccuracyCurve c;
        c.max_k = means.size();
        c.series.push_back({"m", std::move(means)});
        return c;
    };
    CHECK(choose_top_k(curve_of({0.80, 0.95, 0.951, 0.950}), 0.002) == 2);
    CHECK(choose_top_k(curve_of({0.1, 0.2, 0.3, 0.4}), 0.0) == 4); // monotone, argmax = last
    CHECK(choose_top_k(curve_of({0.9, 0.9, 0.9}), 0.0) == 1);      // ties toward smaller k
    CHECK_THROWS_AS(choose_top_k(AccuracyCurve{}, 0.1), Error);
}

TEST_CASE("choose_top_k averages across models") {
    AccuracyCurve c;
    c.max_k = 2;
    c.series.push_back({"a", {0.9, 0.9}});
    c.series.push_back({"b", {0.5, 0.9}});
    // means: [0.7, 0.9] -> only k=2 is within 0.002 of best
    CHECK(choose_top_k(c, 0.002) == 2);
}

TEST_CASE("ranking and curve emit plot-ready csv") {
    FeatureRanking r;
    r.items = {{"alpha", 0.75}, {"beta", 0.25}};
    CHECK(r.to_csv() == "feature,importance\nalpha,0.75\nbeta,0.25\n");

    AccuracyCurve c;
    c.max_k = 2;
    c.series.push_back({"decision_tree", {0.5, 1.0}});
    CHECK(c.to_csv() == "model,k,accuracy\ndecision_tree,1,0.5\ndecision_tree,2,1\n");
}

} // TEST_SUITE
