#include "nids/feature_select.hpp"

#include <algorithm>
#include <sstream>

#include "nids/csv.hpp"
#include "nids/preprocess.hpp"
#include "nids/rng.hpp"
#include "nids/tree.hpp"

namespace nids {

std::vector<std::string> FeatureRanking::top(std::size_t k) const {
    k = std::min(k, items.size());
    std::vector<std::string> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(items[i].feature);
    return out;
}

std::string FeatureRanking::to_csv() const {
    std::string out = "feature,importance\n";
    for (const auto& item : items) {
        out += item.feature;
        out += ',';
        out += format_csv_value(item.importance);
        out += '\n';
    }
    return out;
}

FeatureRanking rank_features(const Dataset& d, const ClassifierSpec& forest_params,
                             const std::set<std::string>& exclusions, double fraction,
                             std::uint64_t seed) {
    if (forest_params.family != Family::random_forest) {
        throw Error("rank_features: forest_params must describe a random_forest");
    }
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw Error("rank_features: fraction must be in (0,1]");
    }
    for (const auto& ex : exclusions) {
        if (!d.schema().index_of(ex)) {
            throw Error("rank_features: exclusion '" + ex + "' is not a schema feature");
        }
    }

    std::vector<std::string> kept;
    for (const auto& f : d.schema().feature_names) {
        if (!exclusions.contains(f)) kept.push_back(f);
    }
    if (kept.empty()) throw Error("rank_features: all features excluded");

    Dataset reduced = d.select_features(kept);

    std::vector<FlowRecord> sampled;
    const std::uint64_t row_seed = derive_seed(seed, "rank_features_sample");
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        if (bernoulli_keep(row_seed, i, fraction)) sampled.push_back(reduced.records()[i]);
    }
    Dataset subset = reduced.with_records(std::move(sampled), "rank_features_sample");
    if (subset.empty()) throw Error("rank_features: sampled subset is empty");

    TrainedModel forest = fit(forest_params.with_seed(derive_seed(seed, "rank_features_fit")), subset);
    std::vector<double> importance = forest_importances(*forest.forest, kept.size());

    FeatureRanking ranking;
    ranking.items.reserve(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        ranking.items.push_back({kept[j], importance[j]});
    }
    std::stable_sort(ranking.items.begin(), ranking.items.end(),
                     [](const auto& a, const auto& b) { return a.importance > b.importance; });
    return ranking;
}

AccuracyCurve accuracy_curve(const Dataset& d, const FeatureRanking& ranking,
                             const std::vector<ClassifierSpec>& model_specs, std::size_t max_k,
                             std::uint64_t split_seed, double holdout_fraction) {
    if (max_k == 0 || max_k > ranking.items.size()) {
        throw Error("accuracy_curve: max_k must be in [1, ranking size]");
    }
    auto [train, holdout] = holdout_split(d, holdout_fraction, /*stratified=*/true,
                                          derive_seed(split_seed, "curve_split"));

    AccuracyCurve curve;
    curve.max_k = max_k;
    curve.series.resize(model_specs.size());
    for (std::size_t s = 0; s < model_specs.size(); ++s) {
        curve.series[s].model = to_string(model_specs[s].family);
        curve.series[s].accuracy.resize(max_k, 0.0);
    }

    // (model, k) cells are independent; seeds are derived per cell so any
    // evaluation order gives identical results.
    for (std::size_t s = 0; s < model_specs.size(); ++s) {
        for (std::size_t k = 1; k <= max_k; ++k) {
            std::vector<std::string> feats = ranking.top(k);
            Dataset train_k = train.select_features(feats);
            Dataset hold_k = holdout.select_features(feats);
            ClassifierSpec spec =
                model_specs[s].with_seed(derive_seed(split_seed, "curve_fit", s, k));
            TrainedModel model = fit(spec, train_k);
            BatchPrediction pred = predict_batch(model, hold_k);
            std::size_t hits = 0;
            for (std::size_t i = 0; i < hold_k.size(); ++i) {
                if (pred.labels[i] == hold_k.records()[i].label) ++hits;
            }
            curve.series[s].accuracy[k - 1] =
                static_cast<double>(hits) / static_cast<double>(hold_k.size());
        }
    }
    return curve;
}

std::string AccuracyCurve::to_csv() const {
    std::string out = "model,k,accuracy\n";
    for (const auto& s : series) {
        for (std::size_t k = 1; k <= s.accuracy.size(); ++k) {
            out += s.model;
            out += ',';
            out += std::to_string(k);
            out += ',';
            out += format_csv_value(s.accuracy[k - 1]);
            out += '\n';
        }
    }
    return out;
}

std::size_t choose_top_k(const AccuracyCurve& curve, double tolerance) {
    if (curve.series.empty() || curve.max_k == 0) throw Error("choose_top_k: empty curve");
    std::vector<double> mean(curve.max_k, 0.0);
    for (const auto& s : curve.series) {
        for (std::size_t i = 0; i < curve.max_k; ++i) mean[i] += s.accuracy[i];
    }
    for (auto& v : mean) v /= static_cast<double>(curve.series.size());

    double best = *std::max_element(mean.begin(), mean.end());
    for (std::size_t i = 0; i < mean.size(); ++i) {
        if (mean[i] >= best - tolerance) return i + 1;
    }
    return mean.size(); // unreachable
}

} // namespace nids
