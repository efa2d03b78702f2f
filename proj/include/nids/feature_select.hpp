#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "nids/classifier.hpp"
#include "nids/dataset.hpp"

namespace nids {

struct FeatureRanking {
    struct Item {
        std::string feature;
        double importance; // normalized, descending
    };
    std::vector<Item> items;

    std::vector<std::string> top(std::size_t k) const;
    std::string to_csv() const; // feature,importance
};

// Trains a random forest on a seeded Bernoulli fraction of d (excluded
// features removed first) and ranks the remaining features by mean decrease
// in impurity, normalized to sum to 1.
FeatureRanking rank_features(const Dataset& d, const ClassifierSpec& forest_params,
                             const std::set<std::string>& exclusions, double fraction,
                             std::uint64_t seed);

struct AccuracyCurve {
    struct Series {
        std::string model;                // family name
        std::vector<double> accuracy;     // index i holds k = i+1
    };
    std::vector<Series> series;
    std::size_t max_k = 0;

    std::string to_csv() const; // model,k,accuracy
};

// For k = 1..max_k, trains each spec on the top-k features of one shared
// stratified holdout split and records holdout accuracy. Per-task seeds
// derive from (split_seed, model index, k).
AccuracyCurve accuracy_curve(const Dataset& d, const FeatureRanking& ranking,
                             const std::vector<ClassifierSpec>& model_specs, std::size_t max_k,
                             std::uint64_t split_seed, double holdout_fraction = 0.7);

// Smallest k whose mean accuracy across models is within tolerance of the
// best mean; ties break toward smaller k.
std::size_t choose_top_k(const AccuracyCurve& curve, double tolerance);

} // namespace nids
