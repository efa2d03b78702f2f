#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nids/classifier.hpp"
#include "nids/impurity.hpp"
#include "nids/rng.hpp"

namespace nids {

struct TreeParams {
    SplitCriterion criterion = SplitCriterion::gini;
    std::size_t max_depth = 0; // 0 = unlimited
    std::size_t min_samples_split = 2;
    bool feature_subsample = false; // sqrt(d) random candidates per split
};

// Greedy binary CART. Thresholds are midpoints between consecutive distinct
// sorted values; a split is accepted only for strictly positive impurity
// decrease; ties keep the earliest (feature index, then threshold) candidate.
// raw_importance[f] accumulates (n_node / n_total) * decrease per split.
TreeState build_tree(const DesignMatrix& m, std::vector<std::size_t> sample_indices,
                     const TreeParams& params, Rng& rng);

std::int32_t tree_predict_class(const TreeState& t, const double* x);

ForestState build_forest(const DesignMatrix& m, std::size_t n_trees, const TreeParams& params,
                         bool bootstrap, std::uint64_t seed);

std::int32_t forest_predict_class(const ForestState& f, const double* x, std::size_t n_classes);

// Mean of per-tree raw importances, normalized to sum to 1 when any split
// occurred; all zeros otherwise.
std::vector<double> forest_importances(const ForestState& f, std::size_t d);

} // namespace nids
