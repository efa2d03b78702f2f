#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "nids/dataset.hpp"

namespace nids {

struct CleanReport {
    std::size_t dropped_missing = 0;
    std::size_t dropped_nonfinite = 0;
    std::size_t dropped_duplicates = 0;
    std::size_t remaining = 0;
};

// Removes rows with missing/non-finite cells first (a row with both kinds
// counts under dropped_missing), then deduplicates the survivors keeping the
// first occurrence. Duplicate key = all feature values plus label.
std::pair<Dataset, CleanReport> clean(const Dataset& d);

struct ResamplePolicy {
    std::optional<std::size_t> per_class_cap;
    // benign : sum(non-benign) target, e.g. 1.0 for 1:1. Only ever shrinks benign.
    std::optional<double> benign_ratio;
    std::string benign_label;
    std::uint64_t seed = 0;
};

Dataset downsample(const Dataset& d, const ResamplePolicy& policy);

Dataset binarize_labels(const Dataset& d, const std::string& benign_label,
                        const std::string& merged_label);

Dataset drop_class(const Dataset& d, const std::string& label);

// train size = llround(train_fraction * N); per-class rounding when
// stratified. Both sides preserve the input's relative record order.
std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double train_fraction,
                                          bool stratified, std::uint64_t seed);

} // namespace nids
