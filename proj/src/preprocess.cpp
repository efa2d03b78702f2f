#include "nids/preprocess.hpp"

#include <algorithm>
#include <bit>
#include <iostream>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include "nids/rng.hpp"

namespace nids {

namespace {

std::uint64_t row_hash(const FlowRecord& r) {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&h](std::uint64_t w) {
        h ^= w;
        h *= 1099511628211ull;
        h = mix64(h);
    };
    for (double v : r.values) feed(std::bit_cast<std::uint64_t>(v));
    for (unsigned char c : r.label) feed(c);
    return h;
}

bool rows_equal(const FlowRecord& a, const FlowRecord& b) {
    if (a.label != b.label) return false;
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a.values[i]) != std::bit_cast<std::uint64_t>(b.values[i])) {
            return false;
        }
    }
    return true;
}

// Seeded choice of `take` indices out of `pool`, survivors in original order.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t take,
                                                    std::uint64_t seed) {
    Rng rng(seed);
    rng.shuffle(pool);
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
    return pool;
}

} // namespace

std::pair<Dataset, CleanReport> clean(const Dataset& d) {
    CleanReport report;
    std::vector<FlowRecord> valid;
    valid.reserve(d.size());
    for (const auto& r : d.records()) {
        bool missing = false;
        bool nonfinite = false;
        for (double v : r.values) {
            CellKind k = cell_kind(v);
            if (k == CellKind::missing) {
                missing = true;
                break; // missing takes precedence over non-finite
            }
            if (k == CellKind::non_finite) nonfinite = true;
        }
        if (missing) {
            ++report.dropped_missing;
        } else if (nonfinite) {
            ++report.dropped_nonfinite;
        } else {
            valid.push_back(r);
        }
    }

    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    std::vector<FlowRecord> unique;
    unique.reserve(valid.size());
    for (auto& r : valid) {
        std::uint64_t h = row_hash(r);
        auto& bucket = buckets[h];
        bool dup = false;
        for (std::size_t idx : bucket) {
            if (rows_equal(unique[idx], r)) {
                dup = true;
                break;
            }
        }
        if (dup) {
            ++report.dropped_duplicates;
        } else {
            bucket.push_back(unique.size());
            unique.push_back(std::move(r));
        }
    }
    report.remaining = unique.size();

    std::ostringstream step;
    step << "clean(missing=" << report.dropped_missing << ", nonfinite=" << report.dropped_nonfinite
         << ", duplicates=" << report.dropped_duplicates << ")";
    return {d.with_records(std::move(unique), step.str()), report};
}

Dataset downsample(const Dataset& d, const ResamplePolicy& policy) {
    if (policy.per_class_cap && *policy.per_class_cap == 0) {
        throw Error("downsample: per_class_cap must be > 0");
    }
    if (policy.benign_ratio && !(*policy.benign_ratio > 0.0)) {
        throw Error("downsample: benign ratio must be > 0");
    }

    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.size(); ++i) by_class[d.records()[i].label].push_back(i);

    if (policy.benign_ratio && !by_class.contains(policy.benign_label)) {
        throw Error("downsample: benign label '" + policy.benign_label + "' not present");
    }

    // Phase 1: cap every class.
    std::map<std::string, std::vector<std::size_t>> surviving;
    for (auto& [label, idx] : by_class) {
        if (policy.per_class_cap && idx.size() > *policy.per_class_cap) {
            surviving[label] = sample_without_replacement(
                idx, *policy.per_class_cap, derive_seed_keyed(policy.seed, "downsample_cap", label));
        } else {
            surviving[label] = std::move(idx);
        }
    }

    // Phase 2: shrink benign to the target ratio against everything else.
    if (policy.benign_ratio) {
        std::size_t non_benign = 0;
        for (const auto& [label, idx] : surviving) {
            if (label != policy.benign_label) non_benign += idx.size();
        }
        auto target = static_cast<std::size_t>(
            std::llround(*policy.benign_ratio * static_cast<double>(non_benign)));
        auto& benign = surviving[policy.benign_label];
        if (target > benign.size()) {
            std::ostringstream msg;
            msg << "downsample: ratio " << *policy.benign_ratio
                << " unattainable by shrinking benign alone; achievable ratio is "
                << (non_benign > 0
                        ? static_cast<double>(benign.size()) / static_cast<double>(non_benign)
                        : 0.0);
            throw Error(msg.str());
        }
        if (target < benign.size()) {
            benign = sample_without_replacement(benign, target,
                                                derive_seed(policy.seed, "downsample_ratio"));
        }
    }

    std::vector<std::size_t> keep;
    for (const auto& [label, idx] : surviving) keep.insert(keep.end(), idx.begin(), idx.end());
    std::sort(keep.begin(), keep.end());

    std::vector<FlowRecord> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(d.records()[i]);

    std::ostringstream step;
    step << "downsample(cap=" << (policy.per_class_cap ? std::to_string(*policy.per_class_cap) : "-")
         << ", ratio=" << (policy.benign_ratio ? std::to_string(*policy.benign_ratio) : "-")
         << ", seed=" << policy.seed << ")";
    return d.with_records(std::move(out), step.str());
}

Dataset binarize_labels(const Dataset& d, const std::string& benign_label,
                        const std::string& merged_label) {
    bool benign_seen = false;
    bool merged_any = false;
    std::vector<FlowRecord> out;
    out.reserve(d.size());
    for (const auto& r : d.records()) {
        FlowRecord nr = r;
        if (nr.label == benign_label) {
            benign_seen = true;
        } else {
            nr.label = merged_label;
            merged_any = true;
        }
        out.push_back(std::move(nr));
    }
    if (!benign_seen) {
        throw Error("binarize_labels: benign label '" + benign_label + "' not present");
    }
    if (!merged_any && !d.empty()) {
        std::cerr << "warning: binarize_labels: input is all-benign; a single class remains\n";
    }
    return d.with_records(std::move(out), "binarize(benign=" + benign_label + ", merged=" +
                                              merged_label + ")");
}

Dataset drop_class(const Dataset& d, const std::string& label) {
    std::vector<FlowRecord> out;
    out.reserve(d.size());
    for (const auto& r : d.records()) {
        if (r.label != label) out.push_back(r);
    }
    return d.with_records(std::move(out), "drop_class(" + label + ")");
}

std::pair<Dataset, Dataset> holdout_split(const Dataset& d, double train_fraction, bool stratified,
                                          std::uint64_t seed) {
    if (d.size() < 2) throw Error("holdout_split: need at least 2 records");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw Error("holdout_split: train_fraction must be in (0,1)");
    }

    std::vector<bool> in_train(d.size(), false);
    if (stratified) {
        std::map<std::string, std::vector<std::size_t>> by_class;
        for (std::size_t i = 0; i < d.size(); ++i) by_class[d.records()[i].label].push_back(i);
        for (auto& [label, idx] : by_class) {
            if (idx.size() < 2) {
                throw Error("holdout_split: class '" + label + "' has fewer than 2 records");
            }
            auto take = static_cast<std::size_t>(
                std::llround(train_fraction * static_cast<double>(idx.size())));
            Rng rng(derive_seed_keyed(seed, "holdout", label));
            rng.shuffle(idx);
            for (std::size_t j = 0; j < take && j < idx.size(); ++j) in_train[idx[j]] = true;
        }
    } else {
        std::vector<std::size_t> idx(d.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        auto take =
            static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(d.size())));
        Rng rng(derive_seed(seed, "holdout"));
        rng.shuffle(idx);
        for (std::size_t j = 0; j < take && j < idx.size(); ++j) in_train[idx[j]] = true;
    }

    std::vector<FlowRecord> train_recs;
    std::vector<FlowRecord> test_recs;
    for (std::size_t i = 0; i < d.size(); ++i) {
        (in_train[i] ? train_recs : test_recs).push_back(d.records()[i]);
    }
    if (train_recs.empty() || test_recs.empty()) {
        throw Error("holdout_split: a side is empty at fraction " + std::to_string(train_fraction));
    }

    std::ostringstream a;
    a << "holdout_split(train, f=" << train_fraction << ", stratified=" << stratified
      << ", seed=" << seed << ")";
    std::ostringstream b;
    b << "holdout_split(test, f=" << train_fraction << ", stratified=" << stratified
      << ", seed=" << seed << ")";
    return {d.with_records(std::move(train_recs), a.str()),
            d.with_records(std::move(test_recs), b.str())};
}

} // namespace nids
