#include "nids/dataset.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>
#include <unordered_set>

namespace nids {

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < feature_names.size(); ++i) {
        if (feature_names[i] == name) return i;
    }
    return std::nullopt;
}

void Schema::validate() const {
    std::unordered_set<std::string_view> seen;
    for (const auto& f : feature_names) {
        if (f == label_column) {
            throw Error("schema: feature '" + f + "' collides with the label column");
        }
        if (!seen.insert(f).second) {
            throw Error("schema: duplicate feature name '" + f + "'");
        }
    }
}

bool values_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) {
            if (!(std::isnan(a[i]) && std::isnan(b[i]))) return false;
        }
    }
    return true;
}

Dataset::Dataset(Schema schema, std::vector<FlowRecord> records, std::string provenance)
    : schema_(std::move(schema)), records_(std::move(records)), provenance_(std::move(provenance)) {
    schema_.validate();
    for (const auto& r : records_) {
        if (r.values.size() != schema_.dimension()) {
            throw Error("record dimension " + std::to_string(r.values.size()) +
                        " does not match schema dimension " + std::to_string(schema_.dimension()));
        }
    }
}

Dataset Dataset::with_records(std::vector<FlowRecord> records, const std::string& step) const {
    return Dataset(schema_, std::move(records), provenance_ + " | " + step);
}

Dataset Dataset::with_schema(Schema schema, std::vector<FlowRecord> records,
                             const std::string& step) const {
    return Dataset(std::move(schema), std::move(records), provenance_ + " | " + step);
}

Dataset Dataset::select_features(const std::vector<std::string>& keep) const {
    std::vector<std::size_t> idx;
    idx.reserve(keep.size());
    for (const auto& name : keep) {
        auto i = schema_.index_of(name);
        if (!i) throw Error("select_features: unknown feature '" + name + "'");
        idx.push_back(*i);
    }
    std::vector<FlowRecord> out;
    out.reserve(records_.size());
    for (const auto& r : records_) {
        FlowRecord nr;
        nr.values.reserve(idx.size());
        for (std::size_t i : idx) nr.values.push_back(r.values[i]);
        nr.label = r.label;
        out.push_back(std::move(nr));
    }
    Schema s{keep, schema_.label_column};
    return with_schema(std::move(s), std::move(out),
                       "select_features(" + std::to_string(keep.size()) + ")");
}

bool Dataset::same_content(const Dataset& other) const {
    if (!(schema_ == other.schema_)) return false;
    if (records_.size() != other.records_.size()) return false;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].label != other.records_[i].label) return false;
        if (!values_equal(records_[i].values, other.records_[i].values)) return false;
    }
    return true;
}

ClassDistribution ClassDistribution::from_counts(const std::map<std::string, std::size_t>& counts) {
    ClassDistribution d;
    for (const auto& [label, count] : counts) d.total += count;
    for (const auto& [label, count] : counts) {
        double pct = d.total > 0 ? static_cast<double>(count) / static_cast<double>(d.total) : 0.0;
        d.entries.push_back({label, count, pct});
    }
    std::stable_sort(d.entries.begin(), d.entries.end(), [](const Entry& a, const Entry& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.label < b.label;
    });
    return d;
}

ClassDistribution class_distribution(const Dataset& d) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : d.records()) ++counts[r.label];
    return ClassDistribution::from_counts(counts);
}

std::pair<Dataset, Dataset> align_schemas(const Dataset& train, const Dataset& test) {
    if (train.empty() || test.empty()) throw Error("align_schemas: empty dataset");

    std::unordered_set<std::string_view> test_features(test.schema().feature_names.begin(),
                                                       test.schema().feature_names.end());
    std::vector<std::string> common;
    for (const auto& f : train.schema().feature_names) {
        if (test_features.contains(f)) common.push_back(f);
    }
    if (common.empty()) throw Error("align_schemas: no common features");

    Dataset train_out = train.select_features(common);
    Dataset test_out = test.select_features(common);
    if (test_out.schema().label_column != train_out.schema().label_column) {
        // Unify the label column name on the train side's.
        Schema s = test_out.schema();
        s.label_column = train_out.schema().label_column;
        std::vector<FlowRecord> recs = test_out.records();
        test_out = test_out.with_schema(std::move(s), std::move(recs), "unify_label_column");
    }
    return {std::move(train_out), std::move(test_out)};
}

} // namespace nids
