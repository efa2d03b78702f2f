#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nids/common.hpp"

namespace nids {

// Cell encoding: a finite double is a regular value, NaN marks a missing
// token, +/-inf marks a non-finite token. Audits and cleaning derive the
// category from the stored double.
enum class CellKind { finite, missing, non_finite };

inline CellKind cell_kind(double v) {
    if (std::isnan(v)) return CellKind::missing;
    if (std::isinf(v)) return CellKind::non_finite;
    return CellKind::finite;
}

struct Schema {
    std::vector<std::string> feature_names; // order is significant everywhere
    std::string label_column;

    bool operator==(const Schema&) const = default;
    std::size_t dimension() const { return feature_names.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    void validate() const; // unique names, none equal to label_column
};

struct FlowRecord {
    std::vector<double> values;
    std::string label;
};

// Bitwise-style equality: NaN cells compare equal to NaN cells.
bool values_equal(const std::vector<double>& a, const std::vector<double>& b);

class Dataset {
public:
    Dataset(Schema schema, std::vector<FlowRecord> records, std::string provenance);

    const Schema& schema() const { return schema_; }
    const std::vector<FlowRecord>& records() const { return records_; }
    const std::string& provenance() const { return provenance_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    // Transforms produce new Datasets; `step` is appended to provenance.
    Dataset with_records(std::vector<FlowRecord> records, const std::string& step) const;
    Dataset with_schema(Schema schema, std::vector<FlowRecord> records,
                        const std::string& step) const;

    // Projects onto `keep` in the given order. Unknown names throw.
    Dataset select_features(const std::vector<std::string>& keep) const;

    bool same_content(const Dataset& other) const;

private:
    Schema schema_;
    std::vector<FlowRecord> records_;
    std::string provenance_;
};

struct ClassDistribution {
    struct Entry {
        std::string label;
        std::size_t count;
        double percent; // fraction of total, in [0,1]
    };
    std::vector<Entry> entries; // descending count, ties by label
    std::size_t total = 0;

    static ClassDistribution from_counts(const std::map<std::string, std::size_t>& counts);
};

ClassDistribution class_distribution(const Dataset& d);

// Reorders test's features to train's order and drops features outside the
// intersection from both sides; the outputs share one schema.
std::pair<Dataset, Dataset> align_schemas(const Dataset& train, const Dataset& test);

} // namespace nids
