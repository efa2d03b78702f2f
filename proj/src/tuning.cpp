#include "nids/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nids/csv.hpp"
#include "nids/rng.hpp"

namespace nids {

CvResult CvResult::from_folds(std::vector<double> folds) {
    if (folds.empty()) throw Error("CvResult: no folds");
    CvResult r;
    r.fold_accuracy = std::move(folds);
    double sum = 0.0;
    for (double a : r.fold_accuracy) sum += a;
    r.mean = sum / static_cast<double>(r.fold_accuracy.size());
    double ss = 0.0;
    for (double a : r.fold_accuracy) {
        double d = a - r.mean;
        ss += d * d;
    }
    r.stddev = std::sqrt(ss / static_cast<double>(r.fold_accuracy.size()));
    return r;
}

std::vector<std::size_t> cv_fold_assignment(const Dataset& d, std::size_t k, std::uint64_t seed) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.size(); ++i) by_class[d.records()[i].label].push_back(i);

    std::vector<std::size_t> fold_of(d.size(), 0);
    for (auto& [label, idx] : by_class) {
        if (idx.size() < k) {
            throw Error("cross_validate: class '" + label + "' has " + std::to_string(idx.size()) +
                        " records, fewer than k=" + std::to_string(k));
        }
        Rng rng(derive_seed_keyed(seed, "cv_fold", label));
        rng.shuffle(idx);
        for (std::size_t j = 0; j < idx.size(); ++j) fold_of[idx[j]] = j % k;
    }
    return fold_of;
}

CvResult cross_validate(const ClassifierSpec& spec, const Dataset& d, std::size_t k,
                        std::uint64_t seed) {
    if (k < 2) throw Error("cross_validate: k must be >= 2");
    std::vector<std::size_t> fold_of = cv_fold_assignment(d, k, seed);

    std::vector<double> fold_acc(k, 0.0);
    for (std::size_t fold = 0; fold < k; ++fold) {
        std::vector<FlowRecord> train_recs;
        std::vector<FlowRecord> test_recs;
        for (std::size_t i = 0; i < d.size(); ++i) {
            (fold_of[i] == fold ? test_recs : train_recs).push_back(d.records()[i]);
        }
        Dataset train = d.with_records(std::move(train_recs), "cv_train");
        Dataset test = d.with_records(std::move(test_recs), "cv_test");

        TrainedModel model = fit(spec.with_seed(derive_seed(seed, "cv_fit", fold)), train);
        BatchPrediction pred = predict_batch(model, test);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < test.size(); ++i) {
            if (pred.labels[i] == test.records()[i].label) ++hits;
        }
        fold_acc[fold] = static_cast<double>(hits) / static_cast<double>(test.size());
    }
    return CvResult::from_folds(std::move(fold_acc));
}

std::size_t HyperGrid::cell_count() const {
    if (values.empty()) return 0;
    std::size_t count = 1;
    for (const auto& [name, candidates] : values) {
        if (candidates.empty()) return 0;
        count *= candidates.size();
    }
    return count;
}

std::map<std::string, std::string> HyperGrid::cell(std::size_t index) const {
    std::map<std::string, std::string> out;
    // Odometer over sorted names, last name fastest.
    std::size_t radix = index;
    for (auto it = values.rbegin(); it != values.rend(); ++it) {
        const auto& [name, candidates] = *it;
        out[name] = candidates[radix % candidates.size()];
        radix /= candidates.size();
    }
    return out;
}

namespace {

std::string cell_key(const std::map<std::string, std::string>& params) {
    std::string key;
    for (const auto& [name, value] : params) {
        key += name;
        key += '=';
        key += value;
        key += ';';
    }
    return key;
}

} // namespace

GridSearchResult grid_search(Family family, const HyperGrid& grid, const Dataset& d,
                             double fraction, std::size_t k, std::uint64_t seed) {
    const std::size_t cells = grid.cell_count();
    if (cells == 0) throw Error("grid_search: empty grid");
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw Error("grid_search: fraction must be in (0,1]");
    }

    // One shared seeded subset keeps cells comparable.
    Dataset subset = [&] {
        if (fraction >= 1.0) return d;
        std::vector<FlowRecord> sampled;
        const std::uint64_t row_seed = derive_seed(seed, "grid_sample");
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (bernoulli_keep(row_seed, i, fraction)) sampled.push_back(d.records()[i]);
        }
        return d.with_records(std::move(sampled), "grid_sample");
    }();
    if (subset.empty()) throw Error("grid_search: sampled subset is empty");

    GridSearchResult result;
    result.table.reserve(cells);
    bool have_best = false;
    double best_mean = 0.0;

    for (std::size_t c = 0; c < cells; ++c) {
        GridCell cell;
        cell.params = grid.cell(c);
        const std::string key = cell_key(cell.params);
        try {
            ClassifierSpec spec =
                ClassifierSpec::make(family, cell.params, derive_seed_keyed(seed, "grid_spec", key));
            cell.cv = cross_validate(spec, subset, k, derive_seed_keyed(seed, "grid_cv", key));
            if (!have_best || cell.cv.mean > best_mean) {
                have_best = true;
                best_mean = cell.cv.mean;
                result.best = spec;
                result.best_index = c;
            }
        } catch (const Error& e) {
            cell.failed = true;
            cell.error = e.what();
        }
        result.table.push_back(std::move(cell));
    }
    if (!have_best) throw Error("grid_search: every grid cell failed");
    return result;
}

std::string GridSearchResult::table_csv(std::size_t k) const {
    std::string out;
    if (table.empty()) return out;
    for (const auto& [name, value] : table.front().params) {
        out += name;
        out += ',';
    }
    for (std::size_t i = 1; i <= k; ++i) out += "fold_" + std::to_string(i) + ",";
    out += "mean,std,error\n";
    for (const auto& cell : table) {
        for (const auto& [name, value] : cell.params) {
            out += value;
            out += ',';
        }
        if (cell.failed) {
            for (std::size_t i = 0; i < k + 2; ++i) out += ',';
            out += cell.error;
        } else {
            for (double a : cell.cv.fold_accuracy) {
                out += format_csv_value(a);
                out += ',';
            }
            out += format_csv_value(cell.cv.mean);
            out += ',';
            out += format_csv_value(cell.cv.stddev);
            out += ',';
        }
        out += '\n';
    }
    return out;
}

} // namespace nids
