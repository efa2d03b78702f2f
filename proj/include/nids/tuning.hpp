#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nids/classifier.hpp"
#include "nids/dataset.hpp"

namespace nids {

struct CvResult {
    std::vector<double> fold_accuracy;
    double mean = 0.0;
    double stddev = 0.0; // population form (divide by k)

    static CvResult from_folds(std::vector<double> folds);
};

// Stratified fold ids (per class: seeded shuffle, then round-robin deal).
// Depends only on labels, record order and the seed.
std::vector<std::size_t> cv_fold_assignment(const Dataset& d, std::size_t k, std::uint64_t seed);

// Seeded stratified k-fold cross-validation; iteration i trains on all folds
// but i and tests on fold i.
CvResult cross_validate(const ClassifierSpec& spec, const Dataset& d, std::size_t k,
                        std::uint64_t seed);

struct HyperGrid {
    // name -> ordered candidate values; cells enumerate as an odometer over
    // the (sorted) names, last name fastest.
    std::map<std::string, std::vector<std::string>> values;

    std::size_t cell_count() const;
    std::map<std::string, std::string> cell(std::size_t index) const;
};

struct GridCell {
    std::map<std::string, std::string> params;
    CvResult cv;
    bool failed = false;
    std::string error;
};

struct GridSearchResult {
    ClassifierSpec best;
    std::size_t best_index = 0;
    std::vector<GridCell> table;

    std::string table_csv(std::size_t k) const;
};

// Evaluates every cell by cross_validate on one seeded Bernoulli fraction of
// d. Best = highest mean accuracy, ties to the earliest cell. A failing cell
// is recorded and skipped; all cells failing is an error. Per-cell seeds
// derive from cell contents so a reduced grid reproduces the winner exactly.
GridSearchResult grid_search(Family family, const HyperGrid& grid, const Dataset& d,
                             double fraction, std::size_t k, std::uint64_t seed);

} // namespace nids
