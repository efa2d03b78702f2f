#pragma once

#include <cstdint>
#include <vector>

#include "nids/dataset.hpp"

namespace nids {

// Deterministic class-conditional Gaussian generator with controllable drift
// between the train and test draws. Labels are "benign"/"malicious".
struct SynthConfig {
    std::size_t n_records = 0;   // per generated dataset
    std::size_t n_features = 0;
    double class_balance = 0.5;  // benign fraction; benign gets the rounded share

    // Per-class, per-feature distribution parameters (size n_features).
    std::vector<double> benign_mean;
    std::vector<double> malicious_mean;
    std::vector<double> benign_scale;
    std::vector<double> malicious_scale;

    struct Drift {
        std::vector<double> mean_shift;   // added to both class means on the test side
        double prior_shift = -1.0;        // test-side benign fraction; < 0 keeps class_balance
        double rotation_angle = 0.0;      // radians, applied to feature pairs (0,1),(2,3),...
    } drift;

    std::uint64_t seed = 0;

    // Benign at the origin, malicious shifted by `separation` on the first
    // `informative` features, unit scales everywhere.
    static SynthConfig basic(std::size_t n_records, std::size_t n_features, std::size_t informative,
                             double separation, std::uint64_t seed);

    void validate() const;
};

std::pair<Dataset, Dataset> generate_pair(const SynthConfig& cfg);

} // namespace nids
