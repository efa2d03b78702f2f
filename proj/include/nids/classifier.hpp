#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nids/dataset.hpp"

namespace nids {

enum class Family { decision_tree, random_forest, svm, naive_bayes, ann, dnn };

Family family_from_string(const std::string& s);
std::string to_string(Family f);
std::vector<Family> all_families();

// Declarative model description. make() validates hyperparameter names and
// ranges for the family and fills defaults, so a constructed spec is always
// complete.
struct ClassifierSpec {
    Family family = Family::decision_tree;
    std::map<std::string, std::string> hyperparameters; // complete after make()
    std::uint64_t seed = 0;

    static ClassifierSpec make(Family family,
                               const std::map<std::string, std::string>& overrides = {},
                               std::uint64_t seed = 0);
    static const std::map<std::string, std::string>& defaults(Family family);

    double num(const std::string& name) const;
    std::size_t count(const std::string& name) const;
    const std::string& str(const std::string& name) const;
    ClassifierSpec with_seed(std::uint64_t s) const;
};

// Dense numeric view used by every trainer: row-major features plus class
// ids. Class order is lexicographic over label text.
struct DesignMatrix {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> x;        // n * d, row-major
    std::vector<std::int32_t> y;  // class ids
    std::vector<std::string> classes;
    std::vector<std::string> feature_names;

    const double* row(std::size_t i) const { return x.data() + i * d; }
};

// Errors on missing/non-finite cells; optionally on single-class data.
DesignMatrix make_design(const Dataset& d, bool require_two_classes = true);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sigma;     // population form; 0 marks a constant feature
    std::vector<double> inv_sigma; // 0 for constant features, so they map to 0

    static Standardizer fit(const DesignMatrix& m);
    void apply_row(const double* in, double* out) const;
    std::vector<double> apply_matrix(const std::vector<double>& x, std::size_t n,
                                     std::size_t d) const;
};

// Spec-level standardize ops on Datasets.
Standardizer standardize_fit(const Dataset& train);
Dataset standardize_apply(const Standardizer& s, const Dataset& d);

struct TrainedModel; // defined in classifier.cpp's header section below

struct BatchPrediction {
    std::vector<std::string> labels;
    double elapsed_seconds = 0.0;
};

// --- fitted state containers (one per family) ---

struct TreeNodeRec {
    // feature < 0 marks a leaf
    std::int32_t feature = -1;
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<std::uint64_t> counts; // leaf class counts
    std::int32_t majority = 0;
};

struct TreeState {
    std::vector<TreeNodeRec> nodes; // node 0 is the root
    std::vector<double> raw_importance; // per feature, unnormalized MDI
};

struct ForestState {
    std::vector<TreeState> trees;
};

struct SvmState {
    std::vector<double> w;
    double bias = 0.0;
    double lambda = 0.0;
};

struct NaiveBayesState {
    std::string variant; // gaussian | bernoulli
    std::vector<double> log_prior;            // per class
    std::vector<double> mean;                 // class-major [c*d + j] (gaussian)
    std::vector<double> variance;             // class-major, floored (gaussian)
    std::vector<double> median;               // per feature (bernoulli)
    std::vector<double> log_p1;               // class-major log P(x_j=1|c) (bernoulli)
    std::vector<double> log_p0;               // class-major log P(x_j=0|c) (bernoulli)
};

struct MlpLayerState {
    std::size_t out = 0;
    std::size_t in = 0;
    std::vector<double> w; // out x in, row-major
    std::vector<double> b; // out
    std::string activation; // relu | sigmoid | identity | softmax
};

struct MlpState {
    std::vector<MlpLayerState> layers;
};

struct TrainedModel {
    ClassifierSpec spec;
    std::vector<std::string> classes;       // deterministic label order
    std::vector<std::string> feature_names; // training schema
    std::optional<Standardizer> standardizer;
    double fit_seconds = 0.0;
    std::size_t n_train = 0;

    // exactly one is populated, per spec.family
    std::optional<TreeState> tree;
    std::optional<ForestState> forest;
    std::optional<SvmState> svm;
    std::optional<NaiveBayesState> nb;
    std::optional<MlpState> mlp;
};

TrainedModel fit(const ClassifierSpec& spec, const Dataset& train);

std::string predict(const TrainedModel& m, const FlowRecord& record);
BatchPrediction predict_batch(const TrainedModel& m, const Dataset& d);

// Versioned deterministic JSON serialization; round-trips bit-exactly.
std::string model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& m, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

} // namespace nids
