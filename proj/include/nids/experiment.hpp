#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nids/evaluation.hpp"
#include "nids/preprocess.hpp"
#include "nids/tuning.hpp"

namespace nids {

// Declarative description of one full run. Parsed from a flat INI-style file
// ([section] headers, key = value lines, '#'/';' full-line comments). The
// digest is computed over a canonical serialization of the effective field
// set, so formatting and key order do not affect it but every field does.
struct ExperimentConfig {
    struct DataSource {
        std::string path;
        std::string label_column = "label";
        double fraction = 1.0;
    };

    std::uint64_t seed = 0;
    std::string out_dir = "run";

    DataSource train;
    std::optional<DataSource> test;

    // preprocess block (applied to both sides)
    bool do_clean = true;
    std::vector<std::string> drop_classes;
    std::optional<std::size_t> per_class_cap;
    std::optional<double> ratio; // benign : sum(non-benign)
    std::string benign_label = "benign";
    bool binarize = false;
    std::string merged_label = "malicious";

    // feature-selection block
    std::vector<std::string> exclusions;
    double ranking_fraction = 0.10;
    std::size_t ranking_trees = 50;
    std::size_t max_k = 0; // 0 = use every ranked feature
    double tolerance = 0.002;
    double curve_holdout = 0.7;

    // model block
    std::vector<Family> families; // defaults to all six
    std::map<std::string, HyperGrid> grids; // keyed by family name

    // validation block
    std::size_t cv_k = 5;
    double grid_fraction = 0.25;
    std::size_t grid_k = 3;

    // evaluation block
    double holdout_fraction = 0.7;

    std::string raw_text; // verbatim input, written to config.copy

    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::filesystem::path& path);
    std::string canonical_text() const;
    std::string digest() const; // 16 hex chars
};

struct RunResult {
    std::filesystem::path run_dir;
    std::size_t chosen_k = 0;
    std::vector<std::string> selected_features;
    std::vector<EvaluationReport> reports;
    ComparisonTable comparison;
};

// Executes the whole pipeline (load, align, clean, resample/relabel, rank,
// curve, choose k, grid search, cross-validate winners, final fit, evaluate)
// and writes every artifact under cfg.out_dir. Stage errors are rethrown
// with the stage name.
RunResult run_experiment(const ExperimentConfig& cfg);

} // namespace nids
