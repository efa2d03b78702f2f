// nids: cross-dataset evaluation toolkit for flow-based intrusion detection
// models. Exit codes: 0 success, 1 usage error, 2 data/stage error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "nids/csv.hpp"
#include "nids/evaluation.hpp"
#include "nids/experiment.hpp"
#include "nids/feature_select.hpp"
#include "nids/preprocess.hpp"
#include "nids/rng.hpp"
#include "nids/synthgen.hpp"
#include "nids/tuning.hpp"

namespace fs = std::filesystem;
using namespace nids;

namespace {

bool g_quiet = false;

void say(const std::string& line) {
    if (!g_quiet) std::cout << line << "\n";
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path.string());
    out << text;
}

std::map<std::string, std::string> parse_hp(const std::vector<std::string>& kvs) {
    std::map<std::string, std::string> out;
    for (const auto& kv : kvs) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error("--hp expects name=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

std::string distribution_text(const ClassDistribution& dist) {
    std::string out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-28s %12s %10s\n", "class", "count", "percent");
    out += buf;
    for (const auto& e : dist.entries) {
        std::snprintf(buf, sizeof buf, "%-28s %12zu %9.4f%%\n", e.label.c_str(), e.count,
                      e.percent * 100.0);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "%-28s %12zu\n", "total", dist.total);
    out += buf;
    return out;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"flow-classifier cross-dataset evaluation toolkit"};
    app.require_subcommand(1);
    app.add_flag("--quiet", g_quiet, "suppress progress output");

    // --- inspect ---
    std::string in_csv;
    std::string label_column = "label";
    double fraction = 1.0;
    std::uint64_t seed = 0;
    auto* inspect = app.add_subcommand("inspect", "class distribution and cleaning preview");
    inspect->add_option("csv", in_csv, "input CSV")->required();
    inspect->add_option("--label", label_column, "label column name");
    inspect->add_option("--fraction", fraction, "row sampling fraction in (0,1]");
    inspect->add_option("--seed", seed, "sampling seed");
    inspect->callback([&] {
        Dataset d = load_csv(in_csv, label_column, fraction, seed);
        std::cout << distribution_text(class_distribution(d));
        auto [cleaned, report] = clean(d);
        std::cout << "clean preview: dropped_missing=" << report.dropped_missing
                  << " dropped_nonfinite=" << report.dropped_nonfinite
                  << " dropped_duplicates=" << report.dropped_duplicates
                  << " remaining=" << report.remaining << "\n";
    });

    // --- preprocess ---
    std::string out_dir = "out";
    std::vector<std::string> drop_classes;
    std::uint64_t cap = 0;
    double ratio = 0.0;
    std::string benign = "benign";
    std::string merged;
    auto* prep = app.add_subcommand("preprocess", "clean/drop/downsample/binarize to a new CSV");
    prep->add_option("csv", in_csv, "input CSV")->required();
    prep->add_option("--label", label_column, "label column name");
    prep->add_option("--fraction", fraction, "row sampling fraction in (0,1]");
    prep->add_option("--seed", seed, "seed");
    prep->add_option("--out", out_dir, "output directory");
    prep->add_option("--drop", drop_classes, "class label to drop (repeatable)");
    prep->add_option("--cap", cap, "per-class cap (0 = none)");
    prep->add_option("--ratio", ratio, "benign:malicious target ratio (0 = none)");
    prep->add_option("--benign", benign, "benign label");
    prep->add_option("--merge-as", merged, "binarize: merge non-benign under this label");
    prep->callback([&] {
        Dataset d = load_csv(in_csv, label_column, fraction, seed);
        fs::create_directories(out_dir);
        auto [cleaned, report] = clean(d);
        d = std::move(cleaned);
        for (const auto& label : drop_classes) d = drop_class(d, label);
        if (cap > 0 || ratio > 0.0) {
            ResamplePolicy policy;
            if (cap > 0) policy.per_class_cap = cap;
            if (ratio > 0.0) policy.benign_ratio = ratio;
            policy.benign_label = benign;
            policy.seed = derive_seed(seed, "downsample");
            d = downsample(d, policy);
        }
        if (!merged.empty()) d = binarize_labels(d, benign, merged);
        write_csv(d, fs::path(out_dir) / "preprocessed.csv");
        write_file(fs::path(out_dir) / "clean_report.txt",
                   "dropped_missing=" + std::to_string(report.dropped_missing) +
                       "\ndropped_nonfinite=" + std::to_string(report.dropped_nonfinite) +
                       "\ndropped_duplicates=" + std::to_string(report.dropped_duplicates) +
                       "\nremaining=" + std::to_string(report.remaining) + "\n");
        write_file(fs::path(out_dir) / "distribution.txt",
                   distribution_text(class_distribution(d)));
        say("wrote " + (fs::path(out_dir) / "preprocessed.csv").string());
    });

    // --- rank-features ---
    std::vector<std::string> exclusions;
    std::uint64_t trees = 50;
    double rank_fraction = 0.1;
    auto* rank = app.add_subcommand("rank-features", "random-forest impurity importance ranking");
    rank->add_option("csv", in_csv, "input CSV")->required();
    rank->add_option("--label", label_column, "label column name");
    rank->add_option("--exclude", exclusions, "feature to exclude (repeatable)");
    rank->add_option("--trees", trees, "forest size");
    rank->add_option("--fraction", rank_fraction, "training fraction");
    rank->add_option("--seed", seed, "seed");
    rank->add_option("--out", out_dir, "output directory");
    rank->callback([&] {
        Dataset d = load_csv(in_csv, label_column);
        ClassifierSpec forest = ClassifierSpec::make(Family::random_forest,
                                                     {{"n_trees", std::to_string(trees)}}, 0);
        FeatureRanking ranking = rank_features(
            d, forest, std::set<std::string>(exclusions.begin(), exclusions.end()), rank_fraction,
            seed);
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "importances.csv", ranking.to_csv());
        say("wrote " + (fs::path(out_dir) / "importances.csv").string());
    });

    // --- curve ---
    std::string ranking_csv;
    std::uint64_t max_k = 0;
    std::vector<std::string> families_arg;
    auto* curve_cmd = app.add_subcommand("curve", "per-model accuracy vs top-k features");
    curve_cmd->add_option("csv", in_csv, "input CSV")->required();
    curve_cmd->add_option("--label", label_column, "label column name");
    curve_cmd->add_option("--ranking", ranking_csv, "importances.csv from rank-features")
        ->required();
    curve_cmd->add_option("--max-k", max_k, "largest feature count (0 = all)");
    curve_cmd->add_option("--families", families_arg, "model families (default: all)")
        ->delimiter(',');
    curve_cmd->add_option("--seed", seed, "seed");
    curve_cmd->add_option("--out", out_dir, "output directory");
    curve_cmd->callback([&] {
        Dataset d = load_csv(in_csv, label_column);
        FeatureRanking ranking;
        {
            std::ifstream in(ranking_csv);
            if (!in) throw Error("cannot open ranking file: " + ranking_csv);
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                auto comma = line.rfind(',');
                ranking.items.push_back(
                    {line.substr(0, comma), std::stod(line.substr(comma + 1))});
            }
        }
        std::vector<ClassifierSpec> specs;
        std::vector<Family> fams;
        if (families_arg.empty()) {
            fams = all_families();
        } else {
            for (const auto& name : families_arg) fams.push_back(family_from_string(name));
        }
        for (Family f : fams) specs.push_back(ClassifierSpec::make(f));
        std::size_t k = max_k == 0 ? ranking.items.size() : max_k;
        AccuracyCurve curve = accuracy_curve(d, ranking, specs, k, seed);
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "curve.csv", curve.to_csv());
        say("wrote " + (fs::path(out_dir) / "curve.csv").string());
    });

    // --- cv ---
    std::string family_arg = "decision_tree";
    std::vector<std::string> hp;
    std::uint64_t k_folds = 5;
    auto* cv_cmd = app.add_subcommand("cv", "stratified k-fold cross-validation");
    cv_cmd->add_option("csv", in_csv, "input CSV")->required();
    cv_cmd->add_option("--label", label_column, "label column name");
    cv_cmd->add_option("--family", family_arg, "model family");
    cv_cmd->add_option("--hp", hp, "hyperparameter name=value (repeatable)");
    cv_cmd->add_option("--k", k_folds, "fold count");
    cv_cmd->add_option("--seed", seed, "seed");
    cv_cmd->callback([&] {
        Dataset d = load_csv(in_csv, label_column);
        ClassifierSpec spec = ClassifierSpec::make(family_from_string(family_arg), parse_hp(hp), seed);
        CvResult cv = cross_validate(spec, d, k_folds, seed);
        std::cout << "folds:";
        for (double a : cv.fold_accuracy) std::cout << " " << a;
        std::cout << "\nmean: " << cv.mean << "\nstd: " << cv.stddev << "\n";
    });

    // --- tune ---
    std::vector<std::string> grid_arg;
    double tune_fraction = 0.25;
    auto* tune = app.add_subcommand("tune", "grid search over hyperparameters");
    tune->add_option("csv", in_csv, "input CSV")->required();
    tune->add_option("--label", label_column, "label column name");
    tune->add_option("--family", family_arg, "model family");
    tune->add_option("--grid", grid_arg, "name=v1,v2,... (repeatable)")->required();
    tune->add_option("--fraction", tune_fraction, "CV subset fraction");
    tune->add_option("--k", k_folds, "fold count");
    tune->add_option("--seed", seed, "seed");
    tune->add_option("--out", out_dir, "output directory");
    tune->callback([&] {
        Dataset d = load_csv(in_csv, label_column);
        HyperGrid grid;
        for (const auto& kv : grid_arg) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error("--grid expects name=v1,v2,...");
            std::string name = kv.substr(0, eq);
            std::string values = kv.substr(eq + 1);
            std::vector<std::string> list;
            std::size_t start = 0;
            while (start <= values.size()) {
                auto comma = values.find(',', start);
                list.push_back(values.substr(
                    start, comma == std::string::npos ? std::string::npos : comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            grid.values[name] = list;
        }
        GridSearchResult gs =
            grid_search(family_from_string(family_arg), grid, d, tune_fraction, k_folds, seed);
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "grid.csv", gs.table_csv(k_folds));
        std::cout << "best:";
        for (const auto& [name, value] : gs.best.hyperparameters) {
            std::cout << " " << name << "=" << value;
        }
        std::cout << "\nmean accuracy: " << gs.table[gs.best_index].cv.mean << "\n";
    });

    // --- train ---
    std::string model_out = "model.json";
    auto* train_cmd = app.add_subcommand("train", "fit a model and save it");
    train_cmd->add_option("csv", in_csv, "input CSV")->required();
    train_cmd->add_option("--label", label_column, "label column name");
    train_cmd->add_option("--family", family_arg, "model family");
    train_cmd->add_option("--hp", hp, "hyperparameter name=value (repeatable)");
    train_cmd->add_option("--seed", seed, "seed");
    train_cmd->add_option("--model-out", model_out, "output model file");
    train_cmd->callback([&] {
        Dataset d = load_csv(in_csv, label_column);
        ClassifierSpec spec = ClassifierSpec::make(family_from_string(family_arg), parse_hp(hp), seed);
        TrainedModel model = fit(spec, d);
        save_model(model, model_out);
        say("wrote " + model_out);
    });

    // --- evaluate ---
    std::string model_path;
    std::string holdout_csv;
    std::string test_csv;
    auto* eval_cmd = app.add_subcommand("evaluate", "train/test metrics and the overfit gap");
    eval_cmd->add_option("--model", model_path, "model file")->required();
    eval_cmd->add_option("--train-holdout", holdout_csv, "held-out training-side CSV")->required();
    eval_cmd->add_option("--test", test_csv, "test-side CSV (optional)");
    eval_cmd->add_option("--label", label_column, "label column name");
    eval_cmd->add_option("--out", out_dir, "output directory");
    eval_cmd->callback([&] {
        TrainedModel model = load_model(model_path);
        Dataset holdout = load_csv(holdout_csv, label_column);
        EvaluationReport report = test_csv.empty()
                                      ? evaluate(model, holdout)
                                      : evaluate(model, holdout, load_csv(test_csv, label_column));
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / ("eval_" + report.model + ".json"), report.to_json());
        std::cout << "train accuracy: " << report.train_metrics.accuracy << "\n";
        if (report.has_test) {
            std::cout << "test accuracy: " << report.test_metrics.accuracy << "\n"
                      << "accuracy gap: " << report.gap.accuracy << "\n";
        }
    });

    // --- compare ---
    std::vector<std::string> report_files;
    auto* compare_cmd = app.add_subcommand("compare", "rank evaluation reports");
    compare_cmd->add_option("reports", report_files, "eval_*.json files")->required();
    compare_cmd->add_option("--out", out_dir, "output directory");
    compare_cmd->callback([&] {
        std::vector<EvaluationReport> reports;
        for (const auto& file : report_files) {
            std::ifstream in(file);
            if (!in) throw Error("cannot open report: " + file);
            std::ostringstream ss;
            ss << in.rdbuf();
            auto j = nlohmann::json::parse(ss.str());
            EvaluationReport r;
            r.model = j.at("model").get<std::string>();
            r.train_metrics.accuracy = j.at("train").at("accuracy").get<double>();
            r.has_test = j.contains("test");
            if (r.has_test) {
                r.test_metrics.accuracy = j.at("test").at("accuracy").get<double>();
                r.gap.accuracy = j.at("gap").at("accuracy").get<double>();
            }
            r.timing.fit_s = j.at("timing").at("fit_s").get<double>();
            r.timing.predict_s = j.at("timing").at("predict_s").get<double>();
            reports.push_back(std::move(r));
        }
        ComparisonTable table = compare_models(reports);
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "comparison.csv", table.to_csv());
        write_file(fs::path(out_dir) / "comparison.json", table.to_json());
        std::cout << table.to_csv();
    });

    // --- synth ---
    std::uint64_t n_records = 20000;
    std::uint64_t n_features = 10;
    std::uint64_t informative = 3;
    double balance = 0.5;
    double separation = 2.0;
    double drift_shift = 0.0;
    double prior_shift = -1.0;
    double rotate = 0.0;
    auto* synth = app.add_subcommand("synth", "deterministic synthetic train/test pair");
    synth->add_option("--out", out_dir, "output directory");
    synth->add_option("--n", n_records, "records per dataset");
    synth->add_option("--features", n_features, "feature count");
    synth->add_option("--informative", informative, "features carrying class signal");
    synth->add_option("--balance", balance, "benign fraction");
    synth->add_option("--separation", separation, "class mean separation");
    synth->add_option("--drift-shift", drift_shift, "test-side mean shift on informative features");
    synth->add_option("--prior-shift", prior_shift, "test-side benign fraction (<0 keeps balance)");
    synth->add_option("--rotate", rotate, "test-side rotation angle (radians)");
    synth->add_option("--seed", seed, "seed");
    synth->callback([&] {
        SynthConfig cfg = SynthConfig::basic(n_records, n_features, informative, separation, seed);
        cfg.class_balance = balance;
        if (drift_shift != 0.0) {
            cfg.drift.mean_shift.assign(n_features, 0.0);
            for (std::size_t j = 0; j < informative && j < n_features; ++j) {
                cfg.drift.mean_shift[j] = drift_shift;
            }
        }
        cfg.drift.prior_shift = prior_shift;
        cfg.drift.rotation_angle = rotate;
        auto [train, test] = generate_pair(cfg);
        fs::create_directories(out_dir);
        write_csv(train, fs::path(out_dir) / "train.csv");
        write_csv(test, fs::path(out_dir) / "test.csv");
        say("wrote " + (fs::path(out_dir) / "train.csv").string() + " and test.csv");
    });

    // --- run ---
    std::string config_path;
    std::string out_override;
    bool have_seed_override = false;
    std::uint64_t seed_override = 0;
    auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
    run_cmd->add_option("config", config_path, "experiment config file")->required();
    run_cmd->add_option("--out", out_override, "override output directory");
    run_cmd->add_option("--seed", seed_override, "override master seed")
        ->each([&](const std::string&) { have_seed_override = true; });
    run_cmd->callback([&] {
        if (!fs::exists(config_path)) {
            // Usage-class error by contract.
            throw CLI::ValidationError("run", "config file not found: " + config_path);
        }
        ExperimentConfig cfg = ExperimentConfig::load(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (have_seed_override) cfg.seed = seed_override;
        RunResult result = run_experiment(cfg);
        say("run directory: " + result.run_dir.string());
        say("chosen k: " + std::to_string(result.chosen_k));
        if (!g_quiet) std::cout << result.comparison.to_csv();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1; // usage error contract
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
