#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nids/csv.hpp"
#include "nids/experiment.hpp"
#include "nids/rng.hpp"
#include "nids/synthgen.hpp"

using namespace nids;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Tiny but complete pipeline config over a synthetic pair.
std::string tiny_config(const fs::path& dir, const fs::path& out, bool with_test) {
    std::ostringstream cfg;
    cfg << "[experiment]\nseed = 11\nout = " << out.string() << "\n\n"
        << "[train]\npath = " << (dir / "train.csv").string() << "\nlabel_column = label\n\n";
    if (with_test) {
        cfg << "[test]\npath = " << (dir / "test.csv").string() << "\n\n";
    }
    cfg << "[preprocess]\nclean = true\n\n"
        << "[features]\nranking_fraction = 0.8\nranking_trees = 10\nmax_k = 2\n\n"
        << "[models]\nfamilies = decision_tree,naive_bayes\n\n"
        << "[grid.decision_tree]\nmax_depth = 3,5\n\n"
        << "[validation]\nk = 2\ngrid_fraction = 0.8\ngrid_k = 2\n\n"
        << "[evaluation]\nholdout_fraction = 0.7\n";
    return cfg.str();
}

fs::path make_synth_csvs(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("nids_exp_" + tag);
    fs::create_directories(dir);
    SynthConfig cfg = SynthConfig::basic(600, 4, 2, 2.5, 3);
    auto [train, test] = generate_pair(cfg);
    write_csv(train, dir / "train.csv");
    write_csv(test, dir / "test.csv");
    return dir;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing fills defaults and validates") {
    ExperimentConfig cfg = ExperimentConfig::parse(
        "[train]\npath = a.csv\nlabel_column = Label\nfraction = 0.5\n"
        "[preprocess]\nper_class_cap = 100000\nratio = 1.0\nbinarize = true\n"
        "[grid.svm]\nlambda = 1e-4,1e-3\n");
    CHECK(cfg.train.path == "a.csv");
    CHECK(cfg.train.label_column == "Label");
    CHECK(cfg.train.fraction == 0.5);
    CHECK_FALSE(cfg.test.has_value());
    CHECK(cfg.per_class_cap == 100000);
    CHECK(cfg.ratio == 1.0);
    CHECK(cfg.binarize);
    CHECK(cfg.families.size() == 6); // default: all
    CHECK(cfg.grids.at("svm").values.at("lambda").size() == 2);
    CHECK(cfg.cv_k == 5);
    CHECK(cfg.tolerance == 0.002);
    CHECK(cfg.ranking_fraction == 0.10);

    CHECK_THROWS_AS(ExperimentConfig::parse("[nope]\nx = 1\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("[train]\nlabel_column = L\n"), Error);
    CHECK_THROWS_AS(ExperimentConfig::parse("[train]\npath = a\nbad line\n"), Error);
}

TEST_CASE("digest ignores formatting but tracks every field") {
    std::string base = "[train]\npath = a.csv\n[experiment]\nseed = 5\n";
    std::string reordered = "[experiment]\nseed = 5\n# comment\n[train]\npath =    a.csv\n";
    CHECK(ExperimentConfig::parse(base).digest() == ExperimentConfig::parse(reordered).digest());

    std::string changed = "[train]\npath = a.csv\n[experiment]\nseed = 6\n";
    CHECK(ExperimentConfig::parse(base).digest() != ExperimentConfig::parse(changed).digest());

    std::string grid = base + "[grid.ann]\nepochs = 5\n";
    CHECK(ExperimentConfig::parse(base).digest() != ExperimentConfig::parse(grid).digest());
}

TEST_CASE("full pipeline emits every artifact and an ordered comparison") {
    fs::path dir = make_synth_csvs("full");
    fs::path out = dir / "run";
    ExperimentConfig cfg = ExperimentConfig::parse(tiny_config(dir, out, true));
    RunResult result = run_experiment(cfg);

    CHECK(result.chosen_k >= 1);
    CHECK(result.chosen_k <= 2);
    REQUIRE(result.reports.size() == 2);
    CHECK(result.comparison.rows.size() == 2);

    for (const char* f : {"config.copy", "reports/run_summary.json", "reports/comparison.json",
                          "reports/preprocess_train.json", "reports/preprocess_test.json",
                          "reports/eval_decision_tree.json", "reports/eval_naive_bayes.json",
                          "tables/comparison.csv", "tables/cv_winners.csv",
                          "tables/grid_decision_tree.csv", "tables/grid_naive_bayes.csv",
                          "plots/importances.csv", "plots/curve.csv", "plots/timing.csv",
                          "plots/confusion_decision_tree_train.csv",
                          "plots/confusion_decision_tree_test.csv"}) {
        CHECK_MESSAGE(fs::exists(out / f), f);
    }

    auto j = nlohmann::json::parse(slurp(out / "reports" / "eval_decision_tree.json"));
    CHECK(j["config_digest"] == cfg.digest());
    CHECK(j["seed"] == 11);
    CHECK(j["train"]["accuracy"].is_number());
    CHECK(j["gap"]["accuracy"].is_number());

    // zero-drift synthetic pair: the tree should generalize
    for (const auto& row : result.comparison.rows) {
        CHECK(std::abs(row.accuracy_gap) < 0.12);
    }
}

TEST_CASE("missing test section runs the within-dataset path") {
    fs::path dir = make_synth_csvs("degraded");
    fs::path out = dir / "run_degraded";
    ExperimentConfig cfg = ExperimentConfig::parse(tiny_config(dir, out, false));
    RunResult result = run_experiment(cfg);
    for (const auto& r : result.reports) CHECK_FALSE(r.has_test);
    auto j = nlohmann::json::parse(slurp(out / "reports" / "eval_decision_tree.json"));
    CHECK_FALSE(j.contains("gap"));
    CHECK_FALSE(j.contains("test"));
    CHECK_FALSE(fs::exists(out / "plots/confusion_decision_tree_test.csv"));
}

TEST_CASE("two runs with the same config differ only in timing fields") {
    fs::path dir = make_synth_csvs("determinism");
    ExperimentConfig cfg1 = ExperimentConfig::parse(tiny_config(dir, dir / "r1", true));
    ExperimentConfig cfg2 = ExperimentConfig::parse(tiny_config(dir, dir / "r1", true));
    cfg2.out_dir = (dir / "r2").string();
    run_experiment(cfg1);
    run_experiment(cfg2);

    auto mask_eval = [](std::string text) {
        auto j = nlohmann::json::parse(text);
        j.erase("timing");
        return j.dump();
    };
    for (const char* f :
         {"reports/eval_decision_tree.json", "reports/eval_naive_bayes.json"}) {
        CHECK(mask_eval(slurp(dir / "r1" / f)) == mask_eval(slurp(dir / "r2" / f)));
    }
    for (const char* f :
         {"plots/importances.csv", "plots/curve.csv", "tables/cv_winners.csv",
          "tables/grid_decision_tree.csv", "reports/preprocess_train.json",
          "reports/run_summary.json", "plots/confusion_decision_tree_test.csv"}) {
        CHECK(slurp(dir / "r1" / f) == slurp(dir / "r2" / f));
    }
}

TEST_CASE("drop/cap/ratio/binarize flow through the pipeline with exact counts") {
    fs::path dir = fs::temp_directory_path() / "nids_exp_prep";
    fs::create_directories(dir);

    // 400 benign + 150 malicious-style rows + 50 outliers, three features
    Schema schema{{"f0", "f1", "f2"}, "label"};
    std::vector<FlowRecord> recs;
    Rng rng(5);
    auto add = [&](std::size_t n, double shift, const std::string& label) {
        for (std::size_t i = 0; i < n; ++i) {
            recs.push_back({{rng.gaussian() + shift, rng.gaussian() + shift, rng.gaussian()},
                            label});
        }
    };
    add(400, 0.0, "benign");
    add(150, 2.5, "attack_a");
    add(50, -2.0, "outlier");
    write_csv(Dataset(schema, recs, "prep"), dir / "train.csv");

    std::ostringstream cfg_text;
    cfg_text << "[experiment]\nseed = 2\nout = " << (dir / "out").string() << "\n"
             << "[train]\npath = " << (dir / "train.csv").string() << "\nlabel_column = label\n"
             << "[preprocess]\nclean = true\ndrop_classes = outlier\nper_class_cap = 120\n"
             << "ratio = 1.0\nbenign_label = benign\nbinarize = true\nmerged_label = malicious\n"
             << "[features]\nranking_trees = 8\nranking_fraction = 1.0\nmax_k = 2\n"
             << "[models]\nfamilies = decision_tree\n"
             << "[validation]\nk = 2\ngrid_k = 2\ngrid_fraction = 1.0\n";
    ExperimentConfig cfg = ExperimentConfig::parse(cfg_text.str());
    run_experiment(cfg);

    auto audit = nlohmann::json::parse(slurp(dir / "out" / "reports" / "preprocess_train.json"));
    CHECK(audit["distribution_before"]["total"] == 600);
    // after: outliers dropped, attack capped 150 -> 120, benign shrunk to 120
    CHECK(audit["distribution_after"]["total"] == 240);
    for (const auto& entry : audit["distribution_after"]["classes"]) {
        CHECK(entry["count"] == 120);
        CHECK((entry["label"] == "benign" || entry["label"] == "malicious"));
    }
}

TEST_CASE("stage errors name the stage") {
    fs::path dir = make_synth_csvs("stageerr");
    std::string cfg_text = "[train]\npath = " + (dir / "train.csv").string() +
                           "\nlabel_column = not_a_column\n";
    ExperimentConfig cfg = ExperimentConfig::parse(cfg_text);
    cfg.out_dir = (dir / "err").string();
    CHECK_THROWS_WITH_AS(run_experiment(cfg), doctest::Contains("stage load_train"), Error);
}

} // TEST_SUITE
