#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace std;
namespace fs = std::filesystem;

namespace {

#ifndef NIDS_CLI_PATH
#error "NIDS_CLI_PATH must point at the built binary"
#endif

int run(const std::string& args, const fs::path& stdout_file = {}) {
    std::string cmd = std::string(NIDS_CLI_PATH) + " " + args;
    if (!stdout_file.empty()) {
        cmd += " > " + stdout_file.string() + " 2>&1";
    } else {
        cmd += " > /dev/null 2>&1";
    }
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("nids_cli_" + tag);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("inspect prints a distribution table and exits 0") {
    fs::path dir = temp_dir("inspect");
    std::ofstream(dir / "t.csv") << "a,b,label\n1,2,x\n3,4,y\n5,6,x\n";
    fs::path out = dir / "out.txt";
    CHECK(run("inspect " + (dir / "t.csv").string() + " --label label", out) == 0);
    std::string text = slurp(out);
    CHECK(text.find("class") != std::string::npos);
    CHECK(text.find("clean preview") != std::string::npos);
}

TEST_CASE("usage errors exit 1, data errors exit 2") {
    CHECK(run("definitely-not-a-subcommand") == 1);
    CHECK(run("inspect --nonsense-flag x.csv") == 1);
    CHECK(run("run /nonexistent/config.ini") == 1);
    CHECK(run("inspect /nonexistent/file.csv --label label") == 2);

    fs::path dir = temp_dir("exit2");
    std::ofstream(dir / "t.csv") << "a,label\n1,x\n2,y\n";
    CHECK(run("inspect " + (dir / "t.csv").string() + " --label WRONG") == 2);
}

TEST_CASE("synth is deterministic per seed") {
    fs::path a = temp_dir("synth_a");
    fs::path b = temp_dir("synth_b");
    CHECK(run("synth --seed 7 --n 300 --features 4 --out " + a.string()) == 0);
    CHECK(run("synth --seed 7 --n 300 --features 4 --out " + b.string()) == 0);
    CHECK(slurp(a / "train.csv") == slurp(b / "train.csv"));
    CHECK(slurp(a / "test.csv") == slurp(b / "test.csv"));
    CHECK(slurp(a / "train.csv") != slurp(a / "test.csv"));
}

TEST_CASE("preprocess, rank-features, train, evaluate chain together") {
    fs::path dir = temp_dir("chain");
    REQUIRE(run("synth --seed 3 --n 400 --features 4 --informative 2 --separation 2.5 --out " +
                dir.string()) == 0);

    CHECK(run("preprocess " + (dir / "train.csv").string() +
              " --label label --merge-as malicious --benign benign --out " +
              (dir / "prep").string()) == 0);
    CHECK(fs::exists(dir / "prep" / "preprocessed.csv"));
    CHECK(fs::exists(dir / "prep" / "clean_report.txt"));

    CHECK(run("rank-features " + (dir / "train.csv").string() +
              " --label label --trees 10 --fraction 0.9 --out " + (dir / "rank").string()) == 0);
    std::string importances = slurp(dir / "rank" / "importances.csv");
    CHECK(importances.rfind("feature,importance", 0) == 0);

    CHECK(run("curve " + (dir / "train.csv").string() + " --label label --ranking " +
              (dir / "rank" / "importances.csv").string() +
              " --max-k 2 --families decision_tree,naive_bayes --out " +
              (dir / "curve").string()) == 0);
    CHECK(slurp(dir / "curve" / "curve.csv").rfind("model,k,accuracy", 0) == 0);

    CHECK(run("train " + (dir / "train.csv").string() +
              " --label label --family decision_tree --hp max_depth=4 --model-out " +
              (dir / "dt.json").string()) == 0);
    CHECK(fs::exists(dir / "dt.json"));

    fs::path out = dir / "eval_out.txt";
    CHECK(run("evaluate --model " + (dir / "dt.json").string() + " --train-holdout " +
              (dir / "train.csv").string() + " --test " + (dir / "test.csv").string() +
              " --label label --out " + (dir / "eval").string(), out) == 0);
    CHECK(slurp(out).find("accuracy gap") != std::string::npos);
    CHECK(fs::exists(dir / "eval" / "eval_decision_tree.json"));

    CHECK(run("compare " + (dir / "eval" / "eval_decision_tree.json").string() + " --out " +
              (dir / "cmp").string()) == 0);
    CHECK(slurp(dir / "cmp" / "comparison.csv").find("decision_tree") != std::string::npos);
}

TEST_CASE("cv and tune run on a synthetic csv") {
    fs::path dir = temp_dir("cvtune");
    REQUIRE(run("synth --seed 5 --n 300 --features 3 --out " + dir.string()) == 0);
    fs::path out = dir / "cv.txt";
    CHECK(run("cv " + (dir / "train.csv").string() +
              " --label label --family naive_bayes --k 3", out) == 0);
    CHECK(slurp(out).find("mean:") != std::string::npos);

    CHECK(run("tune " + (dir / "train.csv").string() +
              " --label label --family decision_tree --grid max_depth=2,4 --k 2 --out " +
              (dir / "tune").string(), dir / "tune.txt") == 0);
    CHECK(slurp(dir / "tune.txt").find("best:") != std::string::npos);
    CHECK(fs::exists(dir / "tune" / "grid.csv"));
}

TEST_CASE("run executes a config end to end") {
    fs::path dir = temp_dir("run");
    REQUIRE(run("synth --seed 9 --n 400 --features 4 --informative 2 --out " + dir.string()) == 0);
    std::ofstream(dir / "exp.ini")
        << "[experiment]\nseed = 4\nout = " << (dir / "exp_out").string() << "\n"
        << "[train]\npath = " << (dir / "train.csv").string() << "\nlabel_column = label\n"
        << "[test]\npath = " << (dir / "test.csv").string() << "\n"
        << "[features]\nranking_trees = 8\nranking_fraction = 0.9\nmax_k = 2\n"
        << "[models]\nfamilies = decision_tree\n"
        << "[validation]\nk = 2\ngrid_k = 2\ngrid_fraction = 0.9\n";
    fs::path out = dir / "run.txt";
    CHECK(run("run " + (dir / "exp.ini").string(), out) == 0);
    CHECK(fs::exists(dir / "exp_out" / "reports" / "comparison.json"));
    CHECK(slurp(out).find("chosen k") != std::string::npos);
}

} // TEST_SUITE
