#include "nids/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nids/csv.hpp"
#include "nids/feature_select.hpp"
#include "nids/rng.hpp"

namespace nids {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string trim_copy(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string item = trim_copy(std::string_view(s).substr(
            start, comma == std::string::npos ? std::string::npos : comma - start));
        if (!item.empty()) out.push_back(std::move(item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error("config: key '" + key + "': not a number: '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error("config: key '" + key + "': not a non-negative integer: '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw Error("config: key '" + key + "': expected true/false, got '" + value + "'");
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_sections(const std::string& text) {
    SectionMap sections;
    std::istringstream in(text);
    std::string line;
    std::string current = "";
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim_copy(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw Error("config: line " + std::to_string(line_no) + ": malformed section header");
            }
            current = trim_copy(std::string_view(t).substr(1, t.size() - 2));
            sections[current];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw Error("config: line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = trim_copy(std::string_view(t).substr(0, eq));
        std::string value = trim_copy(std::string_view(t).substr(eq + 1));
        if (key.empty()) {
            throw Error("config: line " + std::to_string(line_no) + ": empty key");
        }
        sections[current][key] = value;
    }
    return sections;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    SectionMap sections = parse_sections(text);
    ExperimentConfig cfg;
    cfg.raw_text = text;

    auto get = [&](const std::string& section, const std::string& key,
                   std::string* out) -> bool {
        auto sit = sections.find(section);
        if (sit == sections.end()) return false;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return false;
        *out = kit->second;
        return true;
    };
    std::string v;

    if (get("experiment", "seed", &v)) cfg.seed = parse_u64("experiment.seed", v);
    if (get("experiment", "out", &v)) cfg.out_dir = v;

    if (!get("train", "path", &v)) throw Error("config: [train] path is required");
    cfg.train.path = v;
    if (get("train", "label_column", &v)) cfg.train.label_column = v;
    if (get("train", "fraction", &v)) cfg.train.fraction = parse_double("train.fraction", v);

    if (sections.contains("test")) {
        DataSource test;
        if (!get("test", "path", &v)) throw Error("config: [test] present but has no path");
        test.path = v;
        test.label_column = cfg.train.label_column;
        if (get("test", "label_column", &v)) test.label_column = v;
        test.fraction = 1.0;
        if (get("test", "fraction", &v)) test.fraction = parse_double("test.fraction", v);
        cfg.test = std::move(test);
    }

    if (get("preprocess", "clean", &v)) cfg.do_clean = parse_bool("preprocess.clean", v);
    if (get("preprocess", "drop_classes", &v)) cfg.drop_classes = split_list(v);
    if (get("preprocess", "per_class_cap", &v) && !v.empty()) {
        cfg.per_class_cap = parse_u64("preprocess.per_class_cap", v);
    }
    if (get("preprocess", "ratio", &v) && !v.empty()) {
        cfg.ratio = parse_double("preprocess.ratio", v);
    }
    if (get("preprocess", "benign_label", &v)) cfg.benign_label = v;
    if (get("preprocess", "binarize", &v)) cfg.binarize = parse_bool("preprocess.binarize", v);
    if (get("preprocess", "merged_label", &v)) cfg.merged_label = v;

    if (get("features", "exclusions", &v)) cfg.exclusions = split_list(v);
    if (get("features", "ranking_fraction", &v)) {
        cfg.ranking_fraction = parse_double("features.ranking_fraction", v);
    }
    if (get("features", "ranking_trees", &v)) {
        cfg.ranking_trees = parse_u64("features.ranking_trees", v);
    }
    if (get("features", "max_k", &v)) cfg.max_k = parse_u64("features.max_k", v);
    if (get("features", "tolerance", &v)) cfg.tolerance = parse_double("features.tolerance", v);
    if (get("features", "curve_holdout", &v)) {
        cfg.curve_holdout = parse_double("features.curve_holdout", v);
    }

    if (get("models", "families", &v)) {
        for (const auto& name : split_list(v)) cfg.families.push_back(family_from_string(name));
    }
    if (cfg.families.empty()) cfg.families = all_families();

    for (const auto& [section, keys] : sections) {
        if (!section.starts_with("grid.")) continue;
        Family family = family_from_string(section.substr(5));
        HyperGrid grid;
        for (const auto& [key, value] : keys) {
            grid.values[key] = split_list(value);
            if (grid.values[key].empty()) {
                throw Error("config: " + section + "." + key + " lists no values");
            }
        }
        cfg.grids[to_string(family)] = std::move(grid);
    }

    if (get("validation", "k", &v)) cfg.cv_k = parse_u64("validation.k", v);
    if (get("validation", "grid_fraction", &v)) {
        cfg.grid_fraction = parse_double("validation.grid_fraction", v);
    }
    if (get("validation", "grid_k", &v)) cfg.grid_k = parse_u64("validation.grid_k", v);

    if (get("evaluation", "holdout_fraction", &v)) {
        cfg.holdout_fraction = parse_double("evaluation.holdout_fraction", v);
    }

    for (const auto& [section, keys] : sections) {
        static const std::vector<std::string> known{"experiment", "train",      "test",
                                                    "preprocess", "features",   "models",
                                                    "validation", "evaluation"};
        if (std::find(known.begin(), known.end(), section) == known.end() &&
            !section.starts_with("grid.")) {
            throw Error("config: unknown section [" + section + "]");
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream out;
    out << "evaluation.holdout_fraction=" << holdout_fraction << '\n';
    out << "experiment.seed=" << seed << '\n';
    out << "features.curve_holdout=" << curve_holdout << '\n';
    std::string ex;
    for (const auto& e : exclusions) ex += e + ",";
    out << "features.exclusions=" << ex << '\n';
    out << "features.max_k=" << max_k << '\n';
    out << "features.ranking_fraction=" << ranking_fraction << '\n';
    out << "features.ranking_trees=" << ranking_trees << '\n';
    out << "features.tolerance=" << tolerance << '\n';
    for (const auto& [family, grid] : grids) {
        for (const auto& [key, values] : grid.values) {
            out << "grid." << family << "." << key << "=";
            for (const auto& value : values) out << value << ",";
            out << '\n';
        }
    }
    std::string fams;
    for (Family f : families) fams += to_string(f) + ",";
    out << "models.families=" << fams << '\n';
    out << "preprocess.benign_label=" << benign_label << '\n';
    out << "preprocess.binarize=" << (binarize ? "true" : "false") << '\n';
    out << "preprocess.clean=" << (do_clean ? "true" : "false") << '\n';
    std::string drops;
    for (const auto& d : drop_classes) drops += d + ",";
    out << "preprocess.drop_classes=" << drops << '\n';
    out << "preprocess.merged_label=" << merged_label << '\n';
    out << "preprocess.per_class_cap="
        << (per_class_cap ? std::to_string(*per_class_cap) : "") << '\n';
    out << "preprocess.ratio=" << (ratio ? format_csv_value(*ratio) : "") << '\n';
    if (test) {
        out << "test.fraction=" << test->fraction << '\n';
        out << "test.label_column=" << test->label_column << '\n';
        out << "test.path=" << test->path << '\n';
    }
    out << "train.fraction=" << train.fraction << '\n';
    out << "train.label_column=" << train.label_column << '\n';
    out << "train.path=" << train.path << '\n';
    out << "validation.grid_fraction=" << grid_fraction << '\n';
    out << "validation.grid_k=" << grid_k << '\n';
    out << "validation.k=" << cv_k << '\n';
    return out.str();
}

std::string ExperimentConfig::digest() const { return hex64(fnv1a64(canonical_text())); }

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write: " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

ordered_json distribution_json(const ClassDistribution& dist) {
    ordered_json entries = ordered_json::array();
    for (const auto& e : dist.entries) {
        entries.push_back(ordered_json{{"label", e.label}, {"count", e.count},
                                       {"percent", e.percent}});
    }
    return ordered_json{{"total", dist.total}, {"classes", std::move(entries)}};
}

ordered_json clean_report_json(const CleanReport& r) {
    return ordered_json{{"dropped_missing", r.dropped_missing},
                        {"dropped_nonfinite", r.dropped_nonfinite},
                        {"dropped_duplicates", r.dropped_duplicates},
                        {"remaining", r.remaining}};
}

template <typename F>
auto stage(const std::string& name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error("stage " + name + ": " + e.what());
    }
}

// A fixed hyperparameter is a single-valued grid entry; those apply to the
// preliminary curve models too. Multi-valued entries are left to tuning.
ClassifierSpec curve_spec(const ExperimentConfig& cfg, Family family) {
    std::map<std::string, std::string> fixed;
    auto it = cfg.grids.find(to_string(family));
    if (it != cfg.grids.end()) {
        for (const auto& [key, values] : it->second.values) {
            if (values.size() == 1) fixed[key] = values.front();
        }
    }
    return ClassifierSpec::make(family, fixed, 0);
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    const std::uint64_t master = cfg.seed;

    RunResult result;
    result.run_dir = cfg.out_dir;
    fs::create_directories(result.run_dir / "reports");
    fs::create_directories(result.run_dir / "tables");
    fs::create_directories(result.run_dir / "plots");
    write_text(result.run_dir / "config.copy", cfg.raw_text);

    ordered_json summary;
    summary["config_digest"] = cfg.digest();
    summary["seed"] = master;

    // load
    Dataset train = stage("load_train", [&] {
        return load_csv(cfg.train.path, cfg.train.label_column, cfg.train.fraction,
                        derive_seed(master, "load_train"));
    });
    std::optional<Dataset> test;
    if (cfg.test) {
        test = stage("load_test", [&] {
            return load_csv(cfg.test->path, cfg.test->label_column, cfg.test->fraction,
                            derive_seed(master, "load_test"));
        });
    }
    summary["loaded"] = ordered_json{{"train_records", train.size()},
                                     {"test_records", test ? test->size() : 0}};

    // align
    if (test) {
        auto [a, b] = stage("align_schemas", [&] { return align_schemas(train, *test); });
        train = std::move(a);
        test = std::move(b);
    }

    // preprocess (both sides; reports carry before/after audits)
    auto preprocess_side = [&](Dataset d, const char* side) {
        ordered_json report;
        report["distribution_before"] = distribution_json(class_distribution(d));
        if (cfg.do_clean) {
            auto [cleaned, cr] = stage(std::string("clean_") + side, [&] { return clean(d); });
            d = std::move(cleaned);
            report["clean"] = clean_report_json(cr);
        }
        for (const auto& label : cfg.drop_classes) {
            d = stage(std::string("drop_class_") + side, [&] { return drop_class(d, label); });
        }
        if (cfg.per_class_cap || cfg.ratio) {
            ResamplePolicy policy;
            policy.per_class_cap = cfg.per_class_cap;
            policy.benign_ratio = cfg.ratio;
            policy.benign_label = cfg.benign_label;
            policy.seed = derive_seed_keyed(master, "downsample", side);
            d = stage(std::string("downsample_") + side, [&] { return downsample(d, policy); });
        }
        if (cfg.binarize) {
            d = stage(std::string("binarize_") + side,
                      [&] { return binarize_labels(d, cfg.benign_label, cfg.merged_label); });
        }
        report["distribution_after"] = distribution_json(class_distribution(d));
        write_text(result.run_dir / "reports" / (std::string("preprocess_") + side + ".json"),
                   report.dump(2) + "\n");
        return d;
    };
    train = preprocess_side(std::move(train), "train");
    if (test) test = preprocess_side(std::move(*test), "test");

    // rank features
    std::set<std::string> exclusions(cfg.exclusions.begin(), cfg.exclusions.end());
    ClassifierSpec ranking_forest = ClassifierSpec::make(
        Family::random_forest, {{"n_trees", std::to_string(cfg.ranking_trees)}}, 0);
    FeatureRanking ranking = stage("rank_features", [&] {
        return rank_features(train, ranking_forest, exclusions, cfg.ranking_fraction,
                             derive_seed(master, "rank_features"));
    });
    write_text(result.run_dir / "plots" / "importances.csv", ranking.to_csv());

    // accuracy curve + choose k
    std::size_t max_k = cfg.max_k == 0 ? ranking.items.size()
                                       : std::min(cfg.max_k, ranking.items.size());
    std::vector<ClassifierSpec> curve_specs;
    for (Family f : cfg.families) curve_specs.push_back(curve_spec(cfg, f));
    AccuracyCurve curve = stage("accuracy_curve", [&] {
        return accuracy_curve(train, ranking, curve_specs, max_k, derive_seed(master, "curve"),
                              cfg.curve_holdout);
    });
    write_text(result.run_dir / "plots" / "curve.csv", curve.to_csv());
    result.chosen_k = stage("choose_top_k", [&] { return choose_top_k(curve, cfg.tolerance); });
    result.selected_features = ranking.top(result.chosen_k);
    summary["chosen_k"] = result.chosen_k;
    summary["selected_features"] = result.selected_features;

    Dataset train_k = train.select_features(result.selected_features);
    std::optional<Dataset> test_k;
    if (test) test_k = test->select_features(result.selected_features);

    // grid search + winner CV per family
    std::map<std::string, ClassifierSpec> winners;
    ordered_json winner_json = ordered_json::object();
    std::string cv_csv = "family";
    for (std::size_t i = 1; i <= cfg.cv_k; ++i) cv_csv += ",fold_" + std::to_string(i);
    cv_csv += ",mean,std\n";
    for (Family family : cfg.families) {
        const std::string name = to_string(family);
        HyperGrid grid;
        auto it = cfg.grids.find(name);
        if (it != cfg.grids.end() && it->second.cell_count() > 0) {
            grid = it->second;
        } else {
            // No grid in the config: a single default cell.
            for (const auto& [key, value] : ClassifierSpec::defaults(family)) {
                grid.values[key] = {value};
            }
        }
        GridSearchResult gs = stage("grid_search_" + name, [&] {
            return grid_search(family, grid, train_k, cfg.grid_fraction, cfg.grid_k,
                               derive_seed_keyed(master, "grid", name));
        });
        write_text(result.run_dir / "tables" / ("grid_" + name + ".csv"),
                   gs.table_csv(cfg.grid_k));

        CvResult cv = stage("cross_validate_" + name, [&] {
            return cross_validate(gs.best, train_k, cfg.cv_k,
                                  derive_seed_keyed(master, "cv_winner", name));
        });
        cv_csv += name;
        for (double a : cv.fold_accuracy) cv_csv += "," + format_csv_value(a);
        cv_csv += "," + format_csv_value(cv.mean) + "," + format_csv_value(cv.stddev) + "\n";

        winners.emplace(name, gs.best);
        winner_json[name] = ordered_json{{"hyperparameters", gs.best.hyperparameters},
                                         {"cv_mean", cv.mean},
                                         {"cv_std", cv.stddev}};
    }
    write_text(result.run_dir / "tables" / "cv_winners.csv", cv_csv);
    summary["winners"] = std::move(winner_json);

    // final fit + evaluation
    auto [final_train, final_holdout] = stage("final_split", [&] {
        return holdout_split(train_k, cfg.holdout_fraction, /*stratified=*/true,
                             derive_seed(master, "final_split"));
    });

    std::string timing_csv = "model,fit_s,predict_s\n";
    for (Family family : cfg.families) {
        const std::string name = to_string(family);
        ClassifierSpec spec =
            winners.at(name).with_seed(derive_seed_keyed(master, "final_fit", name));
        TrainedModel model = stage("final_fit_" + name, [&] { return fit(spec, final_train); });
        EvaluationReport report = stage("evaluate_" + name, [&] {
            return test_k ? evaluate(model, final_holdout, *test_k)
                          : evaluate(model, final_holdout);
        });
        report.seed = master;
        report.config_digest = cfg.digest();
        write_text(result.run_dir / "reports" / ("eval_" + name + ".json"), report.to_json());
        write_text(result.run_dir / "plots" / ("confusion_" + name + "_train.csv"),
                   report.train_confusion.to_csv());
        if (report.has_test) {
            write_text(result.run_dir / "plots" / ("confusion_" + name + "_test.csv"),
                       report.test_confusion.to_csv());
        }
        timing_csv += name + "," + format_csv_value(report.timing.fit_s) + "," +
                      format_csv_value(report.timing.predict_s) + "\n";
        result.reports.push_back(std::move(report));
    }
    write_text(result.run_dir / "plots" / "timing.csv", timing_csv);

    result.comparison = stage("compare_models", [&] { return compare_models(result.reports); });
    write_text(result.run_dir / "tables" / "comparison.csv", result.comparison.to_csv());
    write_text(result.run_dir / "reports" / "comparison.json", result.comparison.to_json());

    if (!result.reports.empty()) {
        summary["environment"] = result.reports.front().timing.environment;
    }
    write_text(result.run_dir / "reports" / "run_summary.json", summary.dump(2) + "\n");
    return result;
}

} // namespace nids
