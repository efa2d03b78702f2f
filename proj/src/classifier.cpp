#include "nids/classifier.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nids/kernels.hpp"
#include "nids/mlp.hpp"
#include "nids/naive_bayes.hpp"
#include "nids/rng.hpp"
#include "nids/svm.hpp"
#include "nids/tree.hpp"

namespace nids {

using ordered_json = nlohmann::ordered_json;

Family family_from_string(const std::string& s) {
    if (s == "decision_tree" || s == "dt") return Family::decision_tree;
    if (s == "random_forest" || s == "rf") return Family::random_forest;
    if (s == "svm") return Family::svm;
    if (s == "naive_bayes" || s == "nb") return Family::naive_bayes;
    if (s == "ann") return Family::ann;
    if (s == "dnn") return Family::dnn;
    throw Error("unknown model family: '" + s + "'");
}

std::string to_string(Family f) {
    switch (f) {
        case Family::decision_tree: return "decision_tree";
        case Family::random_forest: return "random_forest";
        case Family::svm: return "svm";
        case Family::naive_bayes: return "naive_bayes";
        case Family::ann: return "ann";
        case Family::dnn: return "dnn";
    }
    throw Error("invalid family enum");
}

std::vector<Family> all_families() {
    return {Family::decision_tree, Family::random_forest, Family::svm,
            Family::naive_bayes,  Family::ann,           Family::dnn};
}

namespace {

double parse_num(const std::string& name, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw Error("hyperparameter '" + name + "': not a number: '" + value + "'");
    }
    return out;
}

void require_enum(const std::string& name, const std::string& value,
                  std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (value == a) return;
    }
    throw Error("hyperparameter '" + name + "': invalid value '" + value + "'");
}

void validate_hyperparameter(Family family, const std::string& name, const std::string& value) {
    auto positive = [&](double v) {
        if (!(v > 0.0)) throw Error("hyperparameter '" + name + "' must be > 0");
    };
    auto non_negative_int = [&](double v) {
        if (v < 0.0 || v != std::floor(v)) {
            throw Error("hyperparameter '" + name + "' must be a non-negative integer");
        }
    };
    switch (family) {
        case Family::decision_tree:
        case Family::random_forest:
            if (name == "criterion") {
                require_enum(name, value, {"gini", "entropy"});
                return;
            }
            if (name == "max_depth") {
                non_negative_int(parse_num(name, value));
                return;
            }
            if (name == "min_samples_split") {
                double v = parse_num(name, value);
                non_negative_int(v);
                if (v < 2) throw Error("hyperparameter 'min_samples_split' must be >= 2");
                return;
            }
            if (family == Family::random_forest) {
                if (name == "n_trees") {
                    double v = parse_num(name, value);
                    non_negative_int(v);
                    positive(v);
                    return;
                }
                if (name == "bootstrap") {
                    require_enum(name, value, {"true", "false"});
                    return;
                }
                if (name == "max_features") {
                    require_enum(name, value, {"sqrt", "all"});
                    return;
                }
            }
            break;
        case Family::svm:
            if (name == "lambda") {
                positive(parse_num(name, value));
                return;
            }
            if (name == "epochs") {
                double v = parse_num(name, value);
                non_negative_int(v);
                positive(v);
                return;
            }
            break;
        case Family::naive_bayes:
            if (name == "variant") {
                require_enum(name, value, {"gaussian", "bernoulli"});
                return;
            }
            if (name == "var_smoothing") {
                positive(parse_num(name, value));
                return;
            }
            break;
        case Family::ann:
        case Family::dnn:
            if (name == "hidden_width" || name == "epochs" || name == "batch_size") {
                double v = parse_num(name, value);
                non_negative_int(v);
                positive(v);
                return;
            }
            if (name == "learning_rate") {
                positive(parse_num(name, value));
                return;
            }
            if (name == "activation") {
                require_enum(name, value, {"relu", "sigmoid"});
                return;
            }
            break;
    }
    throw Error("hyperparameter '" + name + "' is not valid for family " + to_string(family));
}

} // namespace

const std::map<std::string, std::string>& ClassifierSpec::defaults(Family family) {
    static const std::map<std::string, std::string> dt{
        {"criterion", "gini"}, {"max_depth", "0"}, {"min_samples_split", "2"}};
    static const std::map<std::string, std::string> rf{
        {"criterion", "gini"},    {"max_depth", "0"},   {"min_samples_split", "2"},
        {"n_trees", "50"},        {"bootstrap", "true"}, {"max_features", "sqrt"}};
    static const std::map<std::string, std::string> svm{{"lambda", "0.0001"}, {"epochs", "10"}};
    static const std::map<std::string, std::string> nb{{"variant", "gaussian"},
                                                       {"var_smoothing", "1e-9"}};
    static const std::map<std::string, std::string> ann{{"hidden_width", "15"},
                                                        {"epochs", "30"},
                                                        {"batch_size", "64"},
                                                        {"learning_rate", "0.1"},
                                                        {"activation", "relu"}};
    static const std::map<std::string, std::string> dnn = ann;
    switch (family) {
        case Family::decision_tree: return dt;
        case Family::random_forest: return rf;
        case Family::svm: return svm;
        case Family::naive_bayes: return nb;
        case Family::ann: return ann;
        case Family::dnn: return dnn;
    }
    throw Error("invalid family enum");
}

ClassifierSpec ClassifierSpec::make(Family family, const std::map<std::string, std::string>& overrides,
                                    std::uint64_t seed) {
    ClassifierSpec spec;
    spec.family = family;
    spec.seed = seed;
    spec.hyperparameters = defaults(family);
    for (const auto& [name, value] : overrides) {
        if (!spec.hyperparameters.contains(name)) {
            throw Error("hyperparameter '" + name + "' is not valid for family " +
                        to_string(family));
        }
        spec.hyperparameters[name] = value;
    }
    for (const auto& [name, value] : spec.hyperparameters) {
        validate_hyperparameter(family, name, value);
    }
    return spec;
}

double ClassifierSpec::num(const std::string& name) const {
    auto it = hyperparameters.find(name);
    if (it == hyperparameters.end()) throw Error("missing hyperparameter '" + name + "'");
    return parse_num(name, it->second);
}

std::size_t ClassifierSpec::count(const std::string& name) const {
    double v = num(name);
    return static_cast<std::size_t>(v);
}

const std::string& ClassifierSpec::str(const std::string& name) const {
    auto it = hyperparameters.find(name);
    if (it == hyperparameters.end()) throw Error("missing hyperparameter '" + name + "'");
    return it->second;
}

ClassifierSpec ClassifierSpec::with_seed(std::uint64_t s) const {
    ClassifierSpec copy = *this;
    copy.seed = s;
    return copy;
}

DesignMatrix make_design(const Dataset& d, bool require_two_classes) {
    if (d.empty()) throw Error("training data is empty");
    DesignMatrix m;
    m.n = d.size();
    m.d = d.schema().dimension();
    m.feature_names = d.schema().feature_names;

    std::map<std::string, std::int32_t> class_ids;
    for (const auto& r : d.records()) class_ids.emplace(r.label, 0);
    std::int32_t next = 0;
    for (auto& [label, id] : class_ids) id = next++;
    m.classes.reserve(class_ids.size());
    for (const auto& [label, id] : class_ids) m.classes.push_back(label);

    if (require_two_classes && m.classes.size() < 2) {
        throw Error("training data has a single class: '" + m.classes.front() + "'");
    }

    m.x.resize(m.n * m.d);
    m.y.resize(m.n);
    for (std::size_t i = 0; i < m.n; ++i) {
        const auto& r = d.records()[i];
        for (std::size_t j = 0; j < m.d; ++j) {
            double v = r.values[j];
            if (cell_kind(v) != CellKind::finite) {
                throw Error("record " + std::to_string(i) + ", feature '" +
                            m.feature_names[j] + "': missing/non-finite value; clean first");
            }
            m.x[i * m.d + j] = v;
        }
        m.y[i] = class_ids[r.label];
    }
    return m;
}

Standardizer Standardizer::fit(const DesignMatrix& m) {
    Standardizer s;
    s.mean.assign(m.d, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) kern::vadd(s.mean.data(), m.row(i), m.d);
    for (auto& v : s.mean) v /= static_cast<double>(m.n);

    std::vector<double> ss(m.d, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) kern::accum_sq_diff(ss.data(), m.row(i), s.mean.data(), m.d);
    s.sigma.resize(m.d);
    s.inv_sigma.resize(m.d);
    for (std::size_t j = 0; j < m.d; ++j) {
        s.sigma[j] = std::sqrt(ss[j] / static_cast<double>(m.n)); // population form
        s.inv_sigma[j] = s.sigma[j] > 0.0 ? 1.0 / s.sigma[j] : 0.0;
    }
    return s;
}

void Standardizer::apply_row(const double* in, double* out) const {
    kern::standardize_row(in, mean.data(), inv_sigma.data(), out, mean.size());
}

std::vector<double> Standardizer::apply_matrix(const std::vector<double>& x, std::size_t n,
                                               std::size_t d) const {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < n; ++i) apply_row(x.data() + i * d, out.data() + i * d);
    return out;
}

Standardizer standardize_fit(const Dataset& train) {
    return Standardizer::fit(make_design(train, false));
}

Dataset standardize_apply(const Standardizer& s, const Dataset& d) {
    if (s.mean.size() != d.schema().dimension()) {
        throw Error("standardize_apply: dimension mismatch");
    }
    std::vector<FlowRecord> out;
    out.reserve(d.size());
    std::vector<double> buf(s.mean.size());
    for (const auto& r : d.records()) {
        FlowRecord nr;
        nr.values.resize(r.values.size());
        s.apply_row(r.values.data(), nr.values.data());
        nr.label = r.label;
        out.push_back(std::move(nr));
    }
    return d.with_records(std::move(out), "standardize");
}

namespace {

TreeParams tree_params_from(const ClassifierSpec& spec) {
    TreeParams p;
    p.criterion = criterion_from_string(spec.str("criterion"));
    p.max_depth = spec.count("max_depth");
    p.min_samples_split = spec.count("min_samples_split");
    return p;
}

std::vector<std::size_t> mlp_sizes(const ClassifierSpec& spec, std::size_t d, std::size_t classes) {
    const std::size_t hidden_layers = spec.family == Family::dnn ? 3 : 1;
    std::vector<std::size_t> sizes{d};
    for (std::size_t i = 0; i < hidden_layers; ++i) sizes.push_back(spec.count("hidden_width"));
    sizes.push_back(classes);
    return sizes;
}

std::int32_t predict_class_core(const TrainedModel& m, const double* x, std::vector<double>& scratch) {
    const double* input = x;
    if (m.standardizer) {
        scratch.resize(m.feature_names.size());
        m.standardizer->apply_row(x, scratch.data());
        input = scratch.data();
    }
    switch (m.spec.family) {
        case Family::decision_tree: return tree_predict_class(*m.tree, input);
        case Family::random_forest: return forest_predict_class(*m.forest, input, m.classes.size());
        case Family::svm: return svm_predict_class(*m.svm, input, m.feature_names.size());
        case Family::naive_bayes:
            return nb_predict_class(*m.nb, input, m.feature_names.size(), m.classes.size());
        case Family::ann:
        case Family::dnn: return mlp_predict_class(*m.mlp, input);
    }
    throw Error("invalid family enum");
}

} // namespace

TrainedModel fit(const ClassifierSpec& spec, const Dataset& train) {
    DesignMatrix m = make_design(train, true);

    TrainedModel model;
    model.spec = spec;
    model.classes = m.classes;
    model.feature_names = m.feature_names;
    model.n_train = m.n;

    const auto t0 = std::chrono::steady_clock::now();
    switch (spec.family) {
        case Family::decision_tree: {
            Rng rng(derive_seed(spec.seed, "dt"));
            std::vector<std::size_t> idx(m.n);
            for (std::size_t i = 0; i < m.n; ++i) idx[i] = i;
            model.tree = build_tree(m, std::move(idx), tree_params_from(spec), rng);
            break;
        }
        case Family::random_forest: {
            TreeParams p = tree_params_from(spec);
            p.feature_subsample = spec.str("max_features") == "sqrt";
            model.forest = build_forest(m, spec.count("n_trees"), p,
                                        spec.str("bootstrap") == "true", spec.seed);
            break;
        }
        case Family::svm: {
            if (m.classes.size() != 2) throw Error("svm supports exactly 2 classes");
            Standardizer s = Standardizer::fit(m);
            std::vector<double> xs = s.apply_matrix(m.x, m.n, m.d);
            SvmTrainResult r = train_svm(xs, m.y, m.n, m.d, spec.num("lambda"),
                                         spec.count("epochs"), spec.seed);
            model.standardizer = std::move(s);
            model.svm = std::move(r.state);
            break;
        }
        case Family::naive_bayes: {
            model.nb = fit_naive_bayes(m, spec.str("variant"), spec.num("var_smoothing"));
            break;
        }
        case Family::ann:
        case Family::dnn: {
            Standardizer s = Standardizer::fit(m);
            std::vector<double> xs = s.apply_matrix(m.x, m.n, m.d);
            MlpNet net = MlpNet::create(mlp_sizes(spec, m.d, m.classes.size()),
                                        spec.str("activation"), spec.seed);
            train_mlp(net, xs, m.y, m.n, m.d, spec.count("epochs"), spec.count("batch_size"),
                      spec.num("learning_rate"), spec.seed);
            model.standardizer = std::move(s);
            model.mlp = MlpState{std::move(net.layers)};
            break;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    model.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    return model;
}

std::string predict(const TrainedModel& m, const FlowRecord& record) {
    if (record.values.size() != m.feature_names.size()) {
        throw Error("predict: record dimension " + std::to_string(record.values.size()) +
                    " != model dimension " + std::to_string(m.feature_names.size()));
    }
    for (double v : record.values) {
        if (cell_kind(v) != CellKind::finite) {
            throw Error("predict: record contains missing/non-finite values");
        }
    }
    std::vector<double> scratch;
    return m.classes[predict_class_core(m, record.values.data(), scratch)];
}

BatchPrediction predict_batch(const TrainedModel& m, const Dataset& d) {
    if (d.schema().feature_names != m.feature_names) {
        throw Error("predict_batch: dataset schema does not match the model's training schema");
    }
    for (const auto& r : d.records()) {
        for (double v : r.values) {
            if (cell_kind(v) != CellKind::finite) {
                throw Error("predict_batch: data contains missing/non-finite values; clean first");
            }
        }
    }

    BatchPrediction out;
    out.labels.reserve(d.size());
    std::vector<double> scratch;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : d.records()) {
        out.labels.push_back(m.classes[predict_class_core(m, r.values.data(), scratch)]);
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.elapsed_seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

// --- serialization ---

namespace {

ordered_json tree_to_json(const TreeState& t) {
    ordered_json nodes = ordered_json::array();
    for (const auto& n : t.nodes) {
        if (n.feature >= 0) {
            nodes.push_back(ordered_json{{"f", n.feature}, {"t", n.threshold}, {"l", n.left},
                                         {"r", n.right}});
        } else {
            nodes.push_back(ordered_json{{"c", n.counts}, {"m", n.majority}});
        }
    }
    return ordered_json{{"nodes", std::move(nodes)}, {"raw_importance", t.raw_importance}};
}

TreeState tree_from_json(const ordered_json& j) {
    TreeState t;
    for (const auto& jn : j.at("nodes")) {
        TreeNodeRec n;
        if (jn.contains("f")) {
            n.feature = jn.at("f").get<std::int32_t>();
            n.threshold = jn.at("t").get<double>();
            n.left = jn.at("l").get<std::int32_t>();
            n.right = jn.at("r").get<std::int32_t>();
        } else {
            n.feature = -1;
            n.counts = jn.at("c").get<std::vector<std::uint64_t>>();
            n.majority = jn.at("m").get<std::int32_t>();
        }
        t.nodes.push_back(std::move(n));
    }
    t.raw_importance = j.at("raw_importance").get<std::vector<double>>();
    return t;
}

void check_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw Error(std::string("model serialization: non-finite value in ") + what);
        }
    }
}

} // namespace

std::string model_to_json(const TrainedModel& m) {
    ordered_json j;
    j["format_version"] = 1;
    j["family"] = to_string(m.spec.family);
    j["hyperparameters"] = m.spec.hyperparameters;
    j["seed"] = m.spec.seed;
    j["classes"] = m.classes;
    j["feature_names"] = m.feature_names;
    if (m.standardizer) {
        check_finite(m.standardizer->mean, "standardizer.mean");
        j["standardizer"] = ordered_json{{"mean", m.standardizer->mean},
                                         {"sigma", m.standardizer->sigma}};
    } else {
        j["standardizer"] = nullptr;
    }
    j["fit_seconds"] = m.fit_seconds;
    j["n_train"] = m.n_train;

    ordered_json state;
    switch (m.spec.family) {
        case Family::decision_tree: state = tree_to_json(*m.tree); break;
        case Family::random_forest: {
            ordered_json trees = ordered_json::array();
            for (const auto& t : m.forest->trees) trees.push_back(tree_to_json(t));
            state = ordered_json{{"trees", std::move(trees)}};
            break;
        }
        case Family::svm:
            check_finite(m.svm->w, "svm.w");
            state = ordered_json{{"w", m.svm->w}, {"bias", m.svm->bias},
                                 {"lambda", m.svm->lambda}};
            break;
        case Family::naive_bayes:
            state = ordered_json{{"variant", m.nb->variant}, {"log_prior", m.nb->log_prior},
                                 {"mean", m.nb->mean},       {"variance", m.nb->variance},
                                 {"median", m.nb->median},   {"log_p1", m.nb->log_p1},
                                 {"log_p0", m.nb->log_p0}};
            break;
        case Family::ann:
        case Family::dnn: {
            ordered_json layers = ordered_json::array();
            for (const auto& l : m.mlp->layers) {
                check_finite(l.w, "mlp layer weights");
                layers.push_back(ordered_json{{"out", l.out}, {"in", l.in}, {"w", l.w},
                                              {"b", l.b}, {"activation", l.activation}});
            }
            state = ordered_json{{"layers", std::move(layers)}};
            break;
        }
    }
    j["state"] = std::move(state);
    return j.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    if (j.at("format_version").get<int>() != 1) {
        throw Error("unsupported model format_version");
    }

    TrainedModel m;
    m.spec.family = family_from_string(j.at("family").get<std::string>());
    m.spec.hyperparameters = j.at("hyperparameters").get<std::map<std::string, std::string>>();
    m.spec.seed = j.at("seed").get<std::uint64_t>();
    m.classes = j.at("classes").get<std::vector<std::string>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!j.at("standardizer").is_null()) {
        Standardizer s;
        s.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        s.sigma = j.at("standardizer").at("sigma").get<std::vector<double>>();
        s.inv_sigma.resize(s.sigma.size());
        for (std::size_t i = 0; i < s.sigma.size(); ++i) {
            s.inv_sigma[i] = s.sigma[i] > 0.0 ? 1.0 / s.sigma[i] : 0.0;
        }
        m.standardizer = std::move(s);
    }
    m.fit_seconds = j.at("fit_seconds").get<double>();
    m.n_train = j.at("n_train").get<std::size_t>();

    const ordered_json& state = j.at("state");
    switch (m.spec.family) {
        case Family::decision_tree: m.tree = tree_from_json(state); break;
        case Family::random_forest: {
            ForestState f;
            for (const auto& jt : state.at("trees")) f.trees.push_back(tree_from_json(jt));
            m.forest = std::move(f);
            break;
        }
        case Family::svm: {
            SvmState s;
            s.w = state.at("w").get<std::vector<double>>();
            s.bias = state.at("bias").get<double>();
            s.lambda = state.at("lambda").get<double>();
            m.svm = std::move(s);
            break;
        }
        case Family::naive_bayes: {
            NaiveBayesState s;
            s.variant = state.at("variant").get<std::string>();
            s.log_prior = state.at("log_prior").get<std::vector<double>>();
            s.mean = state.at("mean").get<std::vector<double>>();
            s.variance = state.at("variance").get<std::vector<double>>();
            s.median = state.at("median").get<std::vector<double>>();
            s.log_p1 = state.at("log_p1").get<std::vector<double>>();
            s.log_p0 = state.at("log_p0").get<std::vector<double>>();
            m.nb = std::move(s);
            break;
        }
        case Family::ann:
        case Family::dnn: {
            MlpState s;
            for (const auto& jl : state.at("layers")) {
                MlpLayerState l;
                l.out = jl.at("out").get<std::size_t>();
                l.in = jl.at("in").get<std::size_t>();
                l.w = jl.at("w").get<std::vector<double>>();
                l.b = jl.at("b").get<std::vector<double>>();
                l.activation = jl.at("activation").get<std::string>();
                s.layers.push_back(std::move(l));
            }
            m.mlp = std::move(s);
            break;
        }
    }
    return m;
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write model file: " + path.string());
    out << model_to_json(m);
    if (!out) throw Error("model write failed: " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

} // namespace nids
