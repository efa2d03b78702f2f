#include "nids/synthgen.hpp"

#include <cmath>
#include <sstream>

#include "nids/rng.hpp"

namespace nids {

SynthConfig SynthConfig::basic(std::size_t n_records, std::size_t n_features,
                               std::size_t informative, double separation, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_records = n_records;
    cfg.n_features = n_features;
    cfg.benign_mean.assign(n_features, 0.0);
    cfg.malicious_mean.assign(n_features, 0.0);
    for (std::size_t j = 0; j < informative && j < n_features; ++j) {
        cfg.malicious_mean[j] = separation;
    }
    cfg.benign_scale.assign(n_features, 1.0);
    cfg.malicious_scale.assign(n_features, 1.0);
    cfg.seed = seed;
    return cfg;
}

void SynthConfig::validate() const {
    if (n_records < 2) throw Error("synthgen: n_records must be >= 2");
    if (n_features == 0) throw Error("synthgen: n_features must be >= 1");
    if (!(class_balance > 0.0) || !(class_balance < 1.0)) {
        throw Error("synthgen: class_balance must be in (0,1)");
    }
    auto check_vec = [&](const std::vector<double>& v, const char* what) {
        if (v.size() != n_features) {
            throw Error(std::string("synthgen: ") + what + " must have n_features entries");
        }
    };
    check_vec(benign_mean, "benign_mean");
    check_vec(malicious_mean, "malicious_mean");
    check_vec(benign_scale, "benign_scale");
    check_vec(malicious_scale, "malicious_scale");
    for (double s : benign_scale) {
        if (!(s > 0.0)) throw Error("synthgen: degenerate benign scale <= 0");
    }
    for (double s : malicious_scale) {
        if (!(s > 0.0)) throw Error("synthgen: degenerate malicious scale <= 0");
    }
    if (!drift.mean_shift.empty() && drift.mean_shift.size() != n_features) {
        throw Error("synthgen: drift.mean_shift must be empty or have n_features entries");
    }
    if (drift.prior_shift >= 0.0 &&
        (!(drift.prior_shift > 0.0) || !(drift.prior_shift < 1.0))) {
        throw Error("synthgen: drift.prior_shift must be in (0,1)");
    }
}

namespace {

Dataset generate_side(const SynthConfig& cfg, bool drifted, const char* side) {
    const double balance = (drifted && cfg.drift.prior_shift >= 0.0) ? cfg.drift.prior_shift
                                                                     : cfg.class_balance;
    const auto n_benign = static_cast<std::size_t>(
        std::llround(balance * static_cast<double>(cfg.n_records)));

    // Label layout is a seeded shuffle; record values are counter-based on
    // the record index, so parallel generation would reproduce this stream.
    std::vector<std::uint8_t> is_benign(cfg.n_records, 0);
    for (std::size_t i = 0; i < n_benign && i < cfg.n_records; ++i) is_benign[i] = 1;
    {
        Rng rng(derive_seed_keyed(cfg.seed, "synth_labels", side));
        rng.shuffle(is_benign);
    }

    std::vector<double> shift(cfg.n_features, 0.0);
    if (drifted && !cfg.drift.mean_shift.empty()) shift = cfg.drift.mean_shift;
    const bool rotate = drifted && cfg.drift.rotation_angle != 0.0;
    const double c = std::cos(cfg.drift.rotation_angle);
    const double s = std::sin(cfg.drift.rotation_angle);

    std::vector<FlowRecord> records;
    records.reserve(cfg.n_records);
    const std::uint64_t side_seed = derive_seed_keyed(cfg.seed, "synth_rows", side);
    for (std::size_t i = 0; i < cfg.n_records; ++i) {
        Rng rng(derive_seed(side_seed, "row", i));
        const bool benign = is_benign[i] != 0;
        const auto& mean = benign ? cfg.benign_mean : cfg.malicious_mean;
        const auto& scale = benign ? cfg.benign_scale : cfg.malicious_scale;

        FlowRecord r;
        r.values.resize(cfg.n_features);
        for (std::size_t j = 0; j < cfg.n_features; ++j) {
            r.values[j] = mean[j] + shift[j] + scale[j] * rng.gaussian();
        }
        if (rotate) {
            for (std::size_t j = 0; j + 1 < cfg.n_features; j += 2) {
                double a = r.values[j];
                double b = r.values[j + 1];
                r.values[j] = c * a - s * b;
                r.values[j + 1] = s * a + c * b;
            }
        }
        r.label = benign ? "benign" : "malicious";
        records.push_back(std::move(r));
    }

    Schema schema;
    schema.label_column = "label";
    for (std::size_t j = 0; j < cfg.n_features; ++j) {
        schema.feature_names.push_back("f" + std::to_string(j));
    }
    std::ostringstream prov;
    prov << "synthgen(" << side << ", n=" << cfg.n_records << ", seed=" << cfg.seed << ")";
    return Dataset(std::move(schema), std::move(records), prov.str());
}

} // namespace

std::pair<Dataset, Dataset> generate_pair(const SynthConfig& cfg) {
    cfg.validate();
    return {generate_side(cfg, false, "train"), generate_side(cfg, true, "test")};
}

} // namespace nids
