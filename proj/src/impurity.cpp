#include "nids/impurity.hpp"

#include <cmath>
#include <vector>

namespace nids {

SplitCriterion criterion_from_string(const std::string& s) {
    if (s == "gini") return SplitCriterion::gini;
    if (s == "entropy") return SplitCriterion::entropy;
    throw Error("unknown split criterion: '" + s + "'");
}

namespace {

std::uint64_t total_of(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw Error("impurity of empty class counts");
    return total;
}

} // namespace

double gini(std::span<const std::uint64_t> class_counts) {
    double total = static_cast<double>(total_of(class_counts));
    double sumsq = 0.0;
    for (auto c : class_counts) {
        double p = static_cast<double>(c) / total;
        sumsq += p * p;
    }
    return 1.0 - sumsq;
}

double entropy(std::span<const std::uint64_t> class_counts) {
    double total = static_cast<double>(total_of(class_counts));
    double h = 0.0;
    for (auto c : class_counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

double impurity(SplitCriterion c, std::span<const std::uint64_t> class_counts) {
    return c == SplitCriterion::gini ? gini(class_counts) : entropy(class_counts);
}

namespace {
std::vector<std::uint64_t> flatten(const std::map<std::string, std::uint64_t>& counts) {
    std::vector<std::uint64_t> v;
    v.reserve(counts.size());
    for (const auto& [label, c] : counts) v.push_back(c);
    return v;
}
} // namespace

double gini(const std::map<std::string, std::uint64_t>& class_counts) {
    return gini(std::span<const std::uint64_t>(flatten(class_counts)));
}

double entropy(const std::map<std::string, std::uint64_t>& class_counts) {
    return entropy(std::span<const std::uint64_t>(flatten(class_counts)));
}

} // namespace nids
