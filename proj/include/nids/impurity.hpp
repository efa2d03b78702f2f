#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "nids/common.hpp"

namespace nids {

enum class SplitCriterion { gini, entropy };

SplitCriterion criterion_from_string(const std::string& s);

// 1 - sum p_c^2
double gini(std::span<const std::uint64_t> class_counts);
// bits: -sum p_c log2 p_c, with 0 log 0 = 0
double entropy(std::span<const std::uint64_t> class_counts);

double impurity(SplitCriterion c, std::span<const std::uint64_t> class_counts);

// Label-keyed convenience forms.
double gini(const std::map<std::string, std::uint64_t>& class_counts);
double entropy(const std::map<std::string, std::uint64_t>& class_counts);

} // namespace nids
