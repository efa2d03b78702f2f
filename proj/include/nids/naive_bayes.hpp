#pragma once

#include <cstdint>
#include <vector>

#include "nids/classifier.hpp"

namespace nids {

// Gaussian variances are floored at var_smoothing * max-feature-variance
// (absolute var_smoothing when every feature is constant).
NaiveBayesState fit_naive_bayes(const DesignMatrix& m, const std::string& variant,
                                double var_smoothing);

std::int32_t nb_predict_class(const NaiveBayesState& s, const double* x, std::size_t d,
                              std::size_t n_classes);

// Per-class unnormalized log posterior (log prior + log likelihood).
std::vector<double> nb_log_posterior(const NaiveBayesState& s, const double* x, std::size_t d,
                                     std::size_t n_classes);

// Eq.-style posterior: P(A|B) = P(B|A) P(A) / P(B). Errors on p_b = 0 and on
// results above 1 (inconsistent inputs).
double bayes_posterior(double p_b_given_a, double p_a, double p_b);

} // namespace nids
