#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nids/classifier.hpp"

namespace nids {

struct SvmTrainResult {
    SvmState state;                     // averaged iterate
    std::vector<double> epoch_objective; // objective of the averaged iterate per epoch
};

// Pegasos-style stochastic subgradient descent on
//   (lambda/2) ||w||^2 + mean_i max(0, 1 - y_i (w.x_i + b)),
// step 1/(lambda t), bias unregularized, class ids {0,1} mapped to {-1,+1}.
// Inputs are expected standardized. Returns the running average of iterates.
SvmTrainResult train_svm(const std::vector<double>& x, const std::vector<std::int32_t>& y,
                         std::size_t n, std::size_t d, double lambda, std::size_t epochs,
                         std::uint64_t seed);

double svm_objective(std::span<const double> w, double bias, double lambda,
                     const std::vector<double>& x, const std::vector<std::int32_t>& y,
                     std::size_t n, std::size_t d);

std::int32_t svm_predict_class(const SvmState& s, const double* x, std::size_t d);

} // namespace nids
