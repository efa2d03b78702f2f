#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nids/classifier.hpp"

namespace nids {

// Single-layer mapping f(Wx + b). Activations: relu, sigmoid, identity,
// softmax (output layers use softmax).
std::vector<double> mlp_forward(const MlpLayerState& layer, std::span<const double> x);

struct MlpGrad {
    std::vector<std::vector<double>> w; // same shapes as layers
    std::vector<std::vector<double>> b;
};

struct MlpNet {
    std::vector<MlpLayerState> layers;

    // sizes = [input, hidden..., output]; hidden activation shared, output
    // softmax. Weights U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases 0.
    static MlpNet create(const std::vector<std::size_t>& sizes, const std::string& hidden_activation,
                         std::uint64_t seed);

    std::vector<double> forward(const double* x) const; // output probabilities

    // Mean cross-entropy over the batch; gradients accumulated into `grad`
    // (resized/zeroed here).
    double loss_and_grad(const std::vector<double>& x, const std::vector<std::int32_t>& y,
                         std::size_t d, std::span<const std::size_t> batch, MlpGrad& grad) const;

    double loss(const std::vector<double>& x, const std::vector<std::int32_t>& y, std::size_t d,
                std::span<const std::size_t> batch) const;

    void apply_gradient(const MlpGrad& grad, double learning_rate);
};

// Seeded mini-batch gradient descent on cross-entropy.
void train_mlp(MlpNet& net, const std::vector<double>& x, const std::vector<std::int32_t>& y,
               std::size_t n, std::size_t d, std::size_t epochs, std::size_t batch_size,
               double learning_rate, std::uint64_t seed);

std::int32_t mlp_predict_class(const MlpState& s, const double* x);

} // namespace nids
