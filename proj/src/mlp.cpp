#include "nids/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "nids/kernels.hpp"
#include "nids/rng.hpp"

namespace nids {

namespace {

void activate(const std::string& act, std::vector<double>& z) {
    if (act == "identity") return;
    if (act == "relu") {
        for (auto& v : z) v = v > 0.0 ? v : 0.0;
        return;
    }
    if (act == "sigmoid") {
        for (auto& v : z) v = 1.0 / (1.0 + std::exp(-v));
        return;
    }
    if (act == "softmax") {
        double mx = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (auto& v : z) {
            v = std::exp(v - mx);
            sum += v;
        }
        for (auto& v : z) v /= sum;
        return;
    }
    throw Error("unknown activation: '" + act + "'");
}

// Derivative w.r.t. preactivation given the post-activation value.
double activation_deriv(const std::string& act, double activated) {
    if (act == "identity") return 1.0;
    if (act == "relu") return activated > 0.0 ? 1.0 : 0.0;
    if (act == "sigmoid") return activated * (1.0 - activated);
    throw Error("activation_deriv: unsupported activation '" + act + "'");
}

} // namespace

std::vector<double> mlp_forward(const MlpLayerState& layer, std::span<const double> x) {
    if (x.size() != layer.in) {
        throw Error("mlp_forward: input dimension " + std::to_string(x.size()) +
                    " != layer fan-in " + std::to_string(layer.in));
    }
    std::vector<double> z(layer.out);
    kern::matvec(layer.w.data(), layer.b.data(), x.data(), z.data(), layer.out, layer.in);
    activate(layer.activation, z);
    return z;
}

MlpNet MlpNet::create(const std::vector<std::size_t>& sizes, const std::string& hidden_activation,
                      std::uint64_t seed) {
    if (sizes.size() < 2) throw Error("MlpNet: need at least input and output sizes");
    MlpNet net;
    Rng rng(derive_seed(seed, "mlp_init"));
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        MlpLayerState layer;
        layer.in = sizes[l];
        layer.out = sizes[l + 1];
        layer.activation = (l + 2 == sizes.size()) ? "softmax" : hidden_activation;
        layer.w.resize(layer.out * layer.in);
        layer.b.assign(layer.out, 0.0);
        const double r = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (auto& w : layer.w) w = (rng.uniform() * 2.0 - 1.0) * r;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::vector<double> MlpNet::forward(const double* x) const {
    std::vector<double> cur(x, x + layers.front().in);
    for (const auto& layer : layers) {
        cur = mlp_forward(layer, cur);
    }
    return cur;
}

double MlpNet::loss_and_grad(const std::vector<double>& x, const std::vector<std::int32_t>& y,
                             std::size_t d, std::span<const std::size_t> batch,
                             MlpGrad& grad) const {
    grad.w.resize(layers.size());
    grad.b.resize(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        grad.w[l].assign(layers[l].w.size(), 0.0);
        grad.b[l].assign(layers[l].b.size(), 0.0);
    }

    const double inv_batch = 1.0 / static_cast<double>(batch.size());
    double loss_sum = 0.0;

    std::vector<std::vector<double>> acts(layers.size() + 1);
    for (std::size_t i : batch) {
        acts[0].assign(x.data() + i * d, x.data() + i * d + d);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            acts[l + 1] = mlp_forward(layers[l], acts[l]);
        }
        const auto& probs = acts.back();
        double p = std::max(probs[y[i]], 1e-300);
        loss_sum -= std::log(p);

        // softmax + cross-entropy: delta = (p - onehot) / batch
        std::vector<double> delta = probs;
        delta[y[i]] -= 1.0;
        for (auto& v : delta) v *= inv_batch;

        for (std::size_t l = layers.size(); l-- > 0;) {
            const auto& layer = layers[l];
            const auto& input = acts[l];
            // dW_rc += delta_r * input_c ; db_r += delta_r
            for (std::size_t r = 0; r < layer.out; ++r) {
                kern::axpy(delta[r], input.data(), grad.w[l].data() + r * layer.in, layer.in);
                grad.b[l][r] += delta[r];
            }
            if (l == 0) break;
            // delta_prev = (W^T delta) .* f'(act_prev)
            std::vector<double> prev(layer.in, 0.0);
            for (std::size_t r = 0; r < layer.out; ++r) {
                kern::axpy(delta[r], layer.w.data() + r * layer.in, prev.data(), layer.in);
            }
            const auto& below = layers[l - 1];
            for (std::size_t c = 0; c < layer.in; ++c) {
                prev[c] *= activation_deriv(below.activation, acts[l][c]);
            }
            delta = std::move(prev);
        }
    }
    return loss_sum * inv_batch;
}

double MlpNet::loss(const std::vector<double>& x, const std::vector<std::int32_t>& y, std::size_t d,
                    std::span<const std::size_t> batch) const {
    double loss_sum = 0.0;
    for (std::size_t i : batch) {
        std::vector<double> probs = forward(x.data() + i * d);
        loss_sum -= std::log(std::max(probs[y[i]], 1e-300));
    }
    return loss_sum / static_cast<double>(batch.size());
}

void MlpNet::apply_gradient(const MlpGrad& grad, double learning_rate) {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        kern::axpy(-learning_rate, grad.w[l].data(), layers[l].w.data(), layers[l].w.size());
        kern::axpy(-learning_rate, grad.b[l].data(), layers[l].b.data(), layers[l].b.size());
    }
}

void train_mlp(MlpNet& net, const std::vector<double>& x, const std::vector<std::int32_t>& y,
               std::size_t n, std::size_t d, std::size_t epochs, std::size_t batch_size,
               double learning_rate, std::uint64_t seed) {
    if (batch_size == 0) throw Error("train_mlp: batch_size must be > 0");
    Rng rng(derive_seed(seed, "mlp_train"));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    MlpGrad grad;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += batch_size) {
            std::size_t len = std::min(batch_size, n - start);
            std::span<const std::size_t> batch(order.data() + start, len);
            net.loss_and_grad(x, y, d, batch, grad);
            net.apply_gradient(grad, learning_rate);
        }
    }
}

std::int32_t mlp_predict_class(const MlpState& s, const double* x) {
    std::vector<double> cur(x, x + s.layers.front().in);
    for (const auto& layer : s.layers) {
        cur = mlp_forward(layer, cur);
    }
    std::int32_t best = 0;
    for (std::size_t c = 1; c < cur.size(); ++c) {
        if (cur[c] > cur[best]) best = static_cast<std::int32_t>(c);
    }
    return best;
}

} // namespace nids
