#include "nids/svm.hpp"

#include <algorithm>
#include <cmath>

#include "nids/kernels.hpp"
#include "nids/rng.hpp"

namespace nids {

SvmTrainResult train_svm(const std::vector<double>& x, const std::vector<std::int32_t>& y,
                         std::size_t n, std::size_t d, double lambda, std::size_t epochs,
                         std::uint64_t seed) {
    if (n == 0) throw Error("train_svm: empty training data");
    if (!(lambda > 0.0)) throw Error("train_svm: lambda must be > 0");

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> w_avg(d, 0.0);
    double b_avg = 0.0;

    Rng rng(derive_seed(seed, "svm"));
    SvmTrainResult result;
    result.epoch_objective.reserve(epochs);

    std::uint64_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t step = 0; step < n; ++step) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t));
            const auto i = static_cast<std::size_t>(rng.bounded(n));
            const double* xi = x.data() + i * d;
            const double yi = y[i] == 1 ? 1.0 : -1.0;
            const double margin = yi * (kern::dot(w.data(), xi, d) + b);

            const double shrink = 1.0 - eta * lambda;
            for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
            if (margin < 1.0) {
                kern::axpy(eta * yi, xi, w.data(), d);
                b += eta * yi;
            }

            const double inv_t = 1.0 / static_cast<double>(t);
            for (std::size_t j = 0; j < d; ++j) w_avg[j] += (w[j] - w_avg[j]) * inv_t;
            b_avg += (b - b_avg) * inv_t;
        }
        result.epoch_objective.push_back(
            svm_objective(std::span<const double>(w_avg), b_avg, lambda, x, y, n, d));
    }

    result.state.w = std::move(w_avg);
    result.state.bias = b_avg;
    result.state.lambda = lambda;
    return result;
}

double svm_objective(std::span<const double> w, double bias, double lambda,
                     const std::vector<double>& x, const std::vector<std::int32_t>& y,
                     std::size_t n, std::size_t d) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double yi = y[i] == 1 ? 1.0 : -1.0;
        const double margin = yi * (kern::dot(w.data(), x.data() + i * d, d) + bias);
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * lambda * kern::dot(w.data(), w.data(), d) + hinge / static_cast<double>(n);
}

std::int32_t svm_predict_class(const SvmState& s, const double* x, std::size_t d) {
    // Decision value of exactly 0 breaks toward the first label.
    const double value = kern::dot(s.w.data(), x, d) + s.bias;
    return value > 0.0 ? 1 : 0;
}

} // namespace nids
