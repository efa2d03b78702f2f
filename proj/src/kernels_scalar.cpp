// Scalar reference backend. This file is the semantic definition of every
// kernel; the AVX2 backend must match it bit for bit. Compiled with
// -ffp-contract=off so no FMA contraction changes rounding.

#include "nids/kernels.hpp"

namespace nids::kern {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    for (std::size_t i = n4; i < n; ++i) acc[i - n4] += a[i] * b[i];
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sum_scalar(const double* a, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc[0] += a[i];
        acc[1] += a[i + 1];
        acc[2] += a[i + 2];
        acc[3] += a[i + 3];
    }
    for (std::size_t i = n4; i < n; ++i) acc[i - n4] += a[i];
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

double sumsq_centered_scalar(const double* a, std::size_t n, double mean) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        double d0 = a[i] - mean;
        double d1 = a[i + 1] - mean;
        double d2 = a[i + 2] - mean;
        double d3 = a[i + 3] - mean;
        acc[0] += d0 * d0;
        acc[1] += d1 * d1;
        acc[2] += d2 * d2;
        acc[3] += d3 * d3;
    }
    for (std::size_t i = n4; i < n; ++i) {
        double d = a[i] - mean;
        acc[i - n4] += d * d;
    }
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void vadd_scalar(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void accum_sq_diff_scalar(double* acc, const double* x, const double* mu, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - mu[i];
        acc[i] += d * d;
    }
}

void standardize_row_scalar(const double* x, const double* mean, const double* inv_sigma,
                            double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mean[i]) * inv_sigma[i];
}

double gaussian_loglik_scalar(const double* x, const double* mean, const double* half_inv_var,
                              const double* log_norm, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        double d0 = x[i] - mean[i];
        double d1 = x[i + 1] - mean[i + 1];
        double d2 = x[i + 2] - mean[i + 2];
        double d3 = x[i + 3] - mean[i + 3];
        acc[0] += log_norm[i] - d0 * d0 * half_inv_var[i];
        acc[1] += log_norm[i + 1] - d1 * d1 * half_inv_var[i + 1];
        acc[2] += log_norm[i + 2] - d2 * d2 * half_inv_var[i + 2];
        acc[3] += log_norm[i + 3] - d3 * d3 * half_inv_var[i + 3];
    }
    for (std::size_t i = n4; i < n; ++i) {
        double d = x[i] - mean[i];
        acc[i - n4] += log_norm[i] - d * d * half_inv_var[i];
    }
    return (acc[0] + acc[2]) + (acc[1] + acc[3]);
}

} // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",
        dot_scalar,
        sum_scalar,
        sumsq_centered_scalar,
        axpy_scalar,
        vadd_scalar,
        accum_sq_diff_scalar,
        standardize_row_scalar,
        gaussian_loglik_scalar,
    };
    return backend;
}

void matvec(const double* w, const double* bias, const double* x, double* out,
            std::size_t out_n, std::size_t in_n) {
    const Backend& b = active();
    for (std::size_t r = 0; r < out_n; ++r) {
        out[r] = b.dot(w + r * in_n, x, in_n) + (bias ? bias[r] : 0.0);
    }
}

} // namespace nids::kern
