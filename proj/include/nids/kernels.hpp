#pragma once

#include <cstddef>

// Numeric inner-loop kernels with a scalar reference implementation and an
// AVX2 variant selected at runtime. Every reduction is defined with a fixed
// 4-lane accumulation order (lane l sums elements 4i+l, lanes combine as
// (l0+l2)+(l1+l3)), so the two backends produce bit-identical results and
// backend selection can never change model output.
//
// The backend can be forced with the NIDS_KERNELS environment variable
// ("scalar" or "avx2") or force_backend().

namespace nids::kern {

struct Backend {
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    // sum of (a[i] - mean)^2
    double (*sumsq_centered)(const double* a, std::size_t n, double mean);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // acc += x
    void (*vadd)(double* acc, const double* x, std::size_t n);
    // acc += (x - mu)^2, elementwise
    void (*accum_sq_diff)(double* acc, const double* x, const double* mu, std::size_t n);
    // out = (x - mean) * inv_sigma, elementwise
    void (*standardize_row)(const double* x, const double* mean, const double* inv_sigma,
                            double* out, std::size_t n);
    // sum of (log_norm[i] - (x[i]-mean[i])^2 * half_inv_var[i])
    double (*gaussian_loglik)(const double* x, const double* mean, const double* half_inv_var,
                              const double* log_norm, std::size_t n);
};

const Backend& scalar_backend();
const Backend* avx2_backend(); // nullptr when unavailable on this CPU/build
const Backend& active();
void force_backend(const char* name); // throws nids::Error for unknown/unavailable

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum(const double* a, std::size_t n) { return active().sum(a, n); }
inline double sumsq_centered(const double* a, std::size_t n, double mean) {
    return active().sumsq_centered(a, n, mean);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
    active().axpy(alpha, x, y, n);
}
inline void vadd(double* acc, const double* x, std::size_t n) { active().vadd(acc, x, n); }
inline void accum_sq_diff(double* acc, const double* x, const double* mu, std::size_t n) {
    active().accum_sq_diff(acc, x, mu, n);
}
inline void standardize_row(const double* x, const double* mean, const double* inv_sigma,
                            double* out, std::size_t n) {
    active().standardize_row(x, mean, inv_sigma, out, n);
}
inline double gaussian_loglik(const double* x, const double* mean, const double* half_inv_var,
                              const double* log_norm, std::size_t n) {
    return active().gaussian_loglik(x, mean, half_inv_var, log_norm, n);
}

// out = W x + bias, W row-major (out_n x in_n); each row uses dot()'s
// fixed-order reduction.
void matvec(const double* w, const double* bias, const double* x, double* out,
            std::size_t out_n, std::size_t in_n);

} // namespace nids::kern
