// AVX2 backend. Must reproduce the scalar reference bit for bit: vector lane
// l holds the partial sum of elements 4i+l, tails are folded into the low
// lanes, and the final combine is (l0+l2)+(l1+l3). mul+add only, no FMA.

#include "nids/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

namespace nids::kern {

namespace {

inline double combine_lanes(__m256d acc, const double* a_tail, const double* b_tail,
                            std::size_t tail) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t i = 0; i < tail; ++i) lane[i] += a_tail[i] * b_tail[i];
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    return combine_lanes(acc, a + n4, b + n4, n - n4);
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t i = n4; i < n; ++i) lane[i - n4] += a[i];
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

double sumsq_centered_avx2(const double* a, std::size_t n, double mean) {
    __m256d acc = _mm256_setzero_pd();
    __m256d vm = _mm256_set1_pd(mean);
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), vm);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t i = n4; i < n; ++i) {
        double d = a[i] - mean;
        lane[i - n4] += d * d;
    }
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (std::size_t i = n4; i < n; ++i) y[i] += alpha * x[i];
}

void vadd_avx2(double* acc, const double* x, std::size_t n) {
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d v = _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i));
        _mm256_storeu_pd(acc + i, v);
    }
    for (std::size_t i = n4; i < n; ++i) acc[i] += x[i];
}

void accum_sq_diff_avx2(double* acc, const double* x, const double* mu, std::size_t n) {
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mu + i));
        __m256d v = _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(d, d));
        _mm256_storeu_pd(acc + i, v);
    }
    for (std::size_t i = n4; i < n; ++i) {
        double d = x[i] - mu[i];
        acc[i] += d * d;
    }
}

void standardize_row_avx2(const double* x, const double* mean, const double* inv_sigma,
                          double* out, std::size_t n) {
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(d, _mm256_loadu_pd(inv_sigma + i)));
    }
    for (std::size_t i = n4; i < n; ++i) out[i] = (x[i] - mean[i]) * inv_sigma[i];
}

double gaussian_loglik_avx2(const double* x, const double* mean, const double* half_inv_var,
                            const double* log_norm, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t n4 = n & ~std::size_t(3);
    for (std::size_t i = 0; i < n4; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
        __m256d q = _mm256_mul_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(half_inv_var + i));
        acc = _mm256_add_pd(acc, _mm256_sub_pd(_mm256_loadu_pd(log_norm + i), q));
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    for (std::size_t i = n4; i < n; ++i) {
        double d = x[i] - mean[i];
        lane[i - n4] += log_norm[i] - d * d * half_inv_var[i];
    }
    return (lane[0] + lane[2]) + (lane[1] + lane[3]);
}

} // namespace

const Backend* avx2_backend_impl() {
    static const Backend backend{
        "avx2",
        dot_avx2,
        sum_avx2,
        sumsq_centered_avx2,
        axpy_avx2,
        vadd_avx2,
        accum_sq_diff_avx2,
        standardize_row_avx2,
        gaussian_loglik_avx2,
    };
    return &backend;
}

} // namespace nids::kern

#endif // __AVX2__
