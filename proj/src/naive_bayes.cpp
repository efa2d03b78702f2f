#include "nids/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nids/kernels.hpp"

namespace nids {

namespace {

// Derived arrays recomputed deterministically from the stored parameters.
struct GaussianTables {
    std::vector<double> half_inv_var; // class-major
    std::vector<double> log_norm;     // class-major
};

GaussianTables gaussian_tables(const NaiveBayesState& s) {
    GaussianTables t;
    t.half_inv_var.resize(s.variance.size());
    t.log_norm.resize(s.variance.size());
    for (std::size_t i = 0; i < s.variance.size(); ++i) {
        t.half_inv_var[i] = 0.5 / s.variance[i];
        t.log_norm[i] = -0.5 * std::log(2.0 * std::numbers::pi * s.variance[i]);
    }
    return t;
}

double column_median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

NaiveBayesState fit_naive_bayes(const DesignMatrix& m, const std::string& variant,
                                double var_smoothing) {
    const std::size_t n_classes = m.classes.size();
    NaiveBayesState s;
    s.variant = variant;

    std::vector<std::size_t> class_n(n_classes, 0);
    for (auto y : m.y) ++class_n[y];
    s.log_prior.resize(n_classes);
    for (std::size_t c = 0; c < n_classes; ++c) {
        s.log_prior[c] =
            std::log(static_cast<double>(class_n[c]) / static_cast<double>(m.n));
    }

    if (variant == "gaussian") {
        s.mean.assign(n_classes * m.d, 0.0);
        s.variance.assign(n_classes * m.d, 0.0);
        for (std::size_t i = 0; i < m.n; ++i) {
            const double* row = m.row(i);
            double* mu = s.mean.data() + static_cast<std::size_t>(m.y[i]) * m.d;
            kern::vadd(mu, row, m.d);
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            double* mu = s.mean.data() + c * m.d;
            for (std::size_t j = 0; j < m.d; ++j) mu[j] /= static_cast<double>(class_n[c]);
        }
        for (std::size_t i = 0; i < m.n; ++i) {
            const double* row = m.row(i);
            auto c = static_cast<std::size_t>(m.y[i]);
            kern::accum_sq_diff(s.variance.data() + c * m.d, row, s.mean.data() + c * m.d, m.d);
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            double* var = s.variance.data() + c * m.d;
            for (std::size_t j = 0; j < m.d; ++j) var[j] /= static_cast<double>(class_n[c]);
        }

        // Smoothing floor from the pooled per-feature variance.
        double max_var = 0.0;
        for (std::size_t j = 0; j < m.d; ++j) {
            double mean_j = 0.0;
            for (std::size_t i = 0; i < m.n; ++i) mean_j += m.x[i * m.d + j];
            mean_j /= static_cast<double>(m.n);
            double ss = 0.0;
            for (std::size_t i = 0; i < m.n; ++i) {
                double dlt = m.x[i * m.d + j] - mean_j;
                ss += dlt * dlt;
            }
            max_var = std::max(max_var, ss / static_cast<double>(m.n));
        }
        double floor = max_var > 0.0 ? var_smoothing * max_var : var_smoothing;
        for (auto& v : s.variance) v = std::max(v, floor);
    } else if (variant == "bernoulli") {
        if (n_classes != 2) throw Error("naive_bayes bernoulli supports exactly 2 classes");
        s.median.resize(m.d);
        std::vector<double> col(m.n);
        for (std::size_t j = 0; j < m.d; ++j) {
            for (std::size_t i = 0; i < m.n; ++i) col[i] = m.x[i * m.d + j];
            s.median[j] = column_median(col);
        }
        // Laplace-smoothed P(x_j = 1 | c), binarized at x > median.
        s.log_p1.assign(n_classes * m.d, 0.0);
        s.log_p0.assign(n_classes * m.d, 0.0);
        std::vector<std::uint64_t> ones(n_classes * m.d, 0);
        for (std::size_t i = 0; i < m.n; ++i) {
            const double* row = m.row(i);
            auto c = static_cast<std::size_t>(m.y[i]);
            for (std::size_t j = 0; j < m.d; ++j) {
                if (row[j] > s.median[j]) ++ones[c * m.d + j];
            }
        }
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (std::size_t j = 0; j < m.d; ++j) {
                double p1 = (static_cast<double>(ones[c * m.d + j]) + 1.0) /
                            (static_cast<double>(class_n[c]) + 2.0);
                s.log_p1[c * m.d + j] = std::log(p1);
                s.log_p0[c * m.d + j] = std::log(1.0 - p1);
            }
        }
    } else {
        throw Error("unknown naive_bayes variant: '" + variant + "'");
    }
    return s;
}

std::vector<double> nb_log_posterior(const NaiveBayesState& s, const double* x, std::size_t d,
                                     std::size_t n_classes) {
    std::vector<double> post(n_classes);
    if (s.variant == "gaussian") {
        GaussianTables t = gaussian_tables(s);
        for (std::size_t c = 0; c < n_classes; ++c) {
            post[c] = s.log_prior[c] +
                      kern::gaussian_loglik(x, s.mean.data() + c * d, t.half_inv_var.data() + c * d,
                                            t.log_norm.data() + c * d, d);
        }
    } else {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double ll = s.log_prior[c];
            for (std::size_t j = 0; j < d; ++j) {
                ll += x[j] > s.median[j] ? s.log_p1[c * d + j] : s.log_p0[c * d + j];
            }
            post[c] = ll;
        }
    }
    return post;
}

std::int32_t nb_predict_class(const NaiveBayesState& s, const double* x, std::size_t d,
                              std::size_t n_classes) {
    std::vector<double> post = nb_log_posterior(s, x, d, n_classes);
    std::int32_t best = 0;
    for (std::size_t c = 1; c < n_classes; ++c) {
        if (post[c] > post[best]) best = static_cast<std::int32_t>(c);
    }
    return best;
}

double bayes_posterior(double p_b_given_a, double p_a, double p_b) {
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!in_unit(p_b_given_a) || !in_unit(p_a) || !in_unit(p_b)) {
        throw Error("bayes_posterior: probabilities must be in [0,1]");
    }
    if (p_b <= 0.0) throw Error("bayes_posterior: P(B) must be > 0");
    double result = p_b_given_a * p_a / p_b;
    if (result > 1.0 + 1e-12) {
        throw Error("bayes_posterior: inconsistent inputs (posterior " + std::to_string(result) +
                    " > 1)");
    }
    return std::min(result, 1.0);
}

} // namespace nids
