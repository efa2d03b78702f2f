#include "nids/tree.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace nids {

namespace {

struct SideAggregate {
    // Incremental impurity bookkeeping for one side of a candidate split.
    std::vector<std::uint64_t> counts;
    std::uint64_t n = 0;
    double sumsq = 0.0;    // sum of counts^2 (gini)
    double sumclog = 0.0;  // sum of c*log2(c) (entropy)

    explicit SideAggregate(std::size_t n_classes) : counts(n_classes, 0) {}

    void add(std::int32_t cls) {
        auto c = counts[cls];
        sumsq += static_cast<double>(2 * c + 1);
        if (c > 0) sumclog -= static_cast<double>(c) * std::log2(static_cast<double>(c));
        ++counts[cls];
        sumclog += static_cast<double>(c + 1) * std::log2(static_cast<double>(c + 1));
        ++n;
    }

    void remove(std::int32_t cls) {
        auto c = counts[cls];
        sumsq -= static_cast<double>(2 * c - 1);
        sumclog -= static_cast<double>(c) * std::log2(static_cast<double>(c));
        --counts[cls];
        if (c > 1) sumclog += static_cast<double>(c - 1) * std::log2(static_cast<double>(c - 1));
        --n;
    }

    double impurity(SplitCriterion crit) const {
        if (n == 0) return 0.0;
        double dn = static_cast<double>(n);
        if (crit == SplitCriterion::gini) return 1.0 - sumsq / (dn * dn);
        return std::log2(dn) - sumclog / dn;
    }
};

struct Job {
    std::vector<std::size_t> idx;
    std::size_t depth;
    std::int32_t parent; // -1 for root
    bool is_left;
};

std::int32_t majority_class(const std::vector<std::uint64_t>& counts) {
    std::int32_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] > counts[best]) best = static_cast<std::int32_t>(c);
    }
    return best;
}

} // namespace

TreeState build_tree(const DesignMatrix& m, std::vector<std::size_t> sample_indices,
                     const TreeParams& params, Rng& rng) {
    if (m.n == 0) throw Error("build_tree: empty training data");
    const std::size_t n_classes = m.classes.size();
    const std::size_t total = sample_indices.size();

    TreeState tree;
    tree.raw_importance.assign(m.d, 0.0);

    std::size_t subset_size = m.d;
    if (params.feature_subsample) {
        subset_size = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(m.d))));
    }

    std::vector<std::size_t> feature_pool(m.d);
    for (std::size_t i = 0; i < m.d; ++i) feature_pool[i] = i;

    std::vector<Job> stack;
    stack.push_back({std::move(sample_indices), 0, -1, false});

    std::vector<std::pair<double, std::int32_t>> column; // (value, class) within node

    while (!stack.empty()) {
        Job job = std::move(stack.back());
        stack.pop_back();

        const auto me = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (job.parent >= 0) {
            auto& p = tree.nodes[job.parent];
            (job.is_left ? p.left : p.right) = me;
        }

        std::vector<std::uint64_t> counts(n_classes, 0);
        for (std::size_t i : job.idx) ++counts[m.y[i]];
        const std::size_t n_node = job.idx.size();

        bool pure = false;
        for (auto c : counts) {
            if (c == n_node) {
                pure = true;
                break;
            }
        }
        bool depth_stop = params.max_depth > 0 && job.depth >= params.max_depth;
        bool size_stop = n_node < params.min_samples_split;

        auto make_leaf = [&] {
            auto& node = tree.nodes[me];
            node.feature = -1;
            node.counts = counts;
            node.majority = majority_class(counts);
        };

        if (pure || depth_stop || size_stop) {
            make_leaf();
            continue;
        }

        // Candidate features, ascending index so gain ties resolve by order.
        std::vector<std::size_t> candidates;
        if (params.feature_subsample && subset_size < m.d) {
            std::vector<std::size_t> pool = feature_pool;
            for (std::size_t i = 0; i < subset_size; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.bounded(pool.size() - i));
                std::swap(pool[i], pool[j]);
            }
            candidates.assign(pool.begin(), pool.begin() + static_cast<long>(subset_size));
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates = feature_pool;
        }

        const double parent_imp =
            impurity(params.criterion, std::span<const std::uint64_t>(counts));

        double best_gain = 0.0;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        bool found = false;
        // Parity-style nodes can be impure with every candidate split at zero
        // gain; the first valid boundary is used then so recursion still
        // reaches purity.
        bool have_fallback = false;
        std::size_t fallback_feature = 0;
        double fallback_threshold = 0.0;

        for (std::size_t f : candidates) {
            column.clear();
            column.reserve(n_node);
            for (std::size_t i : job.idx) column.emplace_back(m.x[i * m.d + f], m.y[i]);
            std::sort(column.begin(), column.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (column.front().first == column.back().first) continue; // constant in node

            SideAggregate left(n_classes);
            SideAggregate right(n_classes);
            for (const auto& [v, c] : column) right.add(c);

            for (std::size_t pos = 0; pos + 1 < column.size(); ++pos) {
                left.add(column[pos].second);
                right.remove(column[pos].second);
                if (column[pos].first == column[pos + 1].first) continue;
                if (!have_fallback) {
                    have_fallback = true;
                    fallback_feature = f;
                    fallback_threshold = (column[pos].first + column[pos + 1].first) / 2.0;
                }
                double nl = static_cast<double>(left.n);
                double nr = static_cast<double>(right.n);
                double child =
                    (nl * left.impurity(params.criterion) + nr * right.impurity(params.criterion)) /
                    static_cast<double>(n_node);
                double gain = parent_imp - child;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = (column[pos].first + column[pos + 1].first) / 2.0;
                    found = true;
                }
            }
        }

        if (!found) {
            if (!have_fallback) {
                make_leaf();
                continue;
            }
            best_feature = fallback_feature;
            best_threshold = fallback_threshold;
            best_gain = 0.0;
        }

        std::vector<std::size_t> left_idx;
        std::vector<std::size_t> right_idx;
        for (std::size_t i : job.idx) {
            (m.x[i * m.d + best_feature] <= best_threshold ? left_idx : right_idx).push_back(i);
        }

        tree.raw_importance[best_feature] +=
            (static_cast<double>(n_node) / static_cast<double>(total)) * best_gain;

        auto& node = tree.nodes[me];
        node.feature = static_cast<std::int32_t>(best_feature);
        node.threshold = best_threshold;

        // Push right first so the left child is built next (preorder).
        stack.push_back({std::move(right_idx), job.depth + 1, me, false});
        stack.push_back({std::move(left_idx), job.depth + 1, me, true});
    }

    return tree;
}

std::int32_t tree_predict_class(const TreeState& t, const double* x) {
    std::int32_t node = 0;
    while (t.nodes[node].feature >= 0) {
        const auto& n = t.nodes[node];
        node = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return t.nodes[node].majority;
}

ForestState build_forest(const DesignMatrix& m, std::size_t n_trees, const TreeParams& params,
                         bool bootstrap, std::uint64_t seed) {
    ForestState forest;
    forest.trees.resize(n_trees);

    auto build_one = [&](std::size_t t) {
        Rng rng(derive_seed(seed, "tree", t));
        std::vector<std::size_t> idx(m.n);
        if (bootstrap) {
            for (std::size_t i = 0; i < m.n; ++i) idx[i] = static_cast<std::size_t>(rng.bounded(m.n));
        } else {
            for (std::size_t i = 0; i < m.n; ++i) idx[i] = i;
        }
        forest.trees[t] = build_tree(m, std::move(idx), params, rng);
    };

    // Per-tree seeds make parallel fitting equal sequential fitting.
    unsigned workers = std::min<unsigned>(std::thread::hardware_concurrency(),
                                          static_cast<unsigned>(n_trees));
    if (workers > 1) {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back([&] {
                while (true) {
                    std::size_t t = next.fetch_add(1);
                    if (t >= n_trees) return;
                    build_one(t);
                }
            });
        }
        for (auto& th : threads) th.join();
    } else {
        for (std::size_t t = 0; t < n_trees; ++t) build_one(t);
    }
    return forest;
}

std::int32_t forest_predict_class(const ForestState& f, const double* x, std::size_t n_classes) {
    std::vector<std::uint32_t> votes(n_classes, 0);
    for (const auto& t : f.trees) ++votes[tree_predict_class(t, x)];
    std::int32_t best = 0;
    for (std::size_t c = 1; c < n_classes; ++c) {
        if (votes[c] > votes[best]) best = static_cast<std::int32_t>(c);
    }
    return best;
}

std::vector<double> forest_importances(const ForestState& f, std::size_t d) {
    std::vector<double> avg(d, 0.0);
    if (f.trees.empty()) return avg;
    for (const auto& t : f.trees) {
        for (std::size_t j = 0; j < d; ++j) avg[j] += t.raw_importance[j];
    }
    double total = 0.0;
    for (auto& v : avg) {
        v /= static_cast<double>(f.trees.size());
        total += v;
    }
    if (total > 0.0) {
        for (auto& v : avg) v /= total;
    }
    return avg;
}

} // namespace nids
