#include <glucest/forest.hpp>
#include <glucest/rng.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

namespace glucest {

int ForestParams::resolved_mtry(Eigen::Index n_features) const {
    if (mtry) return *mtry;
    return static_cast<int>((n_features + 2) / 3);
}

void ForestParams::validate(Eigen::Index n_features) const {
    if (n_trees < 1) throw Error("forest: n_trees must be at least 1");
    if (max_depth && *max_depth < 1) throw Error("forest: max_depth must be positive");
    if (min_samples_leaf < 1) throw Error("forest: min_samples_leaf must be positive");
    const int m = resolved_mtry(n_features);
    if (m < 1 || m > n_features)
        throw Error("forest: mtry " + std::to_string(m) + " outside [1, " + std::to_string(n_features) + "]");
}

double Tree::predict(std::span<const double> x) const {
    std::size_t node = 0;
    while (feature[node] >= 0) {
        node = static_cast<std::size_t>(x[static_cast<std::size_t>(feature[node])] <= threshold[node]
                                            ? left[node]
                                            : right[node]);
    }
    return value[node];
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Vector& y, const ForestParams& params, int mtry, std::uint64_t seed)
        : x_(x), y_(y), params_(params), mtry_(mtry), rng_(seed),
          gains_(static_cast<std::size_t>(x.cols()), 0.0) {}

    Tree grow() {
        const auto n = static_cast<std::size_t>(x_.rows());
        rows_.resize(n);
        if (params_.bootstrap) {
            for (auto& r : rows_) r = static_cast<Eigen::Index>(rng_.below(n));
        } else {
            for (std::size_t i = 0; i < n; ++i) rows_[i] = static_cast<Eigen::Index>(i);
        }
        build(0, n, 0);
        return std::move(tree_);
    }

    const std::vector<double>& gains() const { return gains_; }

private:
    int add_node() {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0.0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.value.push_back(0.0);
        return static_cast<int>(tree_.size() - 1);
    }

    int build(std::size_t begin, std::size_t end, int depth) {
        const int node = add_node();
        const std::size_t n = end - begin;
        double sum = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = y_[rows_[i]];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const auto leaf = static_cast<std::size_t>(node);
        tree_.value[leaf] = lo == hi ? lo : std::clamp(sum / static_cast<double>(n), lo, hi);

        const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
        if (lo == hi || n < 2 * min_leaf || (params_.max_depth && depth >= *params_.max_depth))
            return node;

        const Split best = find_split(begin, end, sum);
        if (best.feature < 0) return node;

        gains_[static_cast<std::size_t>(best.feature)] += std::max(0.0, best.gain);
        const auto mid = std::stable_partition(
            rows_.begin() + static_cast<std::ptrdiff_t>(begin), rows_.begin() + static_cast<std::ptrdiff_t>(end),
            [&](Eigen::Index r) { return x_(r, best.feature) <= best.threshold; });
        const auto split_at = static_cast<std::size_t>(mid - rows_.begin());

        const int l = build(begin, split_at, depth + 1);
        const int r = build(split_at, end, depth + 1);
        tree_.feature[leaf] = best.feature;
        tree_.threshold[leaf] = best.threshold;
        tree_.left[leaf] = l;
        tree_.right[leaf] = r;
        return node;
    }

    // Visits features in random order until mtry non-constant ones have been
    // scanned (or the features run out).
    Split find_split(std::size_t begin, std::size_t end, double sum) {
        const auto k = static_cast<std::size_t>(x_.cols());
        pool_.resize(k);
        for (std::size_t f = 0; f < k; ++f) pool_[f] = static_cast<int>(f);

        Split best;
        int scanned = 0;
        for (std::size_t i = 0; i < k && scanned < mtry_; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.below(k - i));
            std::swap(pool_[i], pool_[j]);
            if (scan_feature(pool_[i], begin, end, sum, best)) ++scanned;
        }
        return best;
    }

    // Returns false when the feature is constant on the node.
    bool scan_feature(int f, std::size_t begin, std::size_t end, double sum, Split& best) {
        pairs_.clear();
        for (std::size_t i = begin; i < end; ++i) pairs_.emplace_back(x_(rows_[i], f), y_[rows_[i]]);
        std::stable_sort(pairs_.begin(), pairs_.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        if (pairs_.front().first == pairs_.back().first) return false;

        const std::size_t n = pairs_.size();
        const auto min_leaf = static_cast<std::size_t>(params_.min_samples_leaf);
        const double parent = sum * sum / static_cast<double>(n);
        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += pairs_[i].second;
            const std::size_t nl = i + 1;
            const std::size_t nr = n - nl;
            if (pairs_[i].first == pairs_[i + 1].first || nl < min_leaf || nr < min_leaf) continue;
            const double right_sum = sum - left_sum;
            const double gain = left_sum * left_sum / static_cast<double>(nl) +
                                right_sum * right_sum / static_cast<double>(nr) - parent;
            double threshold = pairs_[i].first + 0.5 * (pairs_[i + 1].first - pairs_[i].first);
            if (!(threshold < pairs_[i + 1].first)) threshold = pairs_[i].first;
            const bool better = gain > best.gain ||
                                (gain == best.gain && (f < best.feature ||
                                                       (f == best.feature && threshold < best.threshold)));
            if (better) best = {f, threshold, gain};
        }
        return true;
    }

    const Matrix& x_;
    const Vector& y_;
    const ForestParams& params_;
    int mtry_;
    Rng rng_;
    Tree tree_;
    std::vector<double> gains_;
    std::vector<Eigen::Index> rows_;
    std::vector<int> pool_;
    std::vector<std::pair<double, double>> pairs_;
};

void check_tree(const Tree& t, Eigen::Index n_features) {
    const std::size_t n = t.size();
    if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.value.size() != n)
        throw Error("forest: malformed tree arrays");
    for (std::size_t i = 0; i < n; ++i) {
        if (t.feature[i] < 0) continue;
        if (t.feature[i] >= n_features) throw Error("forest: node feature index out of range");
        // Children always follow their parent, which rules out cycles.
        for (int c : {t.left[i], t.right[i]}) {
            if (c <= static_cast<int>(i) || c >= static_cast<int>(n)) throw Error("forest: bad child link");
        }
    }
}

} // namespace

Forest::Forest(std::vector<Tree> trees, ForestParams params, Vector importances, Eigen::Index n_features,
               double target_min, double target_max)
    : trees_(std::move(trees)), params_(std::move(params)), importances_(std::move(importances)),
      n_features_(n_features), target_min_(target_min), target_max_(target_max) {
    if (trees_.empty()) throw Error("forest: no trees");
    if (importances_.size() != n_features_) throw Error("forest: importance length mismatch");
    if (!(target_min_ <= target_max_)) throw Error("forest: invalid target range");
    for (const auto& t : trees_) check_tree(t, n_features_);
}

double Forest::predict(std::span<const double> x) const {
    if (static_cast<Eigen::Index>(x.size()) != n_features_)
        throw Error("forest: expected " + std::to_string(n_features_) + " features, got " +
                    std::to_string(x.size()));
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(x);
    return std::clamp(sum / static_cast<double>(trees_.size()), target_min_, target_max_);
}

double Forest::predict(const Vector& x) const {
    return predict(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Vector Forest::predict_rows(const Matrix& rows) const {
    if (rows.cols() != n_features_)
        throw Error("forest: expected " + std::to_string(n_features_) + " features, got " +
                    std::to_string(rows.cols()));
    Vector out(rows.rows());
    Vector row(rows.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        row = rows.row(i).transpose();
        out[i] = predict(row);
    }
    return out;
}

Forest fit_forest(const Matrix& x, const Vector& y, const ForestParams& params) {
    if (x.rows() < 2) throw Error("forest: need at least 2 rows, got " + std::to_string(x.rows()));
    if (x.rows() != y.size()) throw Error("forest: feature rows do not match target length");
    if (!x.allFinite() || !y.allFinite()) throw Error("forest: non-finite input");
    params.validate(x.cols());
    const int mtry = params.resolved_mtry(x.cols());

    ForestParams stored = params;
    stored.mtry = mtry;

    const auto n_trees = static_cast<std::size_t>(params.n_trees);
    std::vector<Tree> trees(n_trees);
    std::vector<std::vector<double>> gains(n_trees);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < n_trees; t = next++) {
            TreeBuilder builder(x, y, params, mtry, derive_seed(params.seed, t));
            trees[t] = builder.grow();
            gains[t] = builder.gains();
        }
    };
    unsigned n_threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_trees));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    // Summed in tree order so the total is independent of scheduling.
    Vector importances = Vector::Zero(x.cols());
    for (const auto& g : gains)
        for (Eigen::Index k = 0; k < x.cols(); ++k) importances[k] += g[static_cast<std::size_t>(k)];
    const double total = importances.sum();
    if (total > 0.0) {
        importances /= total;
    } else {
        importances.setConstant(1.0 / static_cast<double>(x.cols()));
    }
    return Forest(std::move(trees), stored, std::move(importances), x.cols(), y.minCoeff(), y.maxCoeff());
}

} // namespace glucest
