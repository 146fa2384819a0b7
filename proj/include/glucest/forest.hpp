#pragma once

#include <glucest/dataset.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace glucest {

struct ForestParams {
    int n_trees = 100;
    std::optional<int> max_depth;      // unlimited when unset
    int min_samples_leaf = 1;
    std::optional<int> mtry;           // ceil(K/3) when unset
    bool bootstrap = true;
    std::uint64_t seed = 0;
    unsigned threads = 0;              // 0: hardware concurrency; never affects results

    int resolved_mtry(Eigen::Index n_features) const;
    void validate(Eigen::Index n_features) const;
};

// One CART regression tree stored as flat node arrays. Node 0 is the root;
// feature[i] < 0 marks a leaf whose prediction is value[i]. Internal nodes
// send x[feature] <= threshold to `left`, everything else to `right`.
struct Tree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;

    std::size_t size() const { return feature.size(); }
    double predict(std::span<const double> x) const;
};

class Forest {
public:
    // Reassembles a fitted forest, validating node links and bounds.
    Forest(std::vector<Tree> trees, ForestParams params, Vector importances,
           Eigen::Index n_features, double target_min, double target_max);

    double predict(std::span<const double> x) const;
    double predict(const Vector& x) const;
    Vector predict_rows(const Matrix& rows) const;

    const std::vector<Tree>& trees() const { return trees_; }
    const ForestParams& params() const { return params_; }
    // Mean decrease in impurity, normalized to sum to one.
    const Vector& importances() const { return importances_; }
    Eigen::Index n_features() const { return n_features_; }
    double target_min() const { return target_min_; }
    double target_max() const { return target_max_; }

private:
    std::vector<Tree> trees_;
    ForestParams params_;
    Vector importances_;
    Eigen::Index n_features_;
    double target_min_;
    double target_max_;
};

// Bagged CART forest with variance-reduction splits. Tree t draws from its own
// stream derive_seed(seed, t), so the result does not depend on thread count.
Forest fit_forest(const Matrix& x, const Vector& y, const ForestParams& params);

inline const Vector& feature_importance(const Forest& f) { return f.importances(); }

} // namespace glucest
