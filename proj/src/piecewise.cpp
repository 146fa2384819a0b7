#include <glucest/piecewise.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace glucest {

std::array<std::size_t, kSubsetCount> SubsetPartition::sizes() const {
    return {rows[0].size(), rows[1].size(), rows[2].size()};
}

SubsetPartition partition_by_glucose(const Vector& glucose) {
    const auto n = static_cast<std::size_t>(glucose.size());
    if (n < kSubsetCount)
        throw Error("partition: need at least 3 training rows, got " + std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return glucose[static_cast<Eigen::Index>(a)] > glucose[static_cast<Eigen::Index>(b)];
    });

    SubsetPartition part;
    std::size_t start = 0;
    for (std::size_t t = 0; t < kSubsetCount; ++t) {
        const std::size_t size = n / kSubsetCount + (t < n % kSubsetCount ? 1 : 0);
        part.rows[t].assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                            order.begin() + static_cast<std::ptrdiff_t>(start + size));
        start += size;
    }
    for (std::size_t t = 0; t + 1 < kSubsetCount; ++t)
        part.boundaries[t] = glucose[static_cast<Eigen::Index>(part.rows[t].back())];
    return part;
}

Centroids compute_centroids(const Matrix& train_features, const SubsetPartition& part) {
    Centroids c{Matrix::Zero(kSubsetCount, train_features.cols())};
    for (std::size_t t = 0; t < kSubsetCount; ++t) {
        const auto& rows = part.rows[t];
        if (rows.empty()) throw Error("centroids: subset " + std::to_string(t + 1) + " is empty");
        for (auto r : rows) {
            if (static_cast<Eigen::Index>(r) >= train_features.rows())
                throw Error("centroids: row index out of range");
            c.means.row(static_cast<Eigen::Index>(t)) += train_features.row(static_cast<Eigen::Index>(r));
        }
        c.means.row(static_cast<Eigen::Index>(t)) /= static_cast<double>(rows.size());
    }
    return c;
}

double weighted_distance(std::span<const double> x, std::span<const double> c, std::span<const double> a) {
    if (x.size() != c.size() || x.size() != a.size())
        throw Error("distance: dimension mismatch (" + std::to_string(x.size()) + ", " +
                    std::to_string(c.size()) + ", " + std::to_string(a.size()) + ")");
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (a[k] < 0.0) throw Error("distance: negative weight");
        const double d = x[k] - c[k];
        sum += a[k] * d * d;
    }
    return std::sqrt(sum);
}

int classify_measurement(std::span<const double> x, const Centroids& cents, std::span<const double> a) {
    if (cents.means.rows() != static_cast<Eigen::Index>(kSubsetCount))
        throw Error("classify: expected 3 centroids");
    const Eigen::Index k = cents.means.cols();
    std::vector<double> row(static_cast<std::size_t>(k));
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(kSubsetCount); ++t) {
        for (Eigen::Index j = 0; j < k; ++j) row[static_cast<std::size_t>(j)] = cents.means(t, j);
        const double d = weighted_distance(x, row, a);
        if (d < best_dist) {
            best_dist = d;
            best = static_cast<int>(t) + 1;
        }
    }
    return best;
}

PiecewisePipeline::PiecewisePipeline(AveragingModel averaging, Vector weights,
                                     std::array<double, kSubsetCount - 1> boundaries,
                                     std::array<std::size_t, kSubsetCount> subset_sizes, Centroids centroids,
                                     std::array<Forest, kSubsetCount> forests, ForestParams params)
    : averaging_(std::move(averaging)), weights_(std::move(weights)), boundaries_(boundaries),
      subset_sizes_(subset_sizes), centroids_(std::move(centroids)), forests_(std::move(forests)),
      params_(std::move(params)) {
    const Eigen::Index k = averaging_.feature_count();
    if (!averaging_.gains()) throw Error("pipeline: averaging model has no normalization gains");
    if (weights_.size() != k) throw Error("pipeline: weight count does not match feature count");
    if ((weights_.array() < 0.0).any() || !weights_.allFinite()) throw Error("pipeline: invalid weights");
    if (centroids_.means.rows() != static_cast<Eigen::Index>(kSubsetCount) || centroids_.means.cols() != k)
        throw Error("pipeline: centroid matrix must be 3 x K");
    for (std::size_t t = 0; t < kSubsetCount; ++t) {
        if (subset_sizes_[t] == 0) throw Error("pipeline: empty subset");
        if (forests_[t].n_features() != k) throw Error("pipeline: forest feature count mismatch");
    }
}

namespace {

template <typename F>
auto stage(const char* name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(std::string("train_pipeline [") + name + "]: " + e.what());
    }
}

// A subset with a single row cannot be bagged; it predicts its only target.
Forest single_leaf_forest(double value, Eigen::Index n_features, const ForestParams& params) {
    Tree leaf{{-1}, {0.0}, {-1}, {-1}, {value}};
    ForestParams stored = params;
    stored.n_trees = 1;
    stored.mtry = params.resolved_mtry(n_features);
    return Forest({std::move(leaf)}, stored, Vector::Constant(n_features, 1.0 / static_cast<double>(n_features)),
                  n_features, value, value);
}

} // namespace

PiecewisePipeline train_pipeline(const Dataset& train, Eigen::Index window_length, const ForestParams& params) {
    stage("params", [&] { params.validate(train.cols()); return 0; });
    auto fit = stage("averaging", [&] { return fit_feature_averaging(train, window_length); });
    if (fit.averaged.rows() < static_cast<Eigen::Index>(kSubsetCount))
        throw Error("train_pipeline [averaging]: only " + std::to_string(fit.averaged.rows()) +
                    " rows remain after window averaging, need 3");

    auto normalized = stage("normalization", [&] {
        return normalize_unit_energy(fit.averaged.features(), fit.averaged.feature_names());
    });
    const Vector& glucose = fit.averaged.glucose();

    const Forest first = stage("first-stage forest", [&] { return fit_forest(normalized.features, glucose, params); });
    const Vector weights = first.importances();

    const SubsetPartition part = stage("partition", [&] { return partition_by_glucose(glucose); });
    Centroids centroids = stage("centroids", [&] { return compute_centroids(normalized.features, part); });

    auto subset_forest = [&](std::size_t t) {
        return stage("subset forest", [&] {
            const auto& rows = part.rows[t];
            if (rows.size() == 1)
                return single_leaf_forest(glucose[static_cast<Eigen::Index>(rows[0])], train.cols(), params);
            Matrix x(static_cast<Eigen::Index>(rows.size()), train.cols());
            Vector y(x.rows());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                x.row(static_cast<Eigen::Index>(i)) = normalized.features.row(static_cast<Eigen::Index>(rows[i]));
                y[static_cast<Eigen::Index>(i)] = glucose[static_cast<Eigen::Index>(rows[i])];
            }
            ForestParams p = params;
            p.seed = params.seed + t + 1;
            return fit_forest(x, y, p);
        });
    };
    std::array<Forest, kSubsetCount> forests{subset_forest(0), subset_forest(1), subset_forest(2)};

    AveragingModel averaging = std::move(fit.model);
    averaging.set_gains(std::move(normalized.gains));
    return PiecewisePipeline(std::move(averaging), weights, part.boundaries, part.sizes(), std::move(centroids),
                             std::move(forests), params);
}

PipelinePrediction predict_pipeline(const PiecewisePipeline& p, const Matrix& raw_features) {
    if (raw_features.cols() != p.feature_count())
        throw Error("predict: expected " + std::to_string(p.feature_count()) + " features, got " +
                    std::to_string(raw_features.cols()));
    const Matrix scaled = rescale_test(p.averaging().apply_stationary(raw_features), p.gains());
    const std::span<const double> a(p.weights().data(), static_cast<std::size_t>(p.weights().size()));

    PipelinePrediction out{Vector(scaled.rows()), std::vector<int>(static_cast<std::size_t>(scaled.rows()))};
    Vector row(scaled.cols());
    for (Eigen::Index m = 0; m < scaled.rows(); ++m) {
        row = scaled.row(m).transpose();
        const std::span<const double> x(row.data(), static_cast<std::size_t>(row.size()));
        const int t = classify_measurement(x, p.centroids(), a);
        out.classes[static_cast<std::size_t>(m)] = t;
        out.glucose[m] = p.forests()[static_cast<std::size_t>(t - 1)].predict(x);
    }
    return out;
}

} // namespace glucest
