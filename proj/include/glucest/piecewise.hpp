#pragma once

#include <glucest/averaging.hpp>
#include <glucest/dataset.hpp>
#include <glucest/forest.hpp>

#include <array>
#include <span>
#include <vector>

namespace glucest {

inline constexpr std::size_t kSubsetCount = 3;

// Training rows split into three glucose bands, highest first.
struct SubsetPartition {
    std::array<std::vector<std::size_t>, kSubsetCount> rows;
    // Lowest glucose of subset 1 and of subset 2: everything in subset t+1 is
    // <= boundaries[t] <= everything in subset t.
    std::array<double, kSubsetCount - 1> boundaries{};

    std::array<std::size_t, kSubsetCount> sizes() const;
};

// Stable descending sort on glucose, then three contiguous blocks whose sizes
// differ by at most one; the remainder goes to the earlier blocks.
SubsetPartition partition_by_glucose(const Vector& glucose);
inline SubsetPartition partition_by_glucose(const Dataset& train) { return partition_by_glucose(train.glucose()); }

// Row t holds the per-feature mean of subset t.
struct Centroids {
    Matrix means; // kSubsetCount x K
};

Centroids compute_centroids(const Matrix& train_features, const SubsetPartition& part);

// sqrt(sum_k a_k (x_k - c_k)^2).
double weighted_distance(std::span<const double> x, std::span<const double> c, std::span<const double> a);

// 1-based class of the nearest centroid; ties go to the lower class.
int classify_measurement(std::span<const double> x, const Centroids& cents, std::span<const double> a);

class PiecewisePipeline {
public:
    PiecewisePipeline(AveragingModel averaging, Vector weights, std::array<double, kSubsetCount - 1> boundaries,
                      std::array<std::size_t, kSubsetCount> subset_sizes, Centroids centroids,
                      std::array<Forest, kSubsetCount> forests, ForestParams params);

    const AveragingModel& averaging() const { return averaging_; }
    const NormalizationGains& gains() const { return *averaging_.gains(); }
    // Importances of the first-stage forest, used as distance weights.
    const Vector& weights() const { return weights_; }
    const std::array<double, kSubsetCount - 1>& boundaries() const { return boundaries_; }
    const std::array<std::size_t, kSubsetCount>& subset_sizes() const { return subset_sizes_; }
    const Centroids& centroids() const { return centroids_; }
    const std::array<Forest, kSubsetCount>& forests() const { return forests_; }
    const ForestParams& params() const { return params_; }
    Eigen::Index window_length() const { return averaging_.window_length(); }
    Eigen::Index feature_count() const { return weights_.size(); }

private:
    AveragingModel averaging_;
    Vector weights_;
    std::array<double, kSubsetCount - 1> boundaries_;
    std::array<std::size_t, kSubsetCount> subset_sizes_;
    Centroids centroids_;
    std::array<Forest, kSubsetCount> forests_;
    ForestParams params_;
};

// averaging -> unit-energy normalization -> first-stage forest (importances)
// -> glucose tertiles -> centroids -> one forest per tertile, seeded seed+t.
PiecewisePipeline train_pipeline(const Dataset& train, Eigen::Index window_length, const ForestParams& params);

struct PipelinePrediction {
    Vector glucose;           // mmol/L, in input row order
    std::vector<int> classes; // 1-based subset used for each row
};

// Test rows are not window-averaged. Each row is mapped through the filter's
// stationary response (x_k * sum(w_k)), rescaled by the stored gains q_k,
// assigned to the nearest weighted centroid and predicted by that subset's
// forest.
PipelinePrediction predict_pipeline(const PiecewisePipeline& p, const Matrix& raw_features);
inline PipelinePrediction predict_pipeline(const PiecewisePipeline& p, const Dataset& test) {
    return predict_pipeline(p, test.features());
}

} // namespace glucest
