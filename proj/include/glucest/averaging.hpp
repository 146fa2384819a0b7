#pragma once

#include <glucest/dataset.hpp>

#include <optional>
#include <vector>

namespace glucest {

inline constexpr Eigen::Index kDefaultWindowLength = 5;

// (N-L+1) x L sliding-window (Hankel) matrix: out(i, j) = x[i + j].
Matrix build_window_matrix(const Vector& x, Eigen::Index window_length);

// Window-end alignment of the reference: out[j] = g[j + L - 1].
Vector align_glucose(const Vector& g, Eigen::Index window_length);

struct AveragingSolution {
    Vector weights;             // unit 2-norm, (Xw)'g >= 0
    double quotient = 0.0;      // w'S_A w / w'S_B w with S_A = X'gg'X, S_B = X'X
    double cos2 = 0.0;          // quotient / g'g, i.e. cos^2(Xw, g), in [0, 1]
};

// Maximizes w'X'gg'Xw / w'X'Xw over w. S_A is rank one, so the maximizer is
// the single nontrivial eigenvector of S_B^-1 S_A, which is S_B^-1 X'g.
// S_B is ridged by 1e-8 * trace(S_B) / L before solving.
AveragingSolution solve_averaging_weights(const Matrix& windows, const Vector& aligned_glucose);

// Ridge added to X'X by the solver.
double averaging_ridge(const Matrix& gram);

class AveragingModel {
public:
    AveragingModel(Eigen::Index window_length, std::vector<Vector> weights);

    Eigen::Index window_length() const { return window_length_; }
    const std::vector<Vector>& weights() const { return weights_; }
    Eigen::Index feature_count() const { return static_cast<Eigen::Index>(weights_.size()); }

    const std::optional<NormalizationGains>& gains() const { return gains_; }
    void set_gains(NormalizationGains gains);

    // Column k of the result is build_window_matrix(features.col(k)) * w_k.
    Matrix apply(const Matrix& features) const;

    // Per-feature sum of the window weights: the filter's response to a
    // window holding one repeated value.
    Vector dc_gains() const;

    // Maps isolated rows into the averaged feature space by treating each row
    // as a window filled with copies of itself: out(m, k) = in(m, k) * sum(w_k).
    Matrix apply_stationary(const Matrix& features) const;

private:
    Eigen::Index window_length_;
    std::vector<Vector> weights_;
    std::optional<NormalizationGains> gains_;
};

struct AveragingFit {
    AveragingModel model;
    Dataset averaged;             // N-L+1 rows, window-end aligned glucose
    std::vector<double> cos2;     // attained cos^2 per feature
};

AveragingFit fit_feature_averaging(const Dataset& train, Eigen::Index window_length);

} // namespace glucest
