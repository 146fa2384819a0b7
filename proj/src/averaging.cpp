#include <glucest/averaging.hpp>

#include <cmath>
#include <string>

namespace glucest {

namespace {

void check_window(Eigen::Index n, Eigen::Index window_length) {
    if (window_length < 1 || window_length > n)
        throw Error("averaging: window length " + std::to_string(window_length) +
                    " outside [1, " + std::to_string(n) + "]");
}

} // namespace

Matrix build_window_matrix(const Vector& x, Eigen::Index window_length) {
    check_window(x.size(), window_length);
    const Eigen::Index rows = x.size() - window_length + 1;
    Matrix out(rows, window_length);
    for (Eigen::Index j = 0; j < window_length; ++j) out.col(j) = x.segment(j, rows);
    return out;
}

Vector align_glucose(const Vector& g, Eigen::Index window_length) {
    check_window(g.size(), window_length);
    return g.tail(g.size() - window_length + 1);
}

double averaging_ridge(const Matrix& gram) {
    return 1e-8 * gram.trace() / static_cast<double>(gram.rows());
}

AveragingSolution solve_averaging_weights(const Matrix& windows, const Vector& aligned_glucose) {
    if (windows.rows() != aligned_glucose.size())
        throw Error("averaging: window matrix has " + std::to_string(windows.rows()) +
                    " rows but the aligned reference has " + std::to_string(aligned_glucose.size()));
    const double gg = aligned_glucose.squaredNorm();
    if (!(gg > 0.0)) throw Error("averaging: reference vector has zero norm");

    const Matrix gram = windows.transpose() * windows;
    Matrix regularized = gram;
    regularized.diagonal().array() += averaging_ridge(gram);

    const Vector u = windows.transpose() * aligned_glucose;
    Eigen::LLT<Matrix> llt(regularized);
    if (llt.info() != Eigen::Success)
        throw Error("averaging: window Gram matrix is singular");
    Vector w = llt.solve(u);
    const double norm = w.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw Error("averaging: window Gram matrix is numerically singular");
    w /= norm;
    if (w.dot(u) < 0.0) w = -w;

    const double projected = w.dot(u);
    const double energy = w.dot(gram * w);
    AveragingSolution sol;
    sol.weights = std::move(w);
    sol.quotient = energy > 0.0 ? projected * projected / energy : 0.0;
    sol.cos2 = sol.quotient / gg;
    return sol;
}

AveragingModel::AveragingModel(Eigen::Index window_length, std::vector<Vector> weights)
    : window_length_(window_length), weights_(std::move(weights)) {
    if (window_length_ < 1) throw Error("averaging: window length must be positive");
    if (weights_.empty()) throw Error("averaging: model needs at least one feature");
    for (const auto& w : weights_) {
        if (w.size() != window_length_)
            throw Error("averaging: weight vector length does not match window length");
        if (!w.allFinite()) throw Error("averaging: non-finite weight");
    }
}

void AveragingModel::set_gains(NormalizationGains gains) {
    if (gains.size() != feature_count())
        throw Error("averaging: gain count does not match feature count");
    gains_ = std::move(gains);
}

Matrix AveragingModel::apply(const Matrix& features) const {
    if (features.cols() != feature_count())
        throw Error("averaging: expected " + std::to_string(feature_count()) + " features, got " +
                    std::to_string(features.cols()));
    check_window(features.rows(), window_length_);
    Matrix out(features.rows() - window_length_ + 1, features.cols());
    for (Eigen::Index k = 0; k < features.cols(); ++k)
        out.col(k) = build_window_matrix(features.col(k), window_length_) * weights_[static_cast<std::size_t>(k)];
    return out;
}

Vector AveragingModel::dc_gains() const {
    Vector g(feature_count());
    for (Eigen::Index k = 0; k < g.size(); ++k) g[k] = weights_[static_cast<std::size_t>(k)].sum();
    return g;
}

Matrix AveragingModel::apply_stationary(const Matrix& features) const {
    if (features.cols() != feature_count())
        throw Error("averaging: expected " + std::to_string(feature_count()) + " features, got " +
                    std::to_string(features.cols()));
    return features * dc_gains().asDiagonal();
}

AveragingFit fit_feature_averaging(const Dataset& train, Eigen::Index window_length) {
    if (window_length < 1 || train.rows() <= window_length)
        throw Error("averaging: need more rows (" + std::to_string(train.rows()) +
                    ") than the window length (" + std::to_string(window_length) + ")");
    const Vector aligned = align_glucose(train.glucose(), window_length);

    std::vector<Vector> weights;
    std::vector<double> cos2;
    Matrix averaged(aligned.size(), train.cols());
    for (Eigen::Index k = 0; k < train.cols(); ++k) {
        const Matrix windows = build_window_matrix(train.features().col(k), window_length);
        AveragingSolution sol;
        try {
            sol = solve_averaging_weights(windows, aligned);
        } catch (const Error& e) {
            throw Error("feature " + std::to_string(k) + " ('" +
                        train.feature_names()[static_cast<std::size_t>(k)] + "'): " + e.what());
        }
        averaged.col(k) = windows * sol.weights;
        cos2.push_back(sol.cos2);
        weights.push_back(std::move(sol.weights));
    }
    return {AveragingModel(window_length, std::move(weights)),
            Dataset(std::move(averaged), aligned, train.feature_names()), std::move(cos2)};
}

} // namespace glucest
