#pragma once

#include <glucest/error.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace glucest {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Name of the mandatory trailing reference column in dataset CSV files.
inline constexpr const char* kGlucoseColumn = "glucose_mmol_l";

// N x K feature matrix paired with N reference glucose values (mmol/L).
// Construction validates; instances are immutable afterwards.
class Dataset {
public:
    Dataset(Matrix features, Vector glucose, std::vector<std::string> feature_names);
    // Feature names default to f1..fK.
    Dataset(Matrix features, Vector glucose);

    const Matrix& features() const { return features_; }
    const Vector& glucose() const { return glucose_; }
    const std::vector<std::string>& feature_names() const { return names_; }

    Eigen::Index rows() const { return features_.rows(); }
    Eigen::Index cols() const { return features_.cols(); }

    // Rows in the given order (indices may repeat).
    Dataset select_rows(std::span<const std::size_t> rows) const;

private:
    Matrix features_;
    Vector glucose_;
    std::vector<std::string> names_;
};

std::vector<std::string> default_feature_names(Eigen::Index k);

Dataset read_csv(std::istream& in);
Dataset load_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Dataset& d);
void save_csv(const std::filesystem::path& path, const Dataset& d);

// Shortest text that round-trips the value rounded to 9 significant digits.
std::string format_number(double v);

struct SplitConfig {
    double train_fraction = 0.75;
    std::uint64_t seed = 0;
};

struct TrainTestSplit {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows; // source row indices, in output order
    std::vector<std::size_t> test_rows;
};

// Fisher-Yates shuffle of the row indices; the first floor(f*N + 0.5) go to
// training, the rest to test. Each side is returned in source row order.
TrainTestSplit split_train_test(const Dataset& d, const SplitConfig& cfg);

// Per-feature gains q_k > 0.
class NormalizationGains {
public:
    explicit NormalizationGains(Vector q);
    const Vector& q() const { return q_; }
    Eigen::Index size() const { return q_.size(); }

private:
    Vector q_;
};

struct Normalized {
    Matrix features;
    NormalizationGains gains;
};

// Scales every column to unit energy: q_k = 1/sqrt(y_k'y_k), out_k = q_k y_k.
// `names` only labels the error for an all-zero column.
Normalized normalize_unit_energy(const Matrix& train_features,
                                 std::span<const std::string> names = {});

// out(m, k) = q_k * in(m, k).
Matrix rescale_test(const Matrix& test_features, const NormalizationGains& gains);

} // namespace glucest
