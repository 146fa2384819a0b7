#include <glucest/dataset.hpp>
#include <glucest/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace glucest {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

} // namespace

std::vector<std::string> default_feature_names(Eigen::Index k) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) names.push_back("f" + std::to_string(i + 1));
    return names;
}

Dataset::Dataset(Matrix features, Vector glucose, std::vector<std::string> feature_names)
    : features_(std::move(features)), glucose_(std::move(glucose)), names_(std::move(feature_names)) {
    if (features_.rows() < 1 || features_.cols() < 1)
        throw Error("dataset: need at least one row and one feature");
    if (features_.rows() != glucose_.size())
        throw Error("dataset: feature rows (" + std::to_string(features_.rows()) +
                    ") != glucose values (" + std::to_string(glucose_.size()) + ")");
    if (static_cast<Eigen::Index>(names_.size()) != features_.cols())
        throw Error("dataset: feature name count does not match feature columns");
    if (!features_.allFinite()) throw Error("dataset: non-finite feature value");
    for (Eigen::Index i = 0; i < glucose_.size(); ++i) {
        if (!std::isfinite(glucose_[i]) || glucose_[i] <= 0.0)
            throw Error("dataset: glucose must be finite and positive (row " + std::to_string(i) + ")");
    }
}

Dataset::Dataset(Matrix features, Vector glucose)
    : Dataset(features, std::move(glucose), default_feature_names(features.cols())) {}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
    Matrix f(static_cast<Eigen::Index>(rows.size()), cols());
    Vector g(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(rows[i]);
        if (r >= this->rows()) throw Error("dataset: row index out of range");
        f.row(static_cast<Eigen::Index>(i)) = features_.row(r);
        g[static_cast<Eigen::Index>(i)] = glucose_[r];
    }
    return Dataset(std::move(f), std::move(g), names_);
}

Dataset read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        for (auto cell : split_commas(line)) header.emplace_back(cell);
        break;
    }
    if (header.empty()) throw Error("csv: missing header row");
    if (header.size() < 2 || header.back() != kGlucoseColumn)
        throw Error(std::string("csv: header must list feature columns followed by '") +
                    kGlucoseColumn + "' (line " + std::to_string(line_no) + ")");
    const std::size_t k = header.size() - 1;

    std::vector<double> values;
    std::vector<double> glucose;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_commas(line);
        const auto where = " on line " + std::to_string(line_no);
        if (cells.size() != header.size())
            throw Error("csv: expected " + std::to_string(header.size()) + " columns, got " +
                        std::to_string(cells.size()) + where);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            if (!parse_double(cells[c], v) || !std::isfinite(v))
                throw Error("csv: non-numeric cell '" + std::string(cells[c]) + "' in column '" +
                            header[c] + "'" + where);
            if (c < k) {
                values.push_back(v);
            } else {
                if (v <= 0.0) throw Error("csv: glucose must be positive" + where);
                glucose.push_back(v);
            }
        }
    }
    if (glucose.empty()) throw Error("csv: no data rows");

    const auto n = static_cast<Eigen::Index>(glucose.size());
    Matrix f(n, static_cast<Eigen::Index>(k));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < f.cols(); ++c)
            f(r, c) = values[static_cast<std::size_t>(r) * k + static_cast<std::size_t>(c)];
    header.pop_back();
    return Dataset(std::move(f), Eigen::Map<Vector>(glucose.data(), n), std::move(header));
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("csv: cannot open '" + path.string() + "'");
    try {
        return read_csv(in);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
    double rounded = 0.0;
    std::from_chars(buf, res.ptr, rounded);
    res = std::to_chars(buf, buf + sizeof buf, rounded);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const Dataset& d) {
    for (const auto& name : d.feature_names()) out << name << ',';
    out << kGlucoseColumn << '\n';
    for (Eigen::Index r = 0; r < d.rows(); ++r) {
        for (Eigen::Index c = 0; c < d.cols(); ++c) out << format_number(d.features()(r, c)) << ',';
        out << format_number(d.glucose()[r]) << '\n';
    }
}

void save_csv(const std::filesystem::path& path, const Dataset& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("csv: cannot write '" + path.string() + "'");
    write_csv(out, d);
    if (!out) throw Error("csv: write failed for '" + path.string() + "'");
}

TrainTestSplit split_train_test(const Dataset& d, const SplitConfig& cfg) {
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw Error("split: train fraction must lie in (0, 1)");
    const auto n = static_cast<std::size_t>(d.rows());
    if (n < 4) throw Error("split: need at least 4 rows, got " + std::to_string(n));
    const auto n_train =
        static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n) + 0.5));
    if (n_train < 3 || n_train >= n)
        throw Error("split: fraction " + format_number(cfg.train_fraction) + " of " +
                    std::to_string(n) + " rows leaves an empty subset or test set");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.seed);
    rng.shuffle(order);

    std::vector<std::size_t> train_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test_rows(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    // Both sides keep measurement order; the averaging windows rely on it.
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    auto train = d.select_rows(train_rows);
    auto test = d.select_rows(test_rows);
    return {std::move(train), std::move(test), std::move(train_rows), std::move(test_rows)};
}

NormalizationGains::NormalizationGains(Vector q) : q_(std::move(q)) {
    for (Eigen::Index k = 0; k < q_.size(); ++k) {
        if (!std::isfinite(q_[k]) || q_[k] <= 0.0)
            throw Error("normalization: gain " + std::to_string(k) + " must be finite and positive");
    }
}

Normalized normalize_unit_energy(const Matrix& train_features, std::span<const std::string> names) {
    Vector q(train_features.cols());
    for (Eigen::Index k = 0; k < train_features.cols(); ++k) {
        const double energy = train_features.col(k).squaredNorm();
        if (!(energy > 0.0) || !std::isfinite(energy)) {
            const auto label = static_cast<std::size_t>(k) < names.size()
                                   ? "'" + names[static_cast<std::size_t>(k)] + "'"
                                   : std::to_string(k);
            throw Error("normalization: feature " + label + " has zero energy");
        }
        q[k] = 1.0 / std::sqrt(energy);
    }
    Matrix out = train_features * q.asDiagonal();
    return {std::move(out), NormalizationGains(std::move(q))};
}

Matrix rescale_test(const Matrix& test_features, const NormalizationGains& gains) {
    if (test_features.cols() != gains.size())
        throw Error("rescale: test matrix has " + std::to_string(test_features.cols()) +
                    " features, gains have " + std::to_string(gains.size()));
    return test_features * gains.q().asDiagonal();
}

} // namespace glucest
