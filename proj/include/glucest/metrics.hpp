#pragma once

#include <glucest/dataset.hpp>

#include <array>
#include <optional>

namespace glucest {

// Table-style accuracy indicators; errors are pred - ref, all in mmol/L.
struct MetricsReport {
    std::optional<double> pearson_r;  // unset when refs or preds have zero variance
    double mae = 0.0;
    double sd_abs_err = 0.0;          // population SD of |e|
    double sd_signed_err = 0.0;       // population SD of e (auxiliary)
    double rmse = 0.0;
    double mard_percent = 0.0;
    std::size_t count = 0;
};

MetricsReport compute_metrics(const Vector& refs, const Vector& preds);

inline constexpr double kMgdlPerMmol = 18.016;

constexpr double mmol_to_mgdl(double v) { return v * kMgdlPerMmol; }

enum class Zone { A, B, C, D, E };
inline constexpr std::size_t kZoneCount = 5;

constexpr char zone_letter(Zone z) { return static_cast<char>('A' + static_cast<int>(z)); }

// Clarke error grid zone for a (reference, estimate) pair in mg/dL; both must
// lie in (0, 1000).
Zone ega_zone(double ref_mgdl, double pred_mgdl);

struct EgaReport {
    std::array<std::size_t, kZoneCount> counts{};
    std::array<double, kZoneCount> percent{};
    std::size_t total = 0;
};

// Inputs in mmol/L; converted with mmol_to_mgdl before zoning.
EgaReport ega_report(const Vector& refs, const Vector& preds);

} // namespace glucest
