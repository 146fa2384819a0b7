#pragma once

#include <glucest/dataset.hpp>

#include <cstdint>

namespace glucest {

struct SynthConfig {
    Eigen::Index n = 600;
    Eigen::Index k = 10;
    Eigen::Index informative = 4;
    double noise_sd = 0.5;
    double glucose_low = 4.0;
    double glucose_high = 12.0;
    double drift_amp = 0.3;
    std::uint64_t seed = 7;

    void validate() const;
};

// Glucose: n uniform draws on [low, high], reordered to follow the rank order
// of a smoothed random walk, so the series wanders slowly through the range.
// Informative feature j = offset_j + slope_j * z + noise + drift, where z is
// glucose mapped to [-1, 1], |slope_j| in [1, 2], and drift is one slow
// sinusoid shared by all informative features. The rest are offset + noise.
Dataset generate_synthetic_dataset(const SynthConfig& cfg);

} // namespace glucest
