#include <glucest/rng.hpp>
#include <glucest/synth.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace glucest {

void SynthConfig::validate() const {
    if (n < 1) throw Error("synth: n must be positive");
    if (k < 1) throw Error("synth: k must be positive");
    if (informative < 0 || informative > k) throw Error("synth: informative must lie in [0, k]");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw Error("synth: noise_sd must be non-negative");
    if (!(glucose_low > 0.0) || !(glucose_low < glucose_high) || !std::isfinite(glucose_high))
        throw Error("synth: glucose range must satisfy 0 < low < high");
    if (!(drift_amp >= 0.0) || !std::isfinite(drift_amp)) throw Error("synth: drift_amp must be non-negative");
}

Dataset generate_synthetic_dataset(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    const auto n = static_cast<std::size_t>(cfg.n);

    std::vector<double> levels(n);
    for (auto& v : levels) v = rng.uniform(cfg.glucose_low, cfg.glucose_high);
    std::sort(levels.begin(), levels.end());

    std::vector<double> walk(n);
    double pos = 0.0;
    for (auto& w : walk) {
        pos += rng.normal();
        w = pos;
    }
    // Centered moving average to take the jitter out of the walk.
    const std::size_t half = std::max<std::size_t>(1, n / 100);
    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(n - 1, i + half);
        smooth[i] = std::accumulate(walk.begin() + static_cast<std::ptrdiff_t>(lo),
                                    walk.begin() + static_cast<std::ptrdiff_t>(hi) + 1, 0.0) /
                    static_cast<double>(hi - lo + 1);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return smooth[a] < smooth[b]; });
    Vector glucose(cfg.n);
    for (std::size_t r = 0; r < n; ++r) glucose[static_cast<Eigen::Index>(order[r])] = levels[r];

    const double period = static_cast<double>(cfg.n) * rng.uniform(0.25, 0.5);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    Vector drift(cfg.n);
    for (Eigen::Index t = 0; t < cfg.n; ++t)
        drift[t] = cfg.drift_amp * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);

    const double mid = 0.5 * (cfg.glucose_low + cfg.glucose_high);
    const double half_range = 0.5 * (cfg.glucose_high - cfg.glucose_low);
    Matrix features(cfg.n, cfg.k);
    for (Eigen::Index j = 0; j < cfg.k; ++j) {
        const double offset = rng.uniform(2.0, 6.0);
        if (j < cfg.informative) {
            const double slope = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(1.0, 2.0);
            for (Eigen::Index t = 0; t < cfg.n; ++t) {
                const double z = (glucose[t] - mid) / half_range;
                features(t, j) = offset + slope * z + cfg.noise_sd * rng.normal() + drift[t];
            }
        } else {
            for (Eigen::Index t = 0; t < cfg.n; ++t) features(t, j) = offset + cfg.noise_sd * rng.normal();
        }
    }
    return Dataset(std::move(features), std::move(glucose));
}

} // namespace glucest
