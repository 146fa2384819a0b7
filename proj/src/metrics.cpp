#include <glucest/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace glucest {

MetricsReport compute_metrics(const Vector& refs, const Vector& preds) {
    if (refs.size() != preds.size())
        throw Error("metrics: " + std::to_string(refs.size()) + " references vs " +
                    std::to_string(preds.size()) + " predictions");
    if (refs.size() < 2) throw Error("metrics: need at least 2 pairs");
    if ((refs.array() <= 0.0).any()) throw Error("metrics: references must be positive");
    if (!refs.allFinite() || !preds.allFinite()) throw Error("metrics: non-finite input");

    const auto n = static_cast<double>(refs.size());
    const Eigen::ArrayXd err = (preds - refs).array();
    const Eigen::ArrayXd abs_err = err.abs();

    MetricsReport r;
    r.count = static_cast<std::size_t>(refs.size());
    r.mae = abs_err.mean();
    r.sd_abs_err = std::sqrt((abs_err - r.mae).square().sum() / n);
    r.sd_signed_err = std::sqrt((err - err.mean()).square().sum() / n);
    r.rmse = std::sqrt(err.square().mean());
    r.mard_percent = (100.0 * abs_err / refs.array()).mean();

    const Eigen::ArrayXd dr = refs.array() - refs.mean();
    const Eigen::ArrayXd dp = preds.array() - preds.mean();
    const double srr = dr.square().sum();
    const double spp = dp.square().sum();
    if (srr > 0.0 && spp > 0.0)
        r.pearson_r = std::clamp((dr * dp).sum() / std::sqrt(srr * spp), -1.0, 1.0);
    return r;
}

Zone ega_zone(double ref, double pred) {
    if (!(ref > 0.0 && ref < 1000.0) || !(pred > 0.0 && pred < 1000.0))
        throw Error("ega: values must lie in (0, 1000) mg/dL");

    if ((ref <= 70.0 && pred <= 70.0) || (pred >= 0.8 * ref && pred <= 1.2 * ref)) return Zone::A;
    if ((ref >= 180.0 && pred <= 70.0) || (ref <= 70.0 && pred >= 180.0)) return Zone::E;
    if ((ref >= 70.0 && ref <= 290.0 && pred >= ref + 110.0) ||
        (ref >= 130.0 && ref <= 180.0 && pred <= 7.0 / 5.0 * ref - 182.0))
        return Zone::C;
    if ((ref >= 240.0 && pred >= 70.0 && pred <= 180.0) || (ref <= 175.0 / 3.0 && pred >= 70.0 && pred <= 180.0) ||
        (ref >= 175.0 / 3.0 && ref <= 70.0 && pred >= 6.0 / 5.0 * ref))
        return Zone::D;
    return Zone::B;
}

EgaReport ega_report(const Vector& refs, const Vector& preds) {
    if (refs.size() != preds.size()) throw Error("ega: reference and prediction lengths differ");
    if (refs.size() < 1) throw Error("ega: need at least one pair");
    EgaReport r;
    r.total = static_cast<std::size_t>(refs.size());
    for (Eigen::Index i = 0; i < refs.size(); ++i)
        ++r.counts[static_cast<std::size_t>(ega_zone(mmol_to_mgdl(refs[i]), mmol_to_mgdl(preds[i])))];
    for (std::size_t z = 0; z < kZoneCount; ++z)
        r.percent[z] = 100.0 * static_cast<double>(r.counts[z]) / static_cast<double>(r.total);
    return r;
}

} // namespace glucest
