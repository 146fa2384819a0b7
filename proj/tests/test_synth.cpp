#include <glucest/synth.hpp>

#include <doctest.h>

using namespace glucest;

namespace {

double corr(const Vector& a, const Vector& b) {
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

} // namespace

TEST_CASE("default synthetic dataset") {
    const Dataset d = generate_synthetic_dataset(SynthConfig{});
    CHECK(d.rows() == 600);
    CHECK(d.cols() == 10);
    CHECK(d.glucose().minCoeff() >= 4.0);
    CHECK(d.glucose().maxCoeff() <= 12.0);

    const Dataset again = generate_synthetic_dataset(SynthConfig{});
    CHECK(again.features() == d.features());
    CHECK(again.glucose() == d.glucose());

    SynthConfig other;
    other.seed = 8;
    CHECK(generate_synthetic_dataset(other).glucose() != d.glucose());

    // The reference wanders slowly: consecutive steps are small next to the range.
    const Vector steps = (d.glucose().tail(599) - d.glucose().head(599)).cwiseAbs();
    CHECK(steps.mean() < 0.2);
}

TEST_CASE("informative feature correlation tracks the noise level") {
    SynthConfig cfg;
    cfg.noise_sd = 0.1;
    const Dataset quiet = generate_synthetic_dataset(cfg);
    CHECK(std::abs(corr(quiet.features().col(0), quiet.glucose())) >= 0.9);

    cfg.noise_sd = 20.0;
    const Dataset loud = generate_synthetic_dataset(cfg);
    CHECK(std::abs(corr(loud.features().col(0), loud.glucose())) < std::abs(corr(quiet.features().col(0), quiet.glucose())));
    CHECK(std::abs(corr(loud.features().col(0), loud.glucose())) < 0.2);
}

TEST_CASE("invalid configs are rejected") {
    SynthConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(generate_synthetic_dataset(cfg), Error);
    cfg = {};
    cfg.informative = 11;
    CHECK_THROWS_AS(generate_synthetic_dataset(cfg), Error);
    cfg = {};
    cfg.glucose_low = 12;
    cfg.glucose_high = 4;
    CHECK_THROWS_AS(generate_synthetic_dataset(cfg), Error);
    cfg = {};
    cfg.noise_sd = -1;
    CHECK_THROWS_AS(generate_synthetic_dataset(cfg), Error);
}
