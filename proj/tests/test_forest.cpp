#include <glucest/forest.hpp>
#include <glucest/model_io.hpp>
#include <glucest/rng.hpp>

#include <doctest.h>

using namespace glucest;

namespace {

struct Problem {
    Matrix x;
    Vector y;
};

// y = slope * x1 + N(0, noise); the other columns are uniform noise.
Problem linear_problem(std::uint64_t seed, Eigen::Index n, Eigen::Index k, double slope, double noise) {
    Rng rng(seed);
    Problem p{Matrix(n, k), Vector(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) p.x(i, j) = rng.uniform();
        p.y[i] = slope * p.x(i, 0) + (noise > 0 ? rng.normal(0, noise) : 0.0);
    }
    return p;
}

} // namespace

TEST_CASE("constant target") {
    auto p = linear_problem(1, 30, 3, 0.0, 0.0);
    p.y.setConstant(6.25);
    ForestParams params;
    params.n_trees = 10;
    const Forest f = fit_forest(p.x, p.y, params);
    for (Eigen::Index i = 0; i < 30; ++i) CHECK(f.predict(Vector(p.x.row(i).transpose())) == 6.25);
    CHECK(f.predict(Vector::Constant(3, 100.0)) == 6.25);
    for (Eigen::Index k = 0; k < 3; ++k) CHECK(f.importances()[k] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("single unbagged tree fits unique rows exactly") {
    const auto p = linear_problem(2, 60, 4, 2.0, 0.5);
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    const Forest f = fit_forest(p.x, p.y, params);
    const Vector pred = f.predict_rows(p.x);
    for (Eigen::Index i = 0; i < 60; ++i) CHECK(pred[i] == p.y[i]);
}

TEST_CASE("importance concentrates on the signal feature") {
    ForestParams params;
    params.seed = 3;
    {
        const auto p = linear_problem(4, 400, 5, 3.0, 0.1);
        const Forest f = fit_forest(p.x, p.y, params);
        CHECK(f.importances()[0] >= 0.6);
        CHECK(f.importances().sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((f.importances().array() >= 0.0).all());
    }
    {
        const auto p = linear_problem(5, 300, 5, 1.0, 0.0);
        const Forest f = fit_forest(p.x, p.y, params);
        CHECK(f.importances()[0] > 0.8);
    }
}

TEST_CASE("never-split feature has zero importance") {
    auto p = linear_problem(6, 100, 3, 1.0, 0.1);
    p.x.col(2).setConstant(4.0);
    ForestParams params;
    params.n_trees = 20;
    const Forest f = fit_forest(p.x, p.y, params);
    CHECK(f.importances()[2] == 0.0);
    for (const auto& t : f.trees())
        for (int feat : t.feature) CHECK(feat != 2);
}

TEST_CASE("predictions stay inside the training target range") {
    const auto p = linear_problem(7, 80, 3, 5.0, 1.0);
    ForestParams params;
    params.n_trees = 25;
    params.max_depth = 4;
    params.min_samples_leaf = 3;
    const Forest f = fit_forest(p.x, p.y, params);
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        Vector x(3);
        for (Eigen::Index j = 0; j < 3; ++j) x[j] = rng.uniform(-5, 5);
        const double v = f.predict(x);
        CHECK(v >= p.y.minCoeff());
        CHECK(v <= p.y.maxCoeff());
    }
    for (const auto& t : f.trees())
        for (std::size_t n = 0; n < t.size(); ++n)
            if (t.feature[n] < 0) CHECK((t.value[n] >= p.y.minCoeff() && t.value[n] <= p.y.maxCoeff()));
}

TEST_CASE("fits are deterministic and independent of thread count") {
    const auto p = linear_problem(9, 150, 6, 2.0, 0.3);
    ForestParams params;
    params.n_trees = 16;
    params.seed = 99;
    params.threads = 1;
    const Forest a = fit_forest(p.x, p.y, params);
    params.threads = 4;
    const Forest b = fit_forest(p.x, p.y, params);
    CHECK(forest_to_json(a) == forest_to_json(b));
    CHECK(a.predict_rows(p.x) == b.predict_rows(p.x));

    params.seed = 100;
    const Forest c = fit_forest(p.x, p.y, params);
    CHECK(forest_to_json(a) != forest_to_json(c));
}

TEST_CASE("an unbagged tree fits duplicated rows exactly") {
    const auto p = linear_problem(10, 50, 3, 2.0, 0.2);
    Matrix x2(100, 3);
    x2 << p.x, p.x;
    Vector y2(100);
    y2 << p.y, p.y;
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    params.mtry = 3;
    const Forest a = fit_forest(p.x, p.y, params);
    const Forest b = fit_forest(x2, y2, params);
    // Off the training points near-tied splits may resolve differently.
    CHECK(a.predict_rows(p.x) == p.y);
    CHECK(b.predict_rows(p.x) == p.y);
}

TEST_CASE("forest errors") {
    const auto p = linear_problem(11, 20, 3, 1.0, 0.1);
    ForestParams params;
    CHECK_THROWS_AS(fit_forest(p.x.topRows(1), p.y.head(1), params), Error);
    CHECK_THROWS_AS(fit_forest(p.x, p.y.head(5), params), Error);
    params.mtry = 4;
    CHECK_THROWS_AS(fit_forest(p.x, p.y, params), Error);
    params.mtry.reset();
    params.n_trees = 0;
    CHECK_THROWS_AS(fit_forest(p.x, p.y, params), Error);
    params.n_trees = 3;
    const Forest f = fit_forest(p.x, p.y, params);
    CHECK(f.params().mtry == 1);
    CHECK_THROWS_AS(f.predict(Vector::Zero(2)), Error);
}

TEST_CASE("forest JSON round trip preserves predictions") {
    const auto p = linear_problem(13, 90, 4, 2.0, 0.2);
    ForestParams params;
    params.n_trees = 12;
    params.max_depth = 6;
    const Forest f = fit_forest(p.x, p.y, params);
    const Forest back = forest_from_json(nlohmann::json::parse(forest_to_json(f).dump()));
    CHECK(back.predict_rows(p.x) == f.predict_rows(p.x));
    CHECK(back.importances() == f.importances());

    auto broken = forest_to_json(f);
    broken["trees"][0]["left"][0] = 0;
    CHECK_THROWS_AS(forest_from_json(broken), Error);
}
