// Acceptance checks. One line per criterion; exit status is nonzero if any fails.

#include "oracles.hpp"
#include "test_util.hpp"

#include "../tools/cli.hpp"

#include <glucest/averaging.hpp>
#include <glucest/forest.hpp>
#include <glucest/metrics.hpp>
#include <glucest/synth.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace glucest;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and sizes.
constexpr int kOracleInstances = 100;
constexpr Eigen::Index kMaxRows = 30;
constexpr Eigen::Index kMaxWindow = 5;
constexpr double kOracleRelTol = 1e-6;
constexpr int kSearchDirections = 100000;
constexpr double kOracleSeconds = 10.0;
constexpr int kDominanceDirections = 1000;
constexpr double kDominanceSlack = 1e-12;
constexpr double kMinImportance = 0.6;
constexpr double kMaxRmseRatio = 0.5;
constexpr double kForestSeconds = 5.0;
constexpr double kPercentTol = 1e-9;
constexpr double kGridStep = 0.5;
constexpr double kGridLo = 1.0;
constexpr double kGridHi = 600.0;
constexpr int kMetricPairs = 1000;
constexpr double kCliSeconds = 60.0;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(const char* id, const char* name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %s %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Instance {
    Matrix windows;
    Vector g;
};

// Windows of a random positive feature, glucose loosely tied to it.
Instance random_instance(Rng& rng) {
    const auto l = 1 + static_cast<Eigen::Index>(rng.below(kMaxWindow));
    const auto n = l + 1 + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(kMaxRows - l)));
    Vector x(n + l - 1);
    Vector g_full(n + l - 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        g_full[i] = rng.uniform(4.0, 12.0);
        x[i] = 1.0 + 0.3 * g_full[i] + rng.normal(0.0, rng.uniform(0.1, 2.0));
    }
    return {build_window_matrix(x, l), align_glucose(g_full, l)};
}

double quotient(const Matrix& gram, const Vector& u, const Vector& w) {
    const double num = w.dot(u);
    return num * num / w.dot(gram * w);
}

Outcome oracle_equivalence() {
    const auto t0 = Clock::now();
    Rng rng(20240601);
    double worst_eig = 0.0;
    double worst_search = 0.0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const auto inst = random_instance(rng);
        const auto sol = solve_averaging_weights(inst.windows, inst.g);
        const double eig = oracle::pencil_max_cos2(inst.windows, inst.g);
        const double search = oracle::random_search_max_cos2(inst.windows, inst.g, rng, kSearchDirections);
        worst_eig = std::max(worst_eig, std::abs(sol.cos2 - eig) / eig);
        worst_search = std::max(worst_search, std::abs(sol.cos2 - search) / search);
    }
    const double secs = seconds_since(t0);
    const bool pass = worst_eig <= kOracleRelTol && worst_search <= kOracleRelTol && secs < kOracleSeconds;
    return {pass, fmt("max rel err vs eigensolver %.3g, vs direction search %.3g (tol %.0g); %.2f s (limit %.0f s)",
                      worst_eig, worst_search, kOracleRelTol, secs, kOracleSeconds)};
}

Outcome optimality_dominance() {
    Rng rng(20240601);
    Rng dirs(99);
    long violations = 0;
    long compared = 0;
    for (int i = 0; i < kOracleInstances; ++i) {
        const auto inst = random_instance(rng);
        const auto sol = solve_averaging_weights(inst.windows, inst.g);
        const Matrix gram = inst.windows.transpose() * inst.windows;
        const Vector u = inst.windows.transpose() * inst.g;
        const double bound = sol.quotient * (1.0 + kDominanceSlack);
        const Eigen::Index l = inst.windows.cols();
        for (Eigen::Index j = 0; j < l; ++j) {
            ++compared;
            if (quotient(gram, u, Vector::Unit(l, j)) > bound) ++violations;
        }
        for (int d = 0; d < kDominanceDirections; ++d) {
            ++compared;
            if (quotient(gram, u, oracle::random_unit(dirs, l)) > bound) ++violations;
        }
    }
    return {violations == 0, fmt("%ld violations in %ld comparisons (relative slack %.0g)", violations, compared,
                                 kDominanceSlack)};
}

Outcome averaging_benefit() {
    const SynthConfig cfg;
    const Dataset data = generate_synthetic_dataset(cfg);
    const auto fit = fit_feature_averaging(data, kDefaultWindowLength);
    const Vector g = align_glucose(data.glucose(), kDefaultWindowLength);
    double raw = 0.0;
    double averaged = 0.0;
    for (Eigen::Index j = 0; j < cfg.informative; ++j) {
        raw += oracle::cos2(data.features().col(j).tail(g.size()), g);
        averaged += fit.cos2[static_cast<std::size_t>(j)];
    }
    raw /= static_cast<double>(cfg.informative);
    averaged /= static_cast<double>(cfg.informative);
    return {averaged > raw, fmt("mean cos^2 over informative features: averaged %.6f, raw %.6f", averaged, raw)};
}

Outcome forest_sanity() {
    const auto t0 = Clock::now();
    constexpr Eigen::Index n = 400;
    constexpr Eigen::Index n_train = 300;
    Rng rng(11);
    Matrix x(n, 5);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < 5; ++j) x(i, j) = rng.uniform();
        y[i] = 3.0 * x(i, 0) + rng.normal(0.0, 0.1);
    }
    ForestParams params;
    params.seed = 5;
    const Forest f = fit_forest(x.topRows(n_train), y.head(n_train), params);
    const Vector test_y = y.tail(n - n_train);
    const Vector pred = f.predict_rows(x.bottomRows(n - n_train));
    const double rmse = std::sqrt((pred - test_y).squaredNorm() / static_cast<double>(test_y.size()));
    const double sd = std::sqrt((test_y.array() - test_y.mean()).square().mean());
    const double imp = f.importances()[0];
    const double secs = seconds_since(t0);
    const bool pass = imp >= kMinImportance && rmse <= kMaxRmseRatio * sd && secs < kForestSeconds;
    return {pass, fmt("importance(x1) %.4f (min %.1f); held-out RMSE %.4f vs %.1f*std(y) = %.4f; %.2f s (limit %.0f s)",
                      imp, kMinImportance, rmse, kMaxRmseRatio, kMaxRmseRatio * sd, secs, kForestSeconds)};
}

Outcome exact_fit() {
    Rng rng(3);
    Matrix x(200, 4);
    Vector y(200);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform();
        y[i] = rng.normal(7.0, 2.0);
    }
    ForestParams params;
    params.n_trees = 1;
    params.bootstrap = false;
    const Forest f = fit_forest(x, y, params);
    const Vector pred = f.predict_rows(x);
    Eigen::Index mismatches = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) mismatches += pred[i] != y[i];
    return {mismatches == 0, fmt("%ld of %ld training targets not reproduced exactly", static_cast<long>(mismatches),
                                 static_cast<long>(y.size()))};
}

Outcome clarke_goldens() {
    struct Golden {
        double ref, pred;
        Zone zone;
    };
    const Golden goldens[] = {{100, 100, Zone::A}, {200, 60, Zone::E}, {100, 215, Zone::C},
                              {250, 150, Zone::D}, {100, 135, Zone::B}};
    int wrong = 0;
    std::string detail;
    for (const auto& gd : goldens) {
        const Zone z = ega_zone(gd.ref, gd.pred);
        if (z != gd.zone) ++wrong;
        detail += fmt("(%g,%g)->%c ", gd.ref, gd.pred, zone_letter(z));
    }

    std::vector<double> axis;
    for (double v = kGridLo + kGridStep; v < kGridHi; v += kGridStep) axis.push_back(v);
    const auto m = static_cast<Eigen::Index>(axis.size());
    Vector refs(m * m);
    Vector preds(m * m);
    std::size_t invalid = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            const double r = axis[static_cast<std::size_t>(i)];
            const double p = axis[static_cast<std::size_t>(j)];
            const int z = static_cast<int>(ega_zone(r, p));
            if (z < 0 || z >= static_cast<int>(kZoneCount)) ++invalid;
            refs[i * m + j] = r / kMgdlPerMmol;
            preds[i * m + j] = p / kMgdlPerMmol;
        }
    }
    const EgaReport rep = ega_report(refs, preds);
    double pct = 0.0;
    std::size_t counted = 0;
    for (std::size_t z = 0; z < kZoneCount; ++z) {
        pct += rep.percent[z];
        counted += rep.counts[z];
    }
    const bool grid_ok = invalid == 0 && counted == static_cast<std::size_t>(m * m) &&
                         std::abs(pct - 100.0) <= kPercentTol;
    return {wrong == 0 && grid_ok,
            detail + fmt("| grid %ldx%ld: %zu unassigned, %zu counted, percent sum %.12f (tol %.0g)",
                         static_cast<long>(m), static_cast<long>(m), invalid, counted, pct, kPercentTol)};
}

Outcome metrics_goldens() {
    Vector refs(2), preds(2);
    refs << 5, 10;
    preds << 6, 9;
    const auto m = compute_metrics(refs, preds);
    const bool golden = m.mae == 1.0 && m.rmse == 1.0 && m.mard_percent == 15.0;

    const auto same = compute_metrics(refs, refs);
    const bool zero = same.mae == 0.0 && same.rmse == 0.0 && same.mard_percent == 0.0 && same.sd_abs_err == 0.0 &&
                      same.sd_signed_err == 0.0;

    Rng rng(17);
    int violations = 0;
    for (int i = 0; i < kMetricPairs; ++i) {
        const auto n = 2 + static_cast<Eigen::Index>(rng.below(50));
        Vector r(n), p(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            r[k] = rng.uniform(2.0, 20.0);
            p[k] = r[k] + rng.normal(0.0, rng.uniform(0.01, 3.0));
        }
        const auto q = compute_metrics(r, p);
        if (q.rmse < q.mae) ++violations;
    }
    return {golden && zero && violations == 0,
            fmt("(5,10)/(6,9): MAE %g RMSE %g MARD %g; identical: MAE %g RMSE %g MARD %g; RMSE<MAE in %d of %d pairs",
                m.mae, m.rmse, m.mard_percent, same.mae, same.rmse, same.mard_percent, violations, kMetricPairs)};
}

struct FlowResult {
    int code = 0;
    std::string model;
    std::string report;
};

FlowResult run_flow(const test::TempDir& dir) {
    const std::string data = (dir / "data.csv").string();
    const std::string model = (dir / "model.json").string();
    const std::string rep = (dir / "report.json").string();
    std::ostringstream out, err;
    FlowResult r;
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"gen", "-o", data},
             {"train", "-i", data, "-o", model},
             {"evaluate", "-m", model, "-i", data, "-o", rep, "--format", "structured"}}) {
        r.code = cli::run(args, out, err);
        if (r.code != 0) throw Error("'" + args[0] + "' exited " + std::to_string(r.code) + ": " + err.str());
    }
    r.model = test::read_text(model);
    r.report = test::read_text(rep);
    return r;
}

Outcome cli_flow() {
    const test::TempDir dir;
    const auto t0 = Clock::now();
    const FlowResult r = run_flow(dir);
    const double secs = seconds_since(t0);

    const auto j = nlohmann::json::parse(r.report);
    double baseline = NAN;
    double pipeline = NAN;
    bool fields = j.at("methods").size() == 2;
    for (const auto& m : j.at("methods")) {
        for (const char* key : {"r", "mae", "sd", "rmse", "mard"}) fields = fields && m.at(key).is_number();
        for (const char* zone : {"A", "B", "C", "D", "E"}) fields = fields && m.at("zone_percent").at(zone).is_number();
        const auto name = m.at("name").get<std::string>();
        if (name == "random_forest") baseline = m.at("mard").get<double>();
        if (name == "averaged_piecewise") pipeline = m.at("mard").get<double>();
    }
    const bool pass = fields && secs < kCliSeconds && pipeline <= baseline;
    return {pass, fmt("indicators and zones %s; pipeline MARD %.4f vs baseline MARD %.4f; %.2f s (limit %.0f s)",
                      fields ? "present" : "MISSING", pipeline, baseline, secs, kCliSeconds)};
}

Outcome determinism() {
    const test::TempDir a;
    const test::TempDir b;
    const FlowResult ra = run_flow(a);
    const FlowResult rb = run_flow(b);
    const bool model_same = !ra.model.empty() && ra.model == rb.model;
    const bool report_same = !ra.report.empty() && ra.report == rb.report;
    return {model_same && report_same, fmt("model files %s (%zu bytes), report files %s (%zu bytes)",
                                           model_same ? "identical" : "DIFFER", ra.model.size(),
                                           report_same ? "identical" : "DIFFER", ra.report.size())};
}

} // namespace

int main() {
    report("C1", "averaging optimizer matches oracles", oracle_equivalence);
    report("C2", "averaging optimum dominates basis and random directions", optimality_dominance);
    report("C3", "averaging raises cos^2 on default synthetic data", averaging_benefit);
    report("C4", "forest sanity on y = 3*x1 + noise", forest_sanity);
    report("C5", "single unbagged tree fits unique rows exactly", exact_fit);
    report("C6", "Clarke zone goldens and grid coverage", clarke_goldens);
    report("C7", "metric goldens and RMSE >= MAE", metrics_goldens);
    report("C8", "gen -> train -> evaluate flow", cli_flow);
    report("C9", "identical runs give byte-identical outputs", determinism);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
