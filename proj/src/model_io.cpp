#include <glucest/model_io.hpp>

#include <fstream>

namespace glucest {

using nlohmann::json;

namespace {

json vec_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector json_vec(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json params_json(const ForestParams& p) {
    json j{{"n_trees", p.n_trees},
           {"min_samples_leaf", p.min_samples_leaf},
           {"bootstrap", p.bootstrap},
           {"seed", p.seed}};
    j["max_depth"] = p.max_depth ? json(*p.max_depth) : json(nullptr);
    j["mtry"] = p.mtry ? json(*p.mtry) : json(nullptr);
    return j;
}

ForestParams json_params(const json& j) {
    ForestParams p;
    p.n_trees = j.at("n_trees").get<int>();
    p.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    p.bootstrap = j.at("bootstrap").get<bool>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<int>();
    if (!j.at("mtry").is_null()) p.mtry = j.at("mtry").get<int>();
    return p;
}

} // namespace

json forest_to_json(const Forest& f) {
    json trees = json::array();
    for (const auto& t : f.trees()) {
        trees.push_back({{"feature", t.feature},
                         {"threshold", t.threshold},
                         {"left", t.left},
                         {"right", t.right},
                         {"value", t.value}});
    }
    return {{"params", params_json(f.params())},
            {"n_features", f.n_features()},
            {"target_min", f.target_min()},
            {"target_max", f.target_max()},
            {"importances", vec_json(f.importances())},
            {"trees", std::move(trees)}};
}

Forest forest_from_json(const json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) {
        trees.push_back({t.at("feature").get<std::vector<int>>(), t.at("threshold").get<std::vector<double>>(),
                         t.at("left").get<std::vector<int>>(), t.at("right").get<std::vector<int>>(),
                         t.at("value").get<std::vector<double>>()});
    }
    return Forest(std::move(trees), json_params(j.at("params")), json_vec(j.at("importances")),
                  j.at("n_features").get<Eigen::Index>(), j.at("target_min").get<double>(),
                  j.at("target_max").get<double>());
}

json pipeline_to_json(const PiecewisePipeline& p) {
    json weights = json::array();
    for (const auto& w : p.averaging().weights()) weights.push_back(vec_json(w));
    json centroids = json::array();
    for (Eigen::Index t = 0; t < p.centroids().means.rows(); ++t)
        centroids.push_back(vec_json(p.centroids().means.row(t).transpose()));
    json forests = json::array();
    for (const auto& f : p.forests()) forests.push_back(forest_to_json(f));

    return {{"schema", kModelSchema},
            {"version", kModelVersion},
            {"window_length", p.window_length()},
            {"averaging", {{"weights", std::move(weights)}, {"gains", vec_json(p.gains().q())}}},
            {"importances", vec_json(p.weights())},
            {"partition", {{"boundaries", p.boundaries()}, {"sizes", p.subset_sizes()}}},
            {"centroids", std::move(centroids)},
            {"forest_params", params_json(p.params())},
            {"forests", std::move(forests)}};
}

PiecewisePipeline pipeline_from_json(const json& j) {
    try {
        if (j.at("schema").get<std::string>() != kModelSchema) throw Error("not a pipeline model file");
        const int version = j.at("version").get<int>();
        if (version != kModelVersion) throw Error("unsupported model version " + std::to_string(version));

        std::vector<Vector> weights;
        for (const auto& w : j.at("averaging").at("weights")) weights.push_back(json_vec(w));
        AveragingModel averaging(j.at("window_length").get<Eigen::Index>(), std::move(weights));
        averaging.set_gains(NormalizationGains(json_vec(j.at("averaging").at("gains"))));

        const auto& rows = j.at("centroids");
        if (rows.size() != kSubsetCount) throw Error("expected 3 centroid rows");
        Centroids centroids{Matrix(kSubsetCount, averaging.feature_count())};
        for (std::size_t t = 0; t < kSubsetCount; ++t) {
            const Vector row = json_vec(rows[t]);
            if (row.size() != averaging.feature_count()) throw Error("centroid length mismatch");
            centroids.means.row(static_cast<Eigen::Index>(t)) = row.transpose();
        }

        const auto& fj = j.at("forests");
        if (fj.size() != kSubsetCount) throw Error("expected 3 forests");
        std::array<Forest, kSubsetCount> forests{forest_from_json(fj[0]), forest_from_json(fj[1]),
                                                 forest_from_json(fj[2])};

        return PiecewisePipeline(
            std::move(averaging), json_vec(j.at("importances")),
            j.at("partition").at("boundaries").get<std::array<double, kSubsetCount - 1>>(),
            j.at("partition").at("sizes").get<std::array<std::size_t, kSubsetCount>>(), std::move(centroids),
            std::move(forests), json_params(j.at("forest_params")));
    } catch (const json::exception& e) {
        throw Error(std::string("model: malformed file: ") + e.what());
    } catch (const Error& e) {
        throw Error(std::string("model: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const PiecewisePipeline& p, const json& metadata) {
    json j = pipeline_to_json(p);
    j["metadata"] = metadata;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("model: cannot write '" + path.string() + "'");
    out << j.dump() << '\n';
    if (!out) throw Error("model: write failed for '" + path.string() + "'");
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("model: cannot open '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("model: '" + path.string() + "' is not valid JSON: " + e.what());
    }
    auto pipeline = pipeline_from_json(j);
    return {std::move(pipeline), j.value("metadata", json::object())};
}

} // namespace glucest
