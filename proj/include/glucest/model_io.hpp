#pragma once

#include <glucest/forest.hpp>
#include <glucest/piecewise.hpp>

#include <json.hpp>

#include <filesystem>

namespace glucest {

inline constexpr const char* kModelSchema = "glucest.pipeline";
inline constexpr int kModelVersion = 1;

nlohmann::json forest_to_json(const Forest& f);
Forest forest_from_json(const nlohmann::json& j);

nlohmann::json pipeline_to_json(const PiecewisePipeline& p);
PiecewisePipeline pipeline_from_json(const nlohmann::json& j);

struct ModelFile {
    PiecewisePipeline pipeline;
    nlohmann::json metadata; // free-form, e.g. how the training split was drawn
};

void save_model(const std::filesystem::path& path, const PiecewisePipeline& p,
                const nlohmann::json& metadata = nlohmann::json::object());
ModelFile load_model(const std::filesystem::path& path);

} // namespace glucest
