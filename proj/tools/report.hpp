#pragma once

#include <glucest/metrics.hpp>

#include <json.hpp>

#include <string>
#include <vector>

namespace glucest::cli {

inline constexpr const char* kReportSchema = "glucest.report";
inline constexpr int kReportVersion = 1;

struct MethodReport {
    std::string name;
    MetricsReport metrics;
    EgaReport ega;
};

MethodReport evaluate_method(std::string name, const Vector& refs, const Vector& preds);

struct EvaluationReport {
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<MethodReport> methods;
};

nlohmann::json report_json(const EvaluationReport& r);
std::string report_text(const EvaluationReport& r);

// Clarke grid with its zone boundaries and one dot per (ref, pred) pair,
// both in mg/dL.
std::string ega_svg(const Vector& refs_mgdl, const Vector& preds_mgdl, const std::string& title);

} // namespace glucest::cli
