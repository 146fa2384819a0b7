#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace glucest::cli {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

MethodReport evaluate_method(std::string name, const Vector& refs, const Vector& preds) {
    return {std::move(name), compute_metrics(refs, preds), ega_report(refs, preds)};
}

json report_json(const EvaluationReport& r) {
    json methods = json::array();
    for (const auto& m : r.methods) {
        json counts = json::object();
        json percent = json::object();
        for (std::size_t z = 0; z < kZoneCount; ++z) {
            const std::string key(1, zone_letter(static_cast<Zone>(z)));
            counts[key] = m.ega.counts[z];
            percent[key] = m.ega.percent[z];
        }
        methods.push_back({{"name", m.name},
                           {"r", m.metrics.pearson_r ? json(*m.metrics.pearson_r) : json(nullptr)},
                           {"mae", m.metrics.mae},
                           {"sd", m.metrics.sd_abs_err},
                           {"sd_signed", m.metrics.sd_signed_err},
                           {"rmse", m.metrics.rmse},
                           {"mard", m.metrics.mard_percent},
                           {"zone_counts", std::move(counts)},
                           {"zone_percent", std::move(percent)}});
    }
    return {{"schema", kReportSchema},
            {"version", kReportVersion},
            {"train_rows", r.train_rows},
            {"test_rows", r.test_rows},
            {"methods", std::move(methods)}};
}

std::string report_text(const EvaluationReport& r) {
    std::ostringstream os;
    os << "train rows: " << r.train_rows << "\ntest rows: " << r.test_rows << "\n\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-22s %8s %20s %10s %9s %8s %8s %8s %8s %8s\n", "method", "R",
                  "MAE+-SD (mmol/L)", "RMSE", "MARD (%)", "A (%)", "B (%)", "C (%)", "D (%)", "E (%)");
    os << line;
    for (const auto& m : r.methods) {
        const auto r_text = m.metrics.pearson_r ? fixed(*m.metrics.pearson_r) : std::string("undef");
        const auto mae = fixed(m.metrics.mae) + " +- " + fixed(m.metrics.sd_abs_err);
        std::snprintf(line, sizeof line, "%-22s %8s %20s %10s %9s %8s %8s %8s %8s %8s\n", m.name.c_str(),
                      r_text.c_str(), mae.c_str(), fixed(m.metrics.rmse).c_str(),
                      fixed(m.metrics.mard_percent, 2).c_str(), fixed(m.ega.percent[0], 2).c_str(),
                      fixed(m.ega.percent[1], 2).c_str(), fixed(m.ega.percent[2], 2).c_str(),
                      fixed(m.ega.percent[3], 2).c_str(), fixed(m.ega.percent[4], 2).c_str());
        os << line;
    }
    os << "\nsigned-error SD (mmol/L):";
    for (const auto& m : r.methods) os << ' ' << m.name << '=' << fixed(m.metrics.sd_signed_err);
    os << '\n';
    return os.str();
}

std::string ega_svg(const Vector& refs, const Vector& preds, const std::string& title) {
    constexpr double kMax = 400.0;
    constexpr double kSize = 520.0;
    constexpr double kPad = 50.0;
    const double scale = (kSize - 2 * kPad) / kMax;
    auto px = [&](double v) { return fixed(kPad + std::clamp(v, 0.0, kMax) * scale, 2); };
    auto py = [&](double v) { return fixed(kSize - kPad - std::clamp(v, 0.0, kMax) * scale, 2); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kSize / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
    os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kSize - 2 * kPad << "\" height=\""
       << kSize - 2 * kPad << "\" fill=\"none\" stroke=\"black\"/>\n";

    struct Segment {
        double x1, y1, x2, y2;
    };
    const Segment segments[] = {
        {0, 70, 175.0 / 3.0, 70}, {175.0 / 3.0, 70, kMax / 1.2, kMax}, {70, 84, 70, kMax},
        {0, 180, 70, 180},        {70, 180, 290, kMax},                {70, 0, 70, 56},
        {70, 56, kMax, 320},      {180, 0, 180, 70},                   {180, 70, kMax, 70},
        {240, 70, 240, 180},      {240, 180, kMax, 180},               {130, 0, 180, 70},
    };
    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(kMax) << "\" y2=\"" << py(kMax)
       << "\" stroke=\"gray\" stroke-dasharray=\"3,3\"/>\n";
    for (const auto& s : segments) {
        os << "<line x1=\"" << px(s.x1) << "\" y1=\"" << py(s.y1) << "\" x2=\"" << px(s.x2) << "\" y2=\""
           << py(s.y2) << "\" stroke=\"black\"/>\n";
    }
    const struct {
        const char* label;
        double x, y;
    } labels[] = {{"A", 30, 15}, {"A", 370, 260}, {"B", 280, 370}, {"B", 370, 290}, {"C", 160, 370},
                  {"C", 160, 15}, {"D", 30, 140},  {"D", 370, 120}, {"E", 30, 370},  {"E", 370, 15}};
    for (const auto& l : labels)
        os << "<text x=\"" << px(l.x) << "\" y=\"" << py(l.y) << "\" font-size=\"16\">" << l.label << "</text>\n";

    for (Eigen::Index i = 0; i < refs.size(); ++i) {
        os << "<circle cx=\"" << px(refs[i]) << "\" cy=\"" << py(preds[i])
           << "\" r=\"2.5\" fill=\"steelblue\" fill-opacity=\"0.7\"/>\n";
    }
    for (int tick = 0; tick <= 400; tick += 100) {
        os << "<text x=\"" << px(tick) << "\" y=\"" << fixed(kSize - kPad + 16, 2) << "\" text-anchor=\"middle\">"
           << tick << "</text>\n";
        os << "<text x=\"" << fixed(kPad - 6, 2) << "\" y=\"" << py(tick) << "\" text-anchor=\"end\">" << tick
           << "</text>\n";
    }
    os << "<text x=\"" << kSize / 2 << "\" y=\"" << kSize - 10
       << "\" text-anchor=\"middle\">reference (mg/dL)</text>\n";
    os << "<text x=\"14\" y=\"" << kSize / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
       << kSize / 2 << ")\">estimate (mg/dL)</text>\n";
    os << "</svg>\n";
    return os.str();
}

} // namespace glucest::cli
