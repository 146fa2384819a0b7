#include "cli.hpp"
#include "report.hpp"

#include <glucest/model_io.hpp>
#include <glucest/piecewise.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace glucest::cli {

using nlohmann::json;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
    out.close();
    if (!out) throw Error("write failed for '" + path + "'");
}

std::string numbers(const Vector& v) {
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

void add_split_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--seed", cfg.split.seed, "Seed for the split and every forest");
    app.add_option("--train-fraction", cfg.split.train_fraction, "Share of rows used for training")
        ->check(CLI::Range(0.0, 1.0));
}

void add_forest_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--window", cfg.window_length, "Averaging window length")->check(CLI::PositiveNumber);
    app.add_option("--trees", cfg.forest.n_trees, "Trees per forest")->check(CLI::PositiveNumber);
    app.add_option("--mtry", cfg.forest.mtry, "Candidate features per split (default ceil(K/3))")
        ->check(CLI::PositiveNumber);
    app.add_option("--min-leaf", cfg.forest.min_samples_leaf, "Minimum rows per leaf")->check(CLI::PositiveNumber);
    app.add_option("--max-depth", cfg.forest.max_depth, "Maximum tree depth")->check(CLI::PositiveNumber);
    app.add_option("--threads", cfg.forest.threads, "Worker threads (0: all cores); results do not depend on it");
}

void add_format_option(CLI::App& app, RunConfig& cfg) {
    app.add_option("--format", cfg.format, "Report format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"text", Format::Text},
                                                                          {"structured", Format::Structured}},
                                            CLI::ignore_case));
}

void cmd_gen(const RunConfig& cfg, std::ostream& out) {
    const Dataset d = generate_synthetic_dataset(cfg.synth);
    save_csv(cfg.output, d);
    out << "wrote " << d.rows() << " rows x " << d.cols() << " features to " << cfg.output << '\n';
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
    const Dataset data = load_csv(cfg.input);
    const auto split = split_train_test(data, cfg.split);
    ForestParams params = cfg.forest;
    params.seed = cfg.split.seed;
    const PiecewisePipeline p = train_pipeline(split.train, cfg.window_length, params);

    const json metadata{{"split", {{"seed", cfg.split.seed}, {"train_fraction", cfg.split.train_fraction}}},
                        {"source_rows", data.rows()},
                        {"feature_names", data.feature_names()}};
    save_model(cfg.output, p, metadata);

    const auto sizes = p.subset_sizes();
    if (cfg.format == Format::Structured) {
        out << json{{"train_rows", split.train.rows()},
                    {"test_rows", split.test.rows()},
                    {"subset_sizes", sizes},
                    {"boundaries", p.boundaries()},
                    {"importances", std::vector<double>(p.weights().data(), p.weights().data() + p.weights().size())}}
                   .dump(2)
            << '\n';
        return;
    }
    out << "train rows: " << split.train.rows() << ", test rows: " << split.test.rows() << '\n'
        << "subset sizes (high to low glucose): " << sizes[0] << ", " << sizes[1] << ", " << sizes[2] << '\n'
        << "subset boundaries (mmol/L): " << format_number(p.boundaries()[0]) << ", "
        << format_number(p.boundaries()[1]) << '\n'
        << "importances: " << numbers(p.weights()) << '\n'
        << "model written to " << cfg.output << '\n';
}

void cmd_predict(const RunConfig& cfg, std::ostream& out) {
    const ModelFile model = load_model(cfg.model);
    const Dataset data = load_csv(cfg.input);
    const auto pred = predict_pipeline(model.pipeline, data);

    std::ostringstream csv;
    csv << "row,class,glucose_pred_mmol_l," << kGlucoseColumn << '\n';
    for (Eigen::Index i = 0; i < pred.glucose.size(); ++i) {
        csv << i << ',' << pred.classes[static_cast<std::size_t>(i)] << ',' << format_number(pred.glucose[i]) << ','
            << format_number(data.glucose()[i]) << '\n';
    }
    if (cfg.output.empty()) {
        out << csv.str();
    } else {
        write_file(cfg.output, csv.str());
        out << "wrote " << pred.glucose.size() << " predictions to " << cfg.output << '\n';
    }
}

void cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
    const ModelFile model = load_model(cfg.model);
    const Dataset data = load_csv(cfg.input);

    // Reproduce the training split from the model's metadata.
    SplitConfig split_cfg = cfg.split;
    if (model.metadata.contains("split")) {
        split_cfg.seed = model.metadata["split"].at("seed").get<std::uint64_t>();
        split_cfg.train_fraction = model.metadata["split"].at("train_fraction").get<double>();
    }
    if (model.metadata.contains("source_rows") &&
        model.metadata["source_rows"].get<Eigen::Index>() != data.rows())
        throw Error("evaluate: model was trained on a " + model.metadata["source_rows"].dump() +
                    "-row dataset, got " + std::to_string(data.rows()) + " rows");
    const auto split = split_train_test(data, split_cfg);

    ForestParams baseline_params = model.pipeline.params();
    baseline_params.mtry.reset();
    baseline_params.threads = cfg.forest.threads;
    const Forest baseline = fit_forest(split.train.features(), split.train.glucose(), baseline_params);
    const Vector baseline_pred = baseline.predict_rows(split.test.features());
    const auto pipeline_pred = predict_pipeline(model.pipeline, split.test);

    EvaluationReport report;
    report.train_rows = static_cast<std::size_t>(split.train.rows());
    report.test_rows = static_cast<std::size_t>(split.test.rows());
    report.methods.push_back(evaluate_method("random_forest", split.test.glucose(), baseline_pred));
    report.methods.push_back(evaluate_method("averaged_piecewise", split.test.glucose(), pipeline_pred.glucose));

    const std::string text = report_text(report);
    if (!cfg.output.empty())
        write_file(cfg.output, cfg.format == Format::Structured ? report_json(report).dump(2) + "\n" : text);
    if (!cfg.plot.empty()) {
        const Vector refs = split.test.glucose() * kMgdlPerMmol;
        const Vector preds = pipeline_pred.glucose * kMgdlPerMmol;
        write_file(cfg.plot, ega_svg(refs, preds, "Clarke error grid: averaged_piecewise"));
    }
    out << text;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Non-invasive glucose estimation: feature-domain averaging + piecewise random forests"};
    app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
    app.require_subcommand(1);

    RunConfig cfg;

    auto* gen = app.add_subcommand("gen", "Generate a synthetic feature dataset");
    gen->add_option("--n", cfg.synth.n, "Rows");
    gen->add_option("--k", cfg.synth.k, "Features");
    gen->add_option("--informative", cfg.synth.informative, "Glucose-correlated features");
    gen->add_option("--noise-sd", cfg.synth.noise_sd, "Per-feature noise SD");
    gen->add_option("--glucose-low", cfg.synth.glucose_low, "Lowest glucose (mmol/L)");
    gen->add_option("--glucose-high", cfg.synth.glucose_high, "Highest glucose (mmol/L)");
    gen->add_option("--drift-amp", cfg.synth.drift_amp, "Amplitude of the shared slow drift");
    gen->add_option("--seed", cfg.synth.seed, "Generator seed");
    gen->add_option("-o,--output", cfg.output, "Output CSV")->required();

    auto* train = app.add_subcommand("train", "Split a dataset and train the piecewise pipeline");
    train->add_option("-i,--data", cfg.input, "Dataset CSV")->required();
    train->add_option("-o,--output", cfg.output, "Model file")->required();
    add_split_options(*train, cfg);
    add_forest_options(*train, cfg);
    add_format_option(*train, cfg);

    auto* predict = app.add_subcommand("predict", "Predict glucose for every row of a dataset");
    predict->add_option("-m,--model", cfg.model, "Model file")->required();
    predict->add_option("-i,--data", cfg.input, "Dataset CSV")->required();
    predict->add_option("-o,--output", cfg.output, "Prediction CSV (stdout when omitted)");

    auto* evaluate = app.add_subcommand("evaluate", "Compare the pipeline with a plain random forest on the held-out split");
    evaluate->add_option("-m,--model", cfg.model, "Model file")->required();
    evaluate->add_option("-i,--data", cfg.input, "Dataset CSV the model was trained from")->required();
    evaluate->add_option("-o,--output", cfg.output, "Report file");
    evaluate->add_option("--plot", cfg.plot, "Clarke error grid SVG for the pipeline");
    evaluate->add_option("--threads", cfg.forest.threads, "Worker threads for the baseline forest");
    add_format_option(*evaluate, cfg);

    std::vector<std::string> argv_store{"glucest"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (gen->parsed()) cmd_gen(cfg, out);
        else if (train->parsed()) cmd_train(cfg, out);
        else if (predict->parsed()) cmd_predict(cfg, out);
        else if (evaluate->parsed()) cmd_evaluate(cfg, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace glucest::cli
