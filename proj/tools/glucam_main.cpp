// Command-line front end for the PPG glucose-estimation pipeline.
// Stages hand data off through files, so every intermediate is
// inspectable and a run can resume at any step.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glucam/glucam.hpp"

namespace fs = std::filesystem;
using namespace glucam;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitConfig = 4;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::rank:
        case ErrorKind::scale:
            return kExitNumeric;
        case ErrorKind::config:
        case ErrorKind::param:
            return kExitConfig;
        default:
            return kExitInput;
    }
}

struct GlobalOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

PipelineConfig load_config(const GlobalOptions& global) {
    PipelineConfig cfg;
    if (!global.config_path.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(global.config_path));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::config, std::string("cannot parse config: ") + e.what());
        }
        cfg = config_from_json(j);
    }
    if (global.seed) cfg.split.seed = *global.seed;
    return cfg;
}

std::vector<fs::path> sorted_csv_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) fail(ErrorKind::io, "not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(ErrorKind::io, "no .csv files in " + dir.string());
    return files;
}

PpgSignal read_signal_file(const fs::path& path) {
    std::istringstream in(read_file(path));
    return parse_signal_csv(in);
}

FrameStatsSeries read_frame_stats_file(const fs::path& path) {
    std::istringstream in(read_file(path));
    return parse_frame_stats(in);
}

// --- synth ---

struct SynthArgs {
    std::size_t n = 88;
    double glucose_noise = 0.0;
    double duration = 20.0;
    double fs = 30.0;
};

// Synthetic signals are written through the frame-stats format so they
// enter the pipeline by the same door as real recordings. The waveform
// rides on the red channel, inverted around a mid-scale offset to mimic
// the raw camera polarity.
void write_trial_frame_stats(const fs::path& path, const PpgSignal& signal) {
    constexpr double kRedOffset = 160.0;
    FrameStatsSeries series;
    series.fps = signal.fs;
    series.channel_max = 255.0;
    series.frames.reserve(signal.samples.size());
    for (std::size_t i = 0; i < signal.samples.size(); ++i) {
        FrameStatsSeries::Frame f;
        f.index = static_cast<std::int64_t>(i);
        f.red = kRedOffset - signal.samples[i];
        f.green = 90.0;
        f.blue = 60.0;
        series.frames.push_back(f);
    }
    std::ostringstream out;
    write_frame_stats(out, series);
    atomic_write_file(path, out.str());
}

int cmd_synth(const GlobalOptions& global, const SynthArgs& args) {
    PipelineConfig cfg = load_config(global);
    if (global.out_dir.empty()) fail(ErrorKind::config, "synth requires --out-dir");

    GlucoseMap map;
    map.noise_sigma = args.glucose_noise;
    DatasetProfile profile;
    profile.duration = args.duration;
    profile.fs = args.fs;

    const std::uint64_t seed = global.seed.value_or(cfg.split.seed);
    const SynthDataset ds = synth_dataset(args.n, map, seed, profile);

    const fs::path out_dir(global.out_dir);
    const fs::path trials_dir = out_dir / "trials";
    std::vector<std::string> files;
    for (const SynthTrial& trial : ds.trials) {
        const std::string file = "trials/" + trial.id + ".csv";
        write_trial_frame_stats(out_dir / file, trial.signal);
        files.push_back(file);
    }
    atomic_write_file(out_dir / "manifest.json", manifest_to_json(ds, files).dump(2) + "\n");
    std::cout << "wrote " << ds.trials.size() << " trials to " << trials_dir.string() << "\n";
    return kExitOk;
}

// --- extract ---

struct ExtractArgs {
    std::string in, out, in_dir, out_dir;
    std::string channel = "red";
    std::string flip = "auto";
};

void extract_one(const fs::path& in_path, const fs::path& out_path, Channel channel,
                 std::optional<bool> flip) {
    const FrameStatsSeries series = read_frame_stats_file(in_path);
    const PpgSignal signal = extract_ppg(series, channel, flip);
    std::vector<std::pair<std::string, std::string>> extra;
    extra.emplace_back("channel", channel_name(channel));
    if (channel_is_noisy(channel)) extra.emplace_back("noisy", "1");
    std::ostringstream out;
    write_signal_csv(out, signal, extra);
    atomic_write_file(out_path, out.str());
}

int cmd_extract(const GlobalOptions&, const ExtractArgs& args) {
    const Channel channel = channel_from_name(args.channel);
    std::optional<bool> flip;
    if (args.flip == "on") flip = true;
    else if (args.flip == "off") flip = false;
    else if (args.flip != "auto") fail(ErrorKind::config, "--flip must be auto, on or off");

    if (!args.in.empty() && !args.out.empty()) {
        extract_one(args.in, args.out, channel, flip);
        return kExitOk;
    }
    if (args.in_dir.empty() || args.out_dir.empty())
        fail(ErrorKind::config, "extract needs --in/--out or --in-dir/--out-dir");
    for (const fs::path& file : sorted_csv_files(args.in_dir))
        extract_one(file, fs::path(args.out_dir) / file.filename(), channel, flip);
    return kExitOk;
}

// --- preprocess ---

struct PreprocessArgs {
    std::string in, out, in_dir, out_dir;
};

int cmd_preprocess(const GlobalOptions& global, const PreprocessArgs& args) {
    const PipelineConfig cfg = load_config(global);
    const auto run = [&](const fs::path& in_path, const fs::path& out_path) {
        const PpgSignal signal = read_signal_file(in_path);
        const PpgSignal processed = preprocess_pipeline(signal, cfg.als, cfg.gauss);
        std::ostringstream out;
        write_signal_csv(out, processed);
        atomic_write_file(out_path, out.str());
    };
    if (!args.in.empty() && !args.out.empty()) {
        run(args.in, args.out);
        return kExitOk;
    }
    if (args.in_dir.empty() || args.out_dir.empty())
        fail(ErrorKind::config, "preprocess needs --in/--out or --in-dir/--out-dir");
    for (const fs::path& file : sorted_csv_files(args.in_dir))
        run(file, fs::path(args.out_dir) / file.filename());
    return kExitOk;
}

// --- features ---

struct FeaturesArgs {
    std::string in_dir;
    std::string out;
    std::string labels;
    std::string schema;
};

int cmd_features(const GlobalOptions& global, const FeaturesArgs& args) {
    PipelineConfig cfg = load_config(global);
    if (!args.schema.empty()) cfg.schema_id = args.schema;
    cfg.validate();
    const FeatureSchema schema = cfg.schema();

    std::map<std::string, TrialLabel> labels;
    if (!args.labels.empty()) {
        if (fs::path(args.labels).extension() == ".json") {
            nlohmann::json manifest;
            try {
                manifest = nlohmann::json::parse(read_file(args.labels));
            } catch (const nlohmann::json::exception& e) {
                fail(ErrorKind::parse, std::string("cannot parse manifest: ") + e.what());
            }
            for (const auto& [id, glucose] : manifest_glucose_refs(manifest))
                labels[id] = TrialLabel{glucose, std::nullopt, std::nullopt};
        } else {
            std::istringstream in(read_file(args.labels));
            labels = parse_labels_csv(in);
        }
    }

    FeatureTable table;
    table.schema_id = schema.id();
    for (const fs::path& file : sorted_csv_files(args.in_dir)) {
        const PpgSignal signal = read_signal_file(file);
        FeatureTable::Row row;
        row.trial_id = file.stem().string();
        row.features = assemble_features(signal, schema);
        const auto it = labels.find(row.trial_id);
        if (it != labels.end()) {
            row.features.glucose_ref = it->second.glucose_ref;
            row.features.age = it->second.age;
            row.features.stomach_state = it->second.stomach_state;
        }
        table.rows.push_back(std::move(row));
    }
    std::ostringstream out;
    write_feature_csv(out, table);
    atomic_write_file(args.out, out.str());
    return kExitOk;
}

// --- split persistence shared by train/predict ---

nlohmann::json split_to_json(const Dataset& train, const Dataset& test, const SplitConfig& split) {
    return {{"train_frac", split.train_frac},
            {"seed", split.seed},
            {"by", split_by_name(split.by)},
            {"train_ids", train.trial_ids},
            {"test_ids", test.trial_ids}};
}

// --- train ---

struct TrainArgs {
    std::string features;
    std::string model;
    std::string split_out;
    std::optional<int> k;
    std::optional<double> train_frac;
    std::optional<std::string> split_by;
    bool no_split = false;
};

int cmd_train(const GlobalOptions& global, const TrainArgs& args) {
    PipelineConfig cfg = load_config(global);
    if (args.k) cfg.k = *args.k;
    if (args.train_frac) cfg.split.train_frac = *args.train_frac;
    if (args.split_by) cfg.split.by = split_by_from_name(*args.split_by);
    cfg.validate();

    std::istringstream in(read_file(args.features));
    const Dataset full = feature_table_to_dataset(parse_feature_csv(in));

    PcrModel model;
    if (args.no_split) {
        model = pcr_train(full, cfg.k);
    } else {
        auto [train, test] = train_test_split(full, cfg.split.train_frac, cfg.split.seed,
                                              cfg.split.by);
        model = pcr_train(train, cfg.k);
        if (!args.split_out.empty())
            atomic_write_file(args.split_out,
                              split_to_json(train, test, cfg.split).dump(2) + "\n");
    }
    atomic_write_file(args.model, model_to_json(model).dump(2) + "\n");
    return kExitOk;
}

// --- predict ---

struct PredictArgs {
    std::string features;
    std::string model;
    std::string out;
    std::string split;
    std::string subset = "all";
};

int cmd_predict(const GlobalOptions&, const PredictArgs& args) {
    std::istringstream in(read_file(args.features));
    const FeatureTable table = parse_feature_csv(in);
    const PcrModel model = [&] {
        try {
            return model_from_json(nlohmann::json::parse(read_file(args.model)));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::parse, std::string("cannot parse model: ") + e.what());
        }
    }();
    if (!model.schema_id.empty() && table.schema_id != model.schema_id)
        fail(ErrorKind::schema, "feature schema '" + table.schema_id +
                                    "' does not match model schema '" + model.schema_id + "'");

    std::vector<std::string> keep_ids;
    if (!args.split.empty()) {
        nlohmann::json split;
        try {
            split = nlohmann::json::parse(read_file(args.split));
            if (args.subset == "test" || args.subset == "train")
                keep_ids = split.at(args.subset + "_ids").get<std::vector<std::string>>();
            else if (args.subset != "all")
                fail(ErrorKind::config, "--subset must be train, test or all");
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::parse, std::string("cannot parse split file: ") + e.what());
        }
    }

    std::vector<PredictionRow> rows;
    for (const auto& row : table.rows) {
        if (!keep_ids.empty() &&
            std::find(keep_ids.begin(), keep_ids.end(), row.trial_id) == keep_ids.end())
            continue;
        Eigen::MatrixXd x(1, static_cast<Eigen::Index>(row.features.values.size()));
        for (std::size_t j = 0; j < row.features.values.size(); ++j)
            x(0, static_cast<Eigen::Index>(j)) = row.features.values[j];
        PredictionRow out_row;
        out_row.trial_id = row.trial_id;
        out_row.reference = row.features.glucose_ref;
        out_row.predicted = pcr_predict(model, x)(0);
        rows.push_back(std::move(out_row));
    }
    if (rows.empty()) fail(ErrorKind::insufficient_data, "no trials selected for prediction");

    std::ostringstream out;
    write_predictions_csv(out, rows);
    atomic_write_file(args.out, out.str());
    return kExitOk;
}

// --- evaluate ---

struct EvaluateArgs {
    std::string pred;
    std::string sweep;
};

std::string render_clarke_svg(const std::vector<std::pair<double, double>>& pairs) {
    SvgPlot plot("Error grid", "reference glucose (mg/dL)", "predicted glucose (mg/dL)");
    plot.set_range(0, 400, 0, 400);
    for (const auto& boundary : clarke_boundaries())
        plot.add_line(boundary.points, boundary.name == "diagonal" ? "#999999" : "black", 1.0);
    plot.add_scatter(pairs, "#1f6fb2", 3.0);
    plot.add_label(300, 290, "A");
    plot.add_label(230, 340, "B");
    plot.add_label(335, 230, "B");
    plot.add_label(150, 330, "C");
    plot.add_label(165, 20, "C");
    plot.add_label(30, 130, "D");
    plot.add_label(320, 130, "D");
    plot.add_label(30, 350, "E");
    plot.add_label(350, 35, "E");
    return plot.render();
}

std::string render_sweep_svg(const std::vector<SweepPoint>& points) {
    SvgPlot plot("SEP by component count", "principal components", "error (mg/dL)");
    std::vector<std::pair<double, double>> sep_pts, rmsep_pts;
    for (const auto& pt : points) {
        sep_pts.emplace_back(pt.k, pt.sep);
        rmsep_pts.emplace_back(pt.k, pt.rmsep);
    }
    plot.add_line(sep_pts, "#1f6fb2", 2.0);
    plot.add_scatter(sep_pts, "#1f6fb2", 3.0);
    plot.add_line(rmsep_pts, "#c44e52", 2.0);
    plot.add_scatter(rmsep_pts, "#c44e52", 3.0);
    plot.add_label(points.empty() ? 1 : points.back().k, points.empty() ? 0 : points.back().sep,
                   "SEP");
    plot.add_label(points.empty() ? 1 : points.back().k,
                   points.empty() ? 0 : points.back().rmsep, "RMSEP");
    return plot.render();
}

int cmd_evaluate(const GlobalOptions& global, const EvaluateArgs& args) {
    if (global.out_dir.empty()) fail(ErrorKind::config, "evaluate requires --out-dir");
    const fs::path out_dir(global.out_dir);

    std::istringstream in(read_file(args.pred));
    const std::vector<PredictionRow> rows = parse_predictions_csv(in);
    std::vector<double> y_pred, y_ref;
    std::vector<std::pair<double, double>> pairs;
    for (const auto& row : rows) {
        if (!row.reference)
            fail(ErrorKind::parse, "trial " + row.trial_id + " has no reference value");
        y_pred.push_back(row.predicted);
        y_ref.push_back(*row.reference);
        pairs.emplace_back(*row.reference, row.predicted);
    }

    const SepResult r = sep(y_pred, y_ref);
    const ClarkeSummary summary = clarke_summary(pairs);
    std::size_t acceptable = 0;
    for (const auto& [reference, predicted] : pairs)
        if (clinical_acceptability(reference, predicted)) ++acceptable;

    EvaluationReport report;
    report.sep = r.sep;
    report.rmsep = r.rmsep;
    report.zone_percentages = summary.percentages;
    report.clinically_acceptable_fraction =
        static_cast<double>(acceptable) / static_cast<double>(pairs.size());
    report.n = pairs.size();

    atomic_write_file(out_dir / "report.json", report_to_json(report).dump(2) + "\n");
    {
        std::ostringstream csv;
        write_clarke_scatter_csv(csv, pairs);
        atomic_write_file(out_dir / "clarke_scatter.csv", csv.str());
    }
    {
        std::ostringstream csv;
        write_clarke_boundaries_csv(csv);
        atomic_write_file(out_dir / "clarke_boundaries.csv", csv.str());
    }
    atomic_write_file(out_dir / "clarke.svg", render_clarke_svg(pairs));
    if (!args.sweep.empty()) {
        std::istringstream sweep_in(read_file(args.sweep));
        atomic_write_file(out_dir / "sweep.svg", render_sweep_svg(parse_sweep_csv(sweep_in)));
    }
    std::cout << "SEP " << format_float(report.sep) << " mg/dL, RMSEP "
              << format_float(report.rmsep) << " mg/dL, zone A "
              << format_float(report.zone_percentages[0]) << "%\n";
    return kExitOk;
}

// --- sweep ---

struct SweepArgs {
    std::string features;
    std::string out;
    int k_max = 12;
    std::optional<double> train_frac;
};

int cmd_sweep(const GlobalOptions& global, const SweepArgs& args) {
    PipelineConfig cfg = load_config(global);
    if (args.train_frac) cfg.split.train_frac = *args.train_frac;
    cfg.validate();

    std::istringstream in(read_file(args.features));
    const Dataset full = feature_table_to_dataset(parse_feature_csv(in));
    auto [train, test] = train_test_split(full, cfg.split.train_frac, cfg.split.seed, cfg.split.by);

    // validate reachability before writing anything
    if (args.k_max > std::min<Eigen::Index>(train.n() - 1, train.p()))
        fail(ErrorKind::rank, "k_max exceeds min(n_train-1, p)");

    const std::vector<SweepPoint> points = sweep_components(train, test, args.k_max);
    std::ostringstream out;
    write_sweep_csv(out, points);
    atomic_write_file(args.out, out.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PPG-based glucose estimation pipeline"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "JSON config file");
    app.add_option("--seed", global.seed, "seed overriding the config value");
    app.add_option("--out-dir", global.out_dir, "output directory for multi-file commands");

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--n", synth_args.n, "number of trials");
    synth_cmd->add_option("--glucose-noise", synth_args.glucose_noise, "glucose noise sigma, mg/dL");
    synth_cmd->add_option("--duration", synth_args.duration, "trial duration, seconds");
    synth_cmd->add_option("--fs", synth_args.fs, "sampling rate, Hz");

    ExtractArgs extract_args;
    auto* extract_cmd = app.add_subcommand("extract", "frame stats -> raw waveform");
    extract_cmd->add_option("--in", extract_args.in, "frame-stats CSV");
    extract_cmd->add_option("--out", extract_args.out, "signal CSV to write");
    extract_cmd->add_option("--in-dir", extract_args.in_dir, "directory of frame-stats CSVs");
    extract_cmd->add_option("--out-dir", extract_args.out_dir, "directory for signal CSVs");
    extract_cmd->add_option("--channel", extract_args.channel, "red, green or blue");
    extract_cmd->add_option("--flip", extract_args.flip, "auto, on or off");

    PreprocessArgs preprocess_args;
    auto* preprocess_cmd = app.add_subcommand("preprocess", "baseline correction + bandpass");
    preprocess_cmd->add_option("--in", preprocess_args.in, "signal CSV");
    preprocess_cmd->add_option("--out", preprocess_args.out, "signal CSV to write");
    preprocess_cmd->add_option("--in-dir", preprocess_args.in_dir, "directory of signal CSVs");
    preprocess_cmd->add_option("--out-dir", preprocess_args.out_dir, "directory for outputs");

    FeaturesArgs features_args;
    auto* features_cmd = app.add_subcommand("features", "signals -> feature table");
    features_cmd->add_option("--in-dir", features_args.in_dir, "directory of signal CSVs")
        ->required();
    features_cmd->add_option("--out", features_args.out, "feature CSV to write")->required();
    features_cmd->add_option("--labels", features_args.labels,
                             "labels CSV or dataset manifest.json");
    features_cmd->add_option("--schema", features_args.schema, "stats-v1 or resample-v1");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "fit the calibration model");
    train_cmd->add_option("--features", train_args.features, "feature CSV")->required();
    train_cmd->add_option("--model", train_args.model, "model JSON to write")->required();
    train_cmd->add_option("--k", train_args.k, "principal component count");
    train_cmd->add_option("--train-frac", train_args.train_frac, "training fraction");
    train_cmd->add_option("--split-by", train_args.split_by, "trial or subject");
    train_cmd->add_option("--split-out", train_args.split_out, "write the split as JSON");
    train_cmd->add_flag("--no-split", train_args.no_split, "train on every row");

    PredictArgs predict_args;
    auto* predict_cmd = app.add_subcommand("predict", "apply a model to features");
    predict_cmd->add_option("--features", predict_args.features, "feature CSV")->required();
    predict_cmd->add_option("--model", predict_args.model, "model JSON")->required();
    predict_cmd->add_option("--out", predict_args.out, "predictions CSV to write")->required();
    predict_cmd->add_option("--split", predict_args.split, "split JSON from train");
    predict_cmd->add_option("--subset", predict_args.subset, "train, test or all");

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "error metrics + grid plots");
    evaluate_cmd->add_option("--pred", evaluate_args.pred, "predictions CSV")->required();
    evaluate_cmd->add_option("--sweep", evaluate_args.sweep, "sweep CSV to render");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "SEP against component count");
    sweep_cmd->add_option("--features", sweep_args.features, "feature CSV")->required();
    sweep_cmd->add_option("--out", sweep_args.out, "sweep CSV to write")->required();
    sweep_cmd->add_option("--k-max", sweep_args.k_max, "largest component count");
    sweep_cmd->add_option("--train-frac", sweep_args.train_frac, "training fraction");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(global, synth_args);
        if (extract_cmd->parsed()) return cmd_extract(global, extract_args);
        if (preprocess_cmd->parsed()) return cmd_preprocess(global, preprocess_args);
        if (features_cmd->parsed()) return cmd_features(global, features_args);
        if (train_cmd->parsed()) return cmd_train(global, train_args);
        if (predict_cmd->parsed()) return cmd_predict(global, predict_args);
        if (evaluate_cmd->parsed()) return cmd_evaluate(global, evaluate_args);
        if (sweep_cmd->parsed()) return cmd_sweep(global, sweep_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
