#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glucam/clinical.hpp"
#include "glucam/core.hpp"
#include "glucam/features.hpp"
#include "glucam/ingest.hpp"
#include "glucam/regression.hpp"
#include "glucam/synth.hpp"

namespace glucam {

/// Fixed artifact float formatting: 12 significant digits.
inline std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Writes the full content to a sibling temp file and renames it into
/// place, so a failed run never leaves a partial artifact.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot open for writing: " + tmp.string());
        out << content;
        if (!out.flush()) fail(ErrorKind::io, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::io, "cannot move temp file into place: " + path.string());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- frame-stats CSV ---

inline void write_frame_stats(std::ostream& out, const FrameStatsSeries& series) {
    out << "#fps=" << format_float(series.fps) << ",channel_max="
        << format_float(series.channel_max) << "\n";
    for (const auto& f : series.frames) {
        out << f.index << ',' << format_float(f.red) << ',' << format_float(f.green) << ','
            << format_float(f.blue) << "\n";
    }
}

// --- signal CSV: `#fs=...,stage=...` header then `index,sample` rows ---

inline void write_signal_csv(std::ostream& out, const PpgSignal& signal,
                             const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    out << "#fs=" << format_float(signal.fs) << ",stage=" << stage_name(signal.stage);
    for (const auto& [key, value] : extra) out << ',' << key << '=' << value;
    out << "\n";
    for (std::size_t i = 0; i < signal.samples.size(); ++i)
        out << i << ',' << format_float(signal.samples[i]) << "\n";
}

inline PpgSignal parse_signal_csv(std::istream& in) {
    PpgSignal signal;
    std::string line;
    std::size_t line_no = 0;
    bool have_fs = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::vector<std::pair<std::string, std::string>> kv;
            detail::parse_kv_header(line, line_no, kv);
            for (const auto& [key, value] : kv) {
                if (key == "fs") {
                    signal.fs = detail::parse_double_field(value, line_no, "fs");
                    have_fs = true;
                } else if (key == "stage") {
                    signal.stage = stage_from_name(value);
                }
            }
            continue;
        }
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 2)
            fail(ErrorKind::parse, "expected 2 fields at line " + std::to_string(line_no));
        signal.samples.push_back(detail::parse_double_field(fields[1], line_no, "sample"));
    }
    if (!have_fs) fail(ErrorKind::parse, "missing #fs= header line");
    signal.validate();
    return signal;
}

// --- feature CSV: schema comment, then trial_id,glucose,v...,age,stomach ---

struct FeatureTable {
    struct Row {
        std::string trial_id;
        FeatureVector features;
    };
    std::string schema_id;
    std::vector<Row> rows;
};

inline void write_feature_csv(std::ostream& out, const FeatureTable& table) {
    out << "#schema_id=" << table.schema_id << "\n";
    for (const auto& row : table.rows) {
        out << row.trial_id << ',';
        if (row.features.glucose_ref) out << format_float(*row.features.glucose_ref);
        for (double v : row.features.values) out << ',' << format_float(v);
        out << ',';
        if (row.features.age) out << format_float(*row.features.age);
        out << ',';
        if (row.features.stomach_state) out << *row.features.stomach_state;
        out << "\n";
    }
}

inline FeatureTable parse_feature_csv(std::istream& in) {
    FeatureTable table;
    std::string line;
    std::size_t line_no = 0;
    std::optional<std::size_t> width;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            std::vector<std::pair<std::string, std::string>> kv;
            detail::parse_kv_header(line, line_no, kv);
            for (const auto& [key, value] : kv)
                if (key == "schema_id") table.schema_id = value;
            continue;
        }
        const auto fields = detail::split_csv_row(line);
        if (fields.size() < 5)
            fail(ErrorKind::parse, "too few fields at line " + std::to_string(line_no));
        if (width && fields.size() != *width)
            fail(ErrorKind::parse, "inconsistent column count at line " + std::to_string(line_no));
        width = fields.size();

        FeatureTable::Row row;
        row.trial_id = fields[0];
        row.features.schema_id = table.schema_id;
        if (!fields[1].empty())
            row.features.glucose_ref = detail::parse_double_field(fields[1], line_no, "glucose_ref");
        for (std::size_t i = 2; i + 2 < fields.size(); ++i)
            row.features.values.push_back(
                detail::parse_double_field(fields[i], line_no, "feature value"));
        const std::string& age = fields[fields.size() - 2];
        if (!age.empty()) row.features.age = detail::parse_double_field(age, line_no, "age");
        const std::string& stomach = fields[fields.size() - 1];
        if (!stomach.empty()) {
            if (stomach != "full" && stomach != "empty" && stomach != "partial")
                fail(ErrorKind::parse, "unknown stomach_state at line " + std::to_string(line_no));
            row.features.stomach_state = stomach;
        }
        if (!all_finite(row.features.values))
            fail(ErrorKind::range, "non-finite feature at line " + std::to_string(line_no));
        table.rows.push_back(std::move(row));
    }
    if (table.schema_id.empty()) fail(ErrorKind::parse, "missing #schema_id= header line");
    return table;
}

/// Builds the regression matrix; every row must carry a glucose reference.
inline Dataset feature_table_to_dataset(const FeatureTable& table) {
    if (table.rows.empty()) fail(ErrorKind::insufficient_data, "feature table is empty");
    const std::size_t p = table.rows.front().features.values.size();
    Dataset ds;
    ds.schema_id = table.schema_id;
    ds.X.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(p));
    ds.y.resize(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (row.features.values.size() != p)
            fail(ErrorKind::shape, "feature length mismatch for trial " + row.trial_id);
        if (!row.features.glucose_ref)
            fail(ErrorKind::parse, "trial " + row.trial_id + " has no glucose reference");
        for (std::size_t j = 0; j < p; ++j)
            ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                row.features.values[j];
        ds.y(static_cast<Eigen::Index>(i)) = *row.features.glucose_ref;
        ds.trial_ids.push_back(row.trial_id);
    }
    return ds;
}

// --- predictions CSV ---

struct PredictionRow {
    std::string trial_id;
    std::optional<double> reference;
    double predicted = 0.0;
};

inline void write_predictions_csv(std::ostream& out, const std::vector<PredictionRow>& rows) {
    out << "trial_id,reference,predicted\n";
    for (const auto& r : rows) {
        out << r.trial_id << ',';
        if (r.reference) out << format_float(*r.reference);
        out << ',' << format_float(r.predicted) << "\n";
    }
}

inline std::vector<PredictionRow> parse_predictions_csv(std::istream& in) {
    std::vector<PredictionRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!header_seen) {
            header_seen = true;
            continue;  // column header row
        }
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 3)
            fail(ErrorKind::parse, "expected 3 fields at line " + std::to_string(line_no));
        PredictionRow r;
        r.trial_id = fields[0];
        if (!fields[1].empty())
            r.reference = detail::parse_double_field(fields[1], line_no, "reference");
        r.predicted = detail::parse_double_field(fields[2], line_no, "predicted");
        rows.push_back(std::move(r));
    }
    return rows;
}

// --- sweep CSV ---

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
    out << "k,sep,rmsep\n";
    for (const auto& pt : points)
        out << pt.k << ',' << format_float(pt.sep) << ',' << format_float(pt.rmsep) << "\n";
}

inline std::vector<SweepPoint> parse_sweep_csv(std::istream& in) {
    std::vector<SweepPoint> points;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 3)
            fail(ErrorKind::parse, "expected 3 fields at line " + std::to_string(line_no));
        SweepPoint pt;
        pt.k = static_cast<int>(detail::parse_double_field(fields[0], line_no, "k"));
        pt.sep = detail::parse_double_field(fields[1], line_no, "sep");
        pt.rmsep = detail::parse_double_field(fields[2], line_no, "rmsep");
        points.push_back(pt);
    }
    return points;
}

// --- Clarke plot data CSVs ---

inline void write_clarke_scatter_csv(std::ostream& out,
                                     const std::vector<std::pair<double, double>>& pairs) {
    out << "reference,predicted,zone\n";
    for (const auto& [reference, predicted] : pairs)
        out << format_float(reference) << ',' << format_float(predicted) << ','
            << zone_letter(clarke_zone(reference, predicted)) << "\n";
}

inline void write_clarke_boundaries_csv(std::ostream& out) {
    out << "name,reference,predicted\n";
    for (const auto& boundary : clarke_boundaries())
        for (const auto& [reference, predicted] : boundary.points)
            out << boundary.name << ',' << format_float(reference) << ','
                << format_float(predicted) << "\n";
}

// --- JSON artifacts ---

inline nlohmann::json model_to_json(const PcrModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["schema_id"] = model.schema_id;
    j["k"] = model.k;
    j["intercept"] = model.intercept;
    j["mu"] = std::vector<double>(model.mu.data(), model.mu.data() + model.mu.size());
    j["sigma"] = std::vector<double>(model.sigma.data(), model.sigma.data() + model.sigma.size());
    j["beta_pc"] =
        std::vector<double>(model.beta_pc.data(), model.beta_pc.data() + model.beta_pc.size());
    std::vector<double> loadings;  // row-major p x k
    loadings.reserve(static_cast<std::size_t>(model.loadings.size()));
    for (Eigen::Index i = 0; i < model.loadings.rows(); ++i)
        for (Eigen::Index j2 = 0; j2 < model.loadings.cols(); ++j2)
            loadings.push_back(model.loadings(i, j2));
    j["loadings"] = loadings;
    return j;
}

inline PcrModel model_from_json(const nlohmann::json& j) {
    try {
        PcrModel model;
        if (j.at("format_version").get<int>() != 1)
            fail(ErrorKind::parse, "unsupported model format_version");
        model.schema_id = j.at("schema_id").get<std::string>();
        model.k = j.at("k").get<int>();
        model.intercept = j.at("intercept").get<double>();
        const auto mu = j.at("mu").get<std::vector<double>>();
        const auto sigma = j.at("sigma").get<std::vector<double>>();
        const auto beta = j.at("beta_pc").get<std::vector<double>>();
        const auto loadings = j.at("loadings").get<std::vector<double>>();
        const std::size_t p = mu.size();
        if (sigma.size() != p || beta.size() != static_cast<std::size_t>(model.k) ||
            loadings.size() != p * static_cast<std::size_t>(model.k))
            fail(ErrorKind::shape, "model arrays have inconsistent sizes");
        model.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), static_cast<Eigen::Index>(p));
        model.sigma = Eigen::Map<const Eigen::VectorXd>(sigma.data(), static_cast<Eigen::Index>(p));
        model.beta_pc = Eigen::Map<const Eigen::VectorXd>(beta.data(), model.k);
        model.loadings.resize(static_cast<Eigen::Index>(p), model.k);
        for (std::size_t i = 0; i < p; ++i)
            for (int c = 0; c < model.k; ++c)
                model.loadings(static_cast<Eigen::Index>(i), c) =
                    loadings[i * static_cast<std::size_t>(model.k) + static_cast<std::size_t>(c)];
        return model;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed model file: ") + e.what());
    }
}

inline nlohmann::json report_to_json(const EvaluationReport& report) {
    nlohmann::json zones;
    const char* names[5] = {"A", "B", "C", "D", "E"};
    for (std::size_t i = 0; i < 5; ++i) zones[names[i]] = report.zone_percentages[i];
    nlohmann::json j;
    j["sep"] = report.sep;
    j["rmsep"] = report.rmsep;
    j["zone_percentages"] = zones;
    j["clinically_acceptable_fraction"] = report.clinically_acceptable_fraction;
    j["n"] = report.n;
    return j;
}

inline nlohmann::json manifest_to_json(const SynthDataset& ds,
                                       const std::vector<std::string>& files) {
    nlohmann::json j;
    j["seed"] = ds.seed;
    j["n"] = ds.trials.size();
    j["glucose_map"] = {{"intercept", ds.glucose_map.intercept},
                        {"lag_coeff", ds.glucose_map.lag_coeff},
                        {"ratio_coeff", ds.glucose_map.ratio_coeff},
                        {"heart_rate_coeff", ds.glucose_map.heart_rate_coeff},
                        {"noise_sigma", ds.glucose_map.noise_sigma}};
    auto range = [](const ParamRange& r) { return nlohmann::json{{"lo", r.lo}, {"hi", r.hi}}; };
    j["profile"] = {{"heart_rate", range(ds.profile.heart_rate)},
                    {"systolic_amp", range(ds.profile.systolic_amp)},
                    {"diastolic_ratio", range(ds.profile.diastolic_ratio)},
                    {"diastolic_lag", range(ds.profile.diastolic_lag)},
                    {"pulse_width", range(ds.profile.pulse_width)},
                    {"drift_slope", range(ds.profile.drift_slope)},
                    {"drift_sin_amp", range(ds.profile.drift_sin_amp)},
                    {"drift_sin_freq", range(ds.profile.drift_sin_freq)},
                    {"noise_sigma", range(ds.profile.noise_sigma)},
                    {"duration", ds.profile.duration},
                    {"fs", ds.profile.fs}};
    j["seed_mixing"] = "splitmix64(seed ^ (0xD1B54A32D192ED03 + i * 0x9E3779B97F4A7C15))";
    nlohmann::json trials = nlohmann::json::array();
    for (std::size_t i = 0; i < ds.trials.size(); ++i) {
        const SynthTrial& t = ds.trials[i];
        nlohmann::json entry;
        entry["id"] = t.id;
        if (i < files.size()) entry["file"] = files[i];
        entry["seed"] = mix_seed(ds.seed, i);
        entry["glucose_ref"] = t.glucose_ref ? *t.glucose_ref : 0.0;
        entry["params"] = {{"heart_rate", t.params.heart_rate},
                           {"systolic_amp", t.params.systolic_amp},
                           {"diastolic_amp", t.params.diastolic_amp},
                           {"diastolic_lag", t.params.diastolic_lag},
                           {"pulse_width", t.params.pulse_width},
                           {"drift_slope", t.params.drift.slope},
                           {"drift_sin_amp", t.params.drift.sin_amp},
                           {"drift_sin_freq", t.params.drift.sin_freq},
                           {"noise_sigma", t.params.noise_sigma},
                           {"duration", t.params.duration},
                           {"fs", t.params.fs},
                           {"seed", t.params.seed}};
        trials.push_back(entry);
    }
    j["trials"] = trials;
    return j;
}

/// Per-trial reference values supplied alongside signal files.
struct TrialLabel {
    double glucose_ref = 0.0;
    std::optional<double> age;
    std::optional<std::string> stomach_state;
};

/// Labels CSV: header `trial_id,glucose_ref,age,stomach_state`; the last
/// two columns may be empty.
inline std::map<std::string, TrialLabel> parse_labels_csv(std::istream& in) {
    std::map<std::string, TrialLabel> out;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const auto fields = detail::split_csv_row(line);
        if (fields.size() != 4)
            fail(ErrorKind::parse, "expected 4 fields at line " + std::to_string(line_no));
        TrialLabel label;
        label.glucose_ref = detail::parse_double_field(fields[1], line_no, "glucose_ref");
        if (!fields[2].empty())
            label.age = detail::parse_double_field(fields[2], line_no, "age");
        if (!fields[3].empty()) label.stomach_state = fields[3];
        out[fields[0]] = label;
    }
    return out;
}

/// Reads glucose references (by trial id) back out of a dataset manifest.
inline std::map<std::string, double> manifest_glucose_refs(const nlohmann::json& manifest) {
    std::map<std::string, double> out;
    try {
        for (const auto& entry : manifest.at("trials"))
            out[entry.at("id").get<std::string>()] = entry.at("glucose_ref").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::parse, std::string("malformed manifest: ") + e.what());
    }
    return out;
}

}  // namespace glucam
